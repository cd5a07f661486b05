"""Energy-momentum and angular-momentum fluxes of the retarded field.

Closed forms for the radiative and bound parts are paired with numerical
integration over world tubes (retarded spheres of fixed radius swept along
the worldline) and over constant-time hyperplanes.  Every flux is reported
between two finite proper times.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad_vec

from . import kernels
from .lw_field import field_at
from .quadrature import SphereQuadrature
from .stress_energy import graded_coefficients, stress_energy_prefactor, stress_energy_total
from .tensor6 import ETA, LorentzMap, apply_lorentz, boost_matrix, lower, minkowski_dot, wedge
from .worldline import KinematicState, RetardedFrame, Worldline

MOMENTUM_POWERS = (-4, -3, -2, -1, 0)
ANGULAR_POWERS = (-4, -3, -2, -1, 0, 1)


class ConvergenceError(RuntimeError):
    pass


def coupling(e: float) -> float:
    """``e^2 / 4 pi^2``."""
    return e * e / (4.0 * math.pi**2)


# --- closed forms -----------------------------------------------------------

def radiated_rate(state: KinematicState, e: float) -> np.ndarray:
    """Radiated six-momentum per unit proper time."""
    s = state
    return coupling(e) * (0.8 * s.u * s.adot2 - 6.0 / 35.0 * s.a2 * s.adot
                          + 3.0 / 7.0 * s.a * s.a2_dot + 2.0 * s.a2**2 * s.u)


def radiated_angular_rate(state: KinematicState, e: float) -> np.ndarray:
    s = state
    own = 0.8 * wedge(s.a, s.adot) + 64.0 / 35.0 * s.a2 * wedge(s.u, s.a)
    return wedge(s.z, radiated_rate(s, e)) + coupling(e) * own


def _integrate(fn, tau0, tau1, epsrel, points=None, limit=2000, epsabs=1e-200):
    val, err, info = quad_vec(fn, tau0, tau1, epsabs=epsabs, epsrel=epsrel, norm="max",
                              points=points, limit=limit, full_output=True)
    if info.status != 0:
        raise ConvergenceError(f"proper-time quadrature did not converge (status {info.status}, err {err:.2e})")
    return val, err


def radiative_momentum(w: Worldline, e: float, tau0: float, tau1: float, epsrel: float = 1e-12) -> np.ndarray:
    return _integrate(lambda t: radiated_rate(w.state(t), e), tau0, tau1, epsrel)[0]


def radiative_angular_pieces(w: Worldline, e: float, tau0: float, tau1: float,
                             epsrel: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Orbital ``z ^ p_rad`` and intrinsic parts of the radiated angular momentum."""
    # separate channels: the two cancel exactly for hyperbolic motion,
    # leaving no scale for a relative tolerance on their sum
    def pieces(t):
        s = w.state(t)
        own = 0.8 * wedge(s.a, s.adot) + 64.0 / 35.0 * s.a2 * wedge(s.u, s.a)
        return np.stack([wedge(s.z, radiated_rate(s, e)), coupling(e) * own])

    val = _integrate(pieces, tau0, tau1, epsrel)[0]
    return val[0], val[1]


def radiative_angular_momentum(w: Worldline, e: float, tau0: float, tau1: float,
                               epsrel: float = 1e-12) -> np.ndarray:
    orbital, own = radiative_angular_pieces(w, e, tau0, tau1, epsrel)
    return orbital + own


def bound_momentum_terms(state: KinematicState, e: float) -> dict[int, np.ndarray]:
    """Coefficients of ``r^-3, r^-2, r^-1`` in the bound momentum at one endpoint."""
    eps = coupling(e)
    return {-3: eps * 1.5 * state.u, -2: eps * 2.4 * state.a, -1: eps * 2.0 * state.a2 * state.u}


def bound_momentum(state: KinematicState, e: float, r: float) -> np.ndarray:
    if r <= 0.0:
        raise ValueError("r must be positive")
    return sum(c * r**p for p, c in bound_momentum_terms(state, e).items())


def spin_shadow(state: KinematicState, e: float) -> np.ndarray:
    """The r^-1 internal-angular-momentum coefficient ``(12/5) eps u^a``."""
    return coupling(e) * 2.4 * wedge(state.u, state.a)


def bound_angular_terms(state: KinematicState, e: float) -> dict[int, np.ndarray]:
    terms = {p: wedge(state.z, c) for p, c in bound_momentum_terms(state, e).items()}
    terms[-1] = terms[-1] + spin_shadow(state, e)
    return terms


def bound_angular_momentum(state: KinematicState, e: float, r: float) -> np.ndarray:
    if r <= 0.0:
        raise ValueError("r must be positive")
    return sum(c * r**p for p, c in bound_angular_terms(state, e).items())


# --- world-tube integration -------------------------------------------------

def surface_element(frame: RetardedFrame, r: float | None = None) -> np.ndarray:
    """Covariant ``[-u + (1 + r a_k) k] r^4`` (per unit ``dOmega du``)."""
    r = frame.r if r is None else r
    s = frame.state
    return lower(-s.u + (1.0 + r * frame.a_k) * frame.k) * r**4


@dataclass
class TubeIntegral:
    """Numerical tube fluxes, split by power of the tube radius."""

    tau0: float
    tau1: float
    momentum: dict[int, np.ndarray]
    angular: dict[int, np.ndarray]
    error: float = 0.0

    def p_rad(self) -> np.ndarray:
        return self.momentum[0]

    def p_bnd(self, r: float) -> np.ndarray:
        return sum(self.momentum[p] * r**p for p in MOMENTUM_POWERS if p < 0)

    def M_rad(self) -> np.ndarray:
        return self.angular[0]

    def M_bnd(self, r: float) -> np.ndarray:
        return sum(self.angular[p] * r**p for p in ANGULAR_POWERS if p != 0)


def _noise_floor(w: Worldline, e: float, tau0: float, tau1: float, epsrel: float) -> float:
    """Absolute tolerance far below the endpoint bound terms.

    Tube integrands of unaccelerated motion are pure rounding noise; without
    a floor the adaptive rule would subdivide forever chasing it.
    """
    size = 0.0
    for tau in (tau0, tau1):
        s = w.state(tau)
        for c in (*bound_momentum_terms(s, e).values(), *bound_angular_terms(s, e).values()):
            size = max(size, float(np.max(np.abs(c))))
    return max(1e-2 * epsrel * size, 1e-200)


def tube_rate(state: KinematicState, e: float, q: SphereQuadrature, backend: str | None = None):
    """Flux per unit proper time through the tube, by power of r."""
    k = q.null_vectors(state.u)
    mom, ang = kernels.tube_density(state.z, state.u, state.a, state.adot, k, q.weights, backend)
    pref = stress_energy_prefactor(e)
    return pref * mom, pref * ang


def tube_flux_numeric(w: Worldline, e: float, tau0: float, tau1: float,
                      q: SphereQuadrature | None = None, epsrel: float = 1e-11,
                      points=None, backend: str | None = None, limit: int = 2000) -> TubeIntegral:
    """Integrate the graded tube density over ``[tau0, tau1]``.

    The result holds the coefficient of every power of the radius, so it
    serves every ``r`` at once.
    """
    if not tau0 < tau1:
        raise ValueError("need tau0 < tau1")
    q = q or SphereQuadrature()

    def integrand(t):
        mom, ang = tube_rate(w.state(t), e, q, backend)
        return np.concatenate([mom.ravel(), ang.ravel()])

    val, err = _integrate(integrand, tau0, tau1, epsrel, points=points, limit=limit,
                          epsabs=_noise_floor(w, e, tau0, tau1, epsrel))
    mom = val[:30].reshape(5, 6)
    ang = val[30:].reshape(6, 6, 6)
    return TubeIntegral(
        tau0, tau1,
        {p: mom[p + 4] for p in MOMENTUM_POWERS},
        {p: ang[p + 4] for p in ANGULAR_POWERS},
        float(err),
    )


def tube_total_rate(state: KinematicState, e: float, r: float, q: SphereQuadrature):
    """Ungraded flux rate at radius ``r``: full field, full stress tensor.

    Independent of the graded kernel; used by the radius sweep.
    """
    k = q.null_vectors(state.u)
    T = stress_energy_total(field_at(state, k, np.full(q.size, r), e))
    ak = (k * ETA.diagonal()) @ state.a
    dsig = lower(-state.u + (1.0 + r * ak)[:, None] * k) * r**4
    flux = np.einsum("nm,nmv->nv", dsig, T)
    y = state.z + r * k
    mom = q.weights @ flux
    yw = y * q.weights[:, None]
    ang = yw.T @ flux
    return mom, ang - ang.T


def tube_flux_direct(w: Worldline, e: float, r: float, tau0: float, tau1: float,
                     q: SphereQuadrature | None = None, epsrel: float = 1e-11, limit: int = 2000):
    """Total (radiative + bound) tube flux at a single radius."""
    q = q or SphereQuadrature()

    def integrand(t):
        mom, ang = tube_total_rate(w.state(t), e, r, q)
        return np.concatenate([mom, ang.ravel()])

    val, _ = _integrate(integrand, tau0, tau1, epsrel, limit=limit, epsabs=_noise_floor(w, e, tau0, tau1, epsrel))
    return val[:6], val[6:].reshape(6, 6)


# --- report -----------------------------------------------------------------

def relative_residual(numeric, closed, cancelled: float = 0.0) -> float:
    """Max-norm of ``numeric - closed`` relative to the larger of the two.

    When the closed value vanishes by cancellation (below ``1e-10`` of the
    ``cancelled`` term size), the residual is taken relative to that size
    instead, since a ratio of rounding noise carries no information.
    """
    numeric, closed = np.asarray(numeric), np.asarray(closed)
    scale = max(float(np.max(np.abs(numeric))), float(np.max(np.abs(closed))))
    if scale < 1e-10 * cancelled:
        scale = cancelled
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(numeric - closed))) / scale


@dataclass
class FluxReport:
    r: float
    tau0: float
    tau1: float
    p_rad: np.ndarray
    p_bnd: np.ndarray
    p_bnd_endpoint_terms: dict[int, tuple[np.ndarray, np.ndarray]]
    M_rad: np.ndarray
    M_bnd: np.ndarray
    M_bnd_endpoint_terms: dict[int, tuple[np.ndarray, np.ndarray]]
    spin_coefficient: tuple[np.ndarray, np.ndarray]
    numeric: TubeIntegral = field(repr=False)
    term_scales: dict[str, float] = field(default_factory=dict)

    @property
    def p_rad_numeric(self):
        return self.numeric.p_rad()

    @property
    def p_bnd_numeric(self):
        return self.numeric.p_bnd(self.r)

    @property
    def M_rad_numeric(self):
        return self.numeric.M_rad()

    @property
    def M_bnd_numeric(self):
        return self.numeric.M_bnd(self.r)

    def residuals(self) -> dict[str, float]:
        ts = self.term_scales
        return {
            "p_rad": relative_residual(self.p_rad_numeric, self.p_rad, ts.get("p_rad", 0.0)),
            "p_bnd": relative_residual(self.p_bnd_numeric, self.p_bnd, ts.get("p_bnd", 0.0)),
            "M_rad": relative_residual(self.M_rad_numeric, self.M_rad, ts.get("M_rad", 0.0)),
            "M_bnd": relative_residual(self.M_bnd_numeric, self.M_bnd, ts.get("M_bnd", 0.0)),
        }

    def rows(self):
        """One row per component: (quantity, index, closed, numeric, residual)."""
        out = []
        for name, closed, num in (("p_rad", self.p_rad, self.p_rad_numeric),
                                  ("p_bnd", self.p_bnd, self.p_bnd_numeric)):
            for i in range(6):
                out.append((name, str(i), closed[i], num[i], num[i] - closed[i]))
        for name, closed, num in (("M_rad", self.M_rad, self.M_rad_numeric),
                                  ("M_bnd", self.M_bnd, self.M_bnd_numeric)):
            for i in range(6):
                for j in range(i + 1, 6):
                    out.append((name, f"{i}{j}", closed[i, j], num[i, j], num[i, j] - closed[i, j]))
        return out


def flux_report(w: Worldline, e: float, r: float, tau0: float, tau1: float,
                q: SphereQuadrature | None = None, epsrel: float = 1e-11, numeric: TubeIntegral | None = None,
                backend: str | None = None) -> FluxReport:
    numeric = numeric or tube_flux_numeric(w, e, tau0, tau1, q, epsrel, backend=backend)
    s0, s1 = w.state(tau0), w.state(tau1)
    pt0, pt1 = bound_momentum_terms(s0, e), bound_momentum_terms(s1, e)
    mt0, mt1 = bound_angular_terms(s0, e), bound_angular_terms(s1, e)
    orbital, own = radiative_angular_pieces(w, e, tau0, tau1)
    p_b0, p_b1 = bound_momentum(s0, e, r), bound_momentum(s1, e, r)
    m_b0, m_b1 = bound_angular_momentum(s0, e, r), bound_angular_momentum(s1, e, r)

    def size(*xs):
        return max(float(np.max(np.abs(x))) for x in xs)

    return FluxReport(
        r=r, tau0=tau0, tau1=tau1,
        p_rad=radiative_momentum(w, e, tau0, tau1),
        p_bnd=p_b1 - p_b0,
        p_bnd_endpoint_terms={p: (pt0[p], pt1[p]) for p in pt0},
        M_rad=orbital + own,
        M_bnd=m_b1 - m_b0,
        M_bnd_endpoint_terms={p: (mt0[p], mt1[p]) for p in mt0},
        spin_coefficient=(spin_shadow(s0, e), spin_shadow(s1, e)),
        numeric=numeric,
        term_scales={"p_bnd": size(p_b0, p_b1), "M_rad": size(orbital, own), "M_bnd": size(m_b0, m_b1)},
    )


# --- hyperplane oracle --------------------------------------------------------

def hyperplane_bound_expression(state: KinematicState, e: float, t: float) -> np.ndarray:
    """Bound momentum on ``y0 = t`` accumulated from the light cone of ``state``.

    Antiderivative (in retarded time) of the hyperplane bound density; the
    lab distance ``t - z0`` plays the role of the radius.
    """
    u, a = state.u, state.a
    d = t - state.z[0]
    if d <= 0.0:
        raise ValueError("emission event must precede the hyperplane")
    u0, a0, a2 = u[0], a[0], state.a2
    e0 = ETA[0]
    t3 = 3.0 / 35.0 * (-12.0 * u0 * u + 40.0 * u0**3 * u + e0 * (-1.5 + 12.0 * u0**2))
    t2 = 3.0 / 35.0 * (-5.0 * a + 31.0 * a0 * u0 * u + 33.0 * a * u0**2 + 3.0 * e0 * a0)
    t1 = (37.0 * a0 * a + 71.0 * a2 * u0 * u + e0 * a2) / 35.0
    return coupling(e) * (t3 / d**3 + t2 / d**2 + t1 / d)


def cap_bound_momentum(state: KinematicState, e: float, r: float) -> np.ndarray:
    """Hyperplane expression taken in the comoving frame at distance ``r``, boosted back."""
    to_lab = LorentzMap(boost_matrix(state.u), "to_lab")
    local = state.transformed(to_lab.inverse(), origin=state.z)
    return apply_lorentz(to_lab, hyperplane_bound_expression(local, e, r))


def _embedding(w: Worldline, t: float, tau: float, angles: np.ndarray) -> np.ndarray:
    s = w.state(tau)
    kp = np.concatenate([np.ones((angles.shape[0], 1)), _unit(angles)], axis=1)
    k = kp @ boost_matrix(s.u).T
    return s.z[1:] + ((t - s.z[0]) / k[:, 0])[:, None] * k[:, 1:]


def _unit(angles):
    from .worldline import unit_direction
    return unit_direction(angles)


_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


def hyperplane_measure(w: Worldline, t: float, tau: float, angles, h: float = 1e-3) -> np.ndarray:
    """Volume density ``|det d(y^1..y^5)/d(tau, angles)|`` on ``y0 = t`` (Gram determinant)."""
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    jac = np.empty((angles.shape[0], 5, 5))
    offs = np.arange(-2, 3)
    jac[:, :, 0] = sum(c * _embedding(w, t, tau + o * h, angles) for c, o in zip(_D1, offs) if c) / h
    for j in range(4):
        cols = []
        for o in offs:
            shifted = angles.copy()
            shifted[:, j] += o * h
            cols.append(_embedding(w, t, tau, shifted))
        jac[:, :, j + 1] = sum(c * col for c, col in zip(_D1, cols) if c) / h
    gram = np.einsum("nki,nkj->nij", jac, jac)
    return np.sqrt(np.abs(np.linalg.det(gram)))


def hyperplane_rate(w: Worldline, e: float, t: float, tau: float, q: SphereQuadrature,
                    h: float = 1e-3) -> np.ndarray:
    """Bound momentum on ``y0 = t`` per unit retarded proper time."""
    s = w.state(tau)
    k = q.null_vectors(s.u)
    r = (t - s.z[0]) / k[:, 0]
    coeffs = graded_coefficients(s, k, e)
    bound = sum(coeffs[kappa] / (r**kappa)[:, None, None] for kappa in (5, 6, 7, 8))
    measure = hyperplane_measure(w, t, tau, q.angles, h) / q.sin_density()
    return (q.weights * measure) @ bound[:, 0, :]


def hyperplane_flux_oracle(w: Worldline, e: float, t: float, tau_min: float, tau_max: float,
                           q: SphereQuadrature | None = None, epsrel: float = 1e-10) -> np.ndarray:
    """Bound momentum crossing ``y0 = t`` from retarded proper times in ``[tau_min, tau_max]``."""
    if not tau_min < tau_max:
        raise ValueError("need tau_min < tau_max")
    if w.state(tau_max).z[0] >= t:
        raise ValueError("tau_max must lie in the causal past of the hyperplane")
    q = q or SphereQuadrature.uniform(12)
    return _integrate(lambda tau: hyperplane_rate(w, e, t, tau, q), tau_min, tau_max, epsrel)[0]


# --- radius sweep and power-law audit ----------------------------------------

class FitError(ValueError):
    pass


DEFAULT_RADII = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0)


@dataclass
class PowerLawFit:
    """``values(r) ~ constant + sum_p coefficients[p] * r**p`` per component."""

    radii: np.ndarray
    exponents: np.ndarray
    coefficients: np.ndarray  # (n_exponents, *component_shape)
    constant: np.ndarray
    residual: float
    condition: float

    def coefficient_near(self, p: float, tol: float = 0.05) -> np.ndarray:
        i = int(np.argmin(np.abs(self.exponents - p)))
        if abs(self.exponents[i] - p) > tol:
            raise FitError(f"no fitted exponent near {p}")
        return self.coefficients[i]


def _geometric_ratio(radii: np.ndarray) -> float:
    if radii.ndim != 1 or radii.size < 5:
        raise FitError("need at least five radii")
    if np.any(radii <= 0.0):
        raise FitError("radii must be positive")
    ratios = radii[1:] / radii[:-1]
    rho = float(ratios[0])
    if np.max(np.abs(ratios - rho)) > 1e-9 * rho:
        raise FitError("radii must form a geometric sequence")
    if abs(math.log(rho)) < 0.05:
        raise FitError("radii too clustered")
    return rho


def fit_power_laws(radii, values, rank_tol: float = 1e-7, max_condition: float = 1e10) -> PowerLawFit:
    """Recover exponents and coefficients of a sum of powers plus a constant.

    Uses linear prediction on consecutive differences across a geometric set of
    radii: each power ``r**p`` becomes a geometric sequence with ratio
    ``rho**p``, shared by all components.
    """
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    shape = values.shape[1:]
    rho = _geometric_ratio(radii)
    V = values.reshape(radii.size, -1)
    D = np.diff(V, axis=0)
    scale = np.max(np.abs(D), axis=0)
    live = scale > rank_tol * max(float(np.max(scale)), 1e-300)
    if not np.any(scale > 0.0):
        raise FitError("values do not depend on the radius")
    D = D[:, live] / scale[live]
    m = D.shape[0]

    def windows(width):
        return np.concatenate([D[j:j + width].T for j in range(m - width + 1)], axis=0)

    sv = np.linalg.svd(windows(m - 1), compute_uv=False)
    order = int(np.sum(sv > rank_tol * sv[0]))
    if order > m - 2:
        raise FitError("too few radii for the number of distinct powers")
    H = windows(order + 1)
    b, *_ = np.linalg.lstsq(H[:, :order], -H[:, order], rcond=None)
    roots = np.roots(np.concatenate([[1.0], b[::-1]]))
    if np.any(np.abs(roots.imag) > 1e-6 * np.abs(roots)) or np.any(roots.real <= 0.0):
        raise FitError("prediction roots are not real and positive")
    exponents = np.sort(np.log(roots.real) / math.log(rho))

    design = np.column_stack([np.ones(radii.size)] + [radii**p for p in exponents])
    cond = float(np.linalg.cond(design / np.max(np.abs(design), axis=0)))
    if cond > max_condition:
        raise FitError(f"ill-conditioned power-law fit (condition {cond:.1e})")
    coef, *_ = np.linalg.lstsq(design, V, rcond=None)
    resid = float(np.max(np.abs(design @ coef - V)) / max(float(np.max(np.abs(V))), 1e-300))
    return PowerLawFit(radii, exponents, coef[1:].reshape((order,) + shape),
                       coef[0].reshape(shape), resid, cond)


@dataclass
class SweepResult:
    method: str
    radii: np.ndarray
    momentum: np.ndarray
    angular: np.ndarray | None
    momentum_fit: PowerLawFit
    angular_fit: PowerLawFit | None
    spin_expected: np.ndarray | None = None
    spin_fitted: np.ndarray | None = None

    def spin_residual(self) -> float | None:
        if self.spin_fitted is None:
            return None
        return relative_residual(self.spin_fitted, self.spin_expected)


def sweep_tube(w: Worldline, e: float, tau0: float, tau1: float, radii=DEFAULT_RADII,
               q: SphereQuadrature | None = None, epsrel: float = 1e-11, workers: int = 1,
               limit: int = 2000) -> SweepResult:
    """Total tube flux at each radius, then power-law fits of its radius dependence.

    The fitted ``r^-1`` angular coefficient, with the orbital piece
    ``z ^ (2 eps a^2 u)`` removed, is returned next to the spin shadow
    difference it should equal.
    """
    radii = np.asarray(radii, dtype=float)
    _geometric_ratio(radii)
    q = q or SphereQuadrature()

    def one(r):
        return tube_flux_direct(w, e, float(r), tau0, tau1, q, epsrel, limit)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, radii))
    else:
        results = [one(r) for r in radii]
    mom = np.array([p for p, _ in results])
    ang = np.array([m for _, m in results])
    mfit = fit_power_laws(radii, mom)
    try:
        afit = fit_power_laws(radii, ang)
    except FitError:
        afit = None
    s0, s1 = w.state(tau0), w.state(tau1)
    eps = coupling(e)
    spin_expected = spin_shadow(s1, e) - spin_shadow(s0, e)
    spin_fitted = None
    if afit is not None and np.any(np.abs(afit.exponents + 1.0) < 0.05):
        orbital = wedge(s1.z, 2 * eps * s1.a2 * s1.u) - wedge(s0.z, 2 * eps * s0.a2 * s0.u)
        spin_fitted = afit.coefficient_near(-1.0) - orbital
    return SweepResult("tube", radii, mom, ang, mfit, afit, spin_expected, spin_fitted)


def sweep_hyperplane(w: Worldline, e: float, tau: float, radii=DEFAULT_RADII, far: float = 64.0,
                     q: SphereQuadrature | None = None, epsrel: float = 1e-10) -> SweepResult:
    """Bound momentum on hyperplanes a lab distance ``r`` ahead of ``z(tau)``.

    Each integral starts where the hyperplane is ``far`` away from the
    worldline, so the lower-limit contribution is the same for every radius
    and cancels in the differences.  Works for unaccelerated motion, where
    tube fluxes between two instants vanish identically.  The default sphere
    rule is exact for a charge at rest; boosted motion needs more nodes.
    """
    radii = np.asarray(radii, dtype=float)
    _geometric_ratio(radii)
    if far <= 2.0 * radii.max():
        raise ValueError("far must exceed twice the largest radius")
    q = q or SphereQuadrature.uniform(4)
    z0 = w.state(tau).z[0]
    vals = []
    for r in radii:
        t = z0 + r
        lo = _time_at(w, t - far, tau)
        vals.append(hyperplane_flux_oracle(w, e, t, lo, tau, q, epsrel))
    mom = np.array(vals)
    return SweepResult("hyperplane", radii, mom, None, fit_power_laws(radii, mom), None)


def _time_at(w: Worldline, t: float, guess: float) -> float:
    """Proper time at which the worldline reaches lab time ``t``."""
    from scipy.optimize import brentq
    lo, hi = guess - 1.0, guess
    while w.state(lo).z[0] > t:
        lo = guess - 2.0 * (guess - lo)
    return brentq(lambda s: w.state(s).z[0] - t, lo, hi, xtol=1e-14)
