"""Renormalized particle sector and the balance equations it satisfies.

The particle carries six-momentum ``p`` and an extra momentum ``pi`` whose
wedge with the velocity is the internal spin.  Together with the radiated
fluxes they conserve total momentum and angular momentum; the checks here
verify that statement along prescribed worldlines by finite differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .flux import coupling, radiated_angular_rate, radiated_rate, radiative_angular_momentum, radiative_momentum
from .tensor6 import full_contraction, minkowski_dot, wedge
from .worldline import KinematicState, Worldline, central_weights

# same stencil policy as numeric worldlines: 11 points, first derivative
_HALF = 5
_D1 = central_weights(1, _HALF)
_D2 = central_weights(2, _HALF)
_OFFSETS = np.arange(-_HALF, _HALF + 1)
DEFAULT_STEP = 0.02


@dataclass(frozen=True)
class GaugeFunction:
    """Scalar ``nu(tau)`` with its first two derivatives in closed form."""

    kind: str = "zero"
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in ("zero", "sin", "poly"):
            raise ValueError(f"unknown gauge function {self.kind!r}")

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def sin(cls, amplitude: float = 1.0, frequency: float = 1.0):
        return cls("sin", (float(amplitude), float(frequency)))

    @classmethod
    def poly(cls, *coeffs: float):
        """Polynomial with coefficients in increasing degree."""
        return cls("poly", tuple(float(c) for c in coeffs))

    def derivative(self, tau: float, n: int = 0) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "sin":
            amp, om = self.params
            return amp * om**n * math.sin(om * tau + n * math.pi / 2)
        c = np.polynomial.polynomial.polyder(self.params, n) if n else np.asarray(self.params)
        return float(np.polynomial.polynomial.polyval(tau, c)) if len(c) else 0.0

    def __call__(self, tau: float) -> float:
        return self.derivative(tau, 0)


@dataclass(frozen=True)
class RenormalizationConstants:
    m: float
    mu: float
    nu: GaugeFunction = field(default_factory=GaugeFunction.zero)


# --- particle sector ------------------------------------------------------------

def particle_pi(state: KinematicState, c: RenormalizationConstants, e: float) -> np.ndarray:
    return c.mu * state.a + c.nu(state.tau) * state.u - 0.8 * coupling(e) * state.adot


def particle_pi_dot(state: KinematicState, c: RenormalizationConstants, e: float) -> np.ndarray:
    s, nu = state, c.nu
    return (c.mu * s.adot + nu.derivative(s.tau, 1) * s.u + nu(s.tau) * s.a
            - 0.8 * coupling(e) * s.addot)


def particle_momentum(state: KinematicState, c: RenormalizationConstants, e: float) -> np.ndarray:
    s = state
    eps = coupling(e)
    return (c.m * s.u + c.mu * (-s.adot + 1.5 * s.a2 * s.u)
            + eps * (0.8 * s.addot - 1.6 * s.a2_dot * s.u - 64.0 / 35.0 * s.a2 * s.a))


def wedge_scalar_M(state: KinematicState, c: RenormalizationConstants, e: float) -> float:
    """The scalar multiplying ``u`` in the wedge-system solution, fixed by consistency."""
    s = state
    return c.m + 1.5 * c.mu * s.a2 + c.nu.derivative(s.tau, 1) - 1.6 * coupling(e) * s.a2_dot


def momentum_via_wedge_solution(state: KinematicState, c: RenormalizationConstants, e: float) -> np.ndarray:
    """``p = M u + nu a - (64/35) eps a^2 a - d(pi)/dtau``; the gauge function cancels."""
    s = state
    return (wedge_scalar_M(s, c, e) * s.u + c.nu(s.tau) * s.a
            - 64.0 / 35.0 * coupling(e) * s.a2 * s.a - particle_pi_dot(s, c, e))


def bare_momentum(state: KinematicState, m: float, mu: float) -> np.ndarray:
    return m * state.u + mu * (-state.adot + 1.5 * state.a2 * state.u)


def internal_spin(state: KinematicState, c: RenormalizationConstants, e: float) -> np.ndarray:
    return c.mu * wedge(state.u, state.a) - 0.8 * coupling(e) * wedge(state.u, state.adot)


def spin_magnitude(state: KinematicState, c: RenormalizationConstants, e: float) -> tuple[float, float]:
    """``s^2`` in closed form and as ``-1/2 s_ab s^ab``.

    The cross term enters with a minus sign: ``a . adot = (a^2)'/2``.
    """
    s = state
    ce = e * e / (5.0 * math.pi**2)
    closed = c.mu**2 * s.a2 - c.mu * ce * s.a2_dot + ce**2 * (s.adot2 + s.a2**2)
    spin = internal_spin(s, c, e)
    return float(closed), float(-0.5 * full_contraction(spin, spin))


def rest_mass(state: KinematicState, c: RenormalizationConstants, e: float) -> tuple[float, float]:
    """``m0`` in closed form and as ``-(p . u)``."""
    s = state
    closed = c.m + 0.5 * c.mu * s.a2 - 0.4 * coupling(e) * s.a2_dot
    return float(closed), float(-minkowski_dot(particle_momentum(s, c, e), s.u))


def particle_angular_momentum(state: KinematicState, c: RenormalizationConstants, e: float) -> np.ndarray:
    return wedge(state.z, particle_momentum(state, c, e)) + wedge(state.u, particle_pi(state, c, e))


@dataclass
class ParticleSector:
    state: KinematicState
    p_part: np.ndarray
    pi_part: np.ndarray
    s_part: np.ndarray
    m0: float


def particle_sector(state: KinematicState, c: RenormalizationConstants, e: float) -> ParticleSector:
    return ParticleSector(state, particle_momentum(state, c, e), particle_pi(state, c, e),
                          internal_spin(state, c, e), rest_mass(state, c, e)[0])


def radiation_force(state: KinematicState, e: float) -> np.ndarray:
    return -radiated_rate(state, e)


def momentum_derivative(state: KinematicState, c: RenormalizationConstants, e: float) -> np.ndarray:
    """Analytic proper-time derivative of the particle momentum."""
    s = state
    eps = coupling(e)
    return (c.m * s.a + c.mu * (-s.addot + 1.5 * s.a2_dot * s.u + 1.5 * s.a2 * s.a)
            + eps * (0.8 * s.adddot - 1.6 * s.a2_dot * s.a - 1.6 * s.a2_ddot * s.u
                     - 64.0 / 35.0 * (s.a2_dot * s.a + s.a2 * s.adot)))


def required_force(state: KinematicState, c: RenormalizationConstants, e: float) -> np.ndarray:
    """External force that makes the given motion satisfy the momentum balance."""
    return momentum_derivative(state, c, e) + radiated_rate(state, e)


# --- finite-difference audits ------------------------------------------------------

def fd_derivative(fn, tau: float, h: float = DEFAULT_STEP, order: int = 1):
    weights = _D1 if order == 1 else _D2
    vals = [np.asarray(fn(tau + o * h), dtype=float) for o in _OFFSETS]
    return sum(wt * v for wt, v in zip(weights, vals)) / h**order


def _rel(residual, *terms) -> float:
    """Size of ``residual`` relative to the largest term; absolute when all terms vanish."""
    scale = max(float(np.max(np.abs(t))) for t in terms)
    res = float(np.max(np.abs(residual)))
    return res / max(scale, 1.0) if scale < 1e-12 else res / scale


def momentum_balance_residual(w: Worldline, c: RenormalizationConstants, e: float, tau: float,
                              F_ext, h: float = DEFAULT_STEP) -> tuple[np.ndarray, float]:
    """``dp/dtau + radiated rate - F_ext`` with ``dp/dtau`` by finite differences.

    Returns the residual vector and its size relative to the largest term.
    """
    pdot = fd_derivative(lambda t: particle_momentum(w.state(t), c, e), tau, h)
    rate = radiated_rate(w.state(tau), e)
    F = np.asarray(F_ext, dtype=float)
    res = pdot + rate - F
    return res, _rel(res, pdot, rate, F)


def angular_balance_residual(w: Worldline, c: RenormalizationConstants, e: float, tau: float,
                             h: float = DEFAULT_STEP) -> tuple[np.ndarray, float]:
    """``u^(p + pi') + a^pi + eps[4/5 a^adot + 64/35 a^2 u^a]``, ``pi'`` by finite differences.

    External forces cancel from this combination once the torque is ``z ^ F``.
    """
    s = w.state(tau)
    eps = coupling(e)
    pidot = fd_derivative(lambda t: particle_pi(w.state(t), c, e), tau, h)
    p, pi = particle_momentum(s, c, e), particle_pi(s, c, e)
    lhs = wedge(s.u, p + pidot) + wedge(s.a, pi)
    rhs = -eps * (0.8 * wedge(s.a, s.adot) + 64.0 / 35.0 * s.a2 * wedge(s.u, s.a))
    return lhs - rhs, _rel(lhs - rhs, lhs, rhs)


def total_momentum(w: Worldline, c, e, tau: float, tau_ref: float) -> np.ndarray:
    """Particle momentum plus momentum radiated since ``tau_ref``."""
    p = particle_momentum(w.state(tau), c, e)
    if tau == tau_ref:
        return p
    sign = 1.0 if tau > tau_ref else -1.0
    lo, hi = sorted((tau_ref, tau))
    return p + sign * radiative_momentum(w, e, lo, hi, epsrel=1e-13)


def total_angular_momentum(w: Worldline, c, e, tau: float, tau_ref: float) -> np.ndarray:
    M = particle_angular_momentum(w.state(tau), c, e)
    if tau == tau_ref:
        return M
    sign = 1.0 if tau > tau_ref else -1.0
    lo, hi = sorted((tau_ref, tau))
    return M + sign * radiative_angular_momentum(w, e, lo, hi, epsrel=1e-13)


def closure_residuals(w: Worldline, c: RenormalizationConstants, e: float, tau: float,
                      force=None, h: float = DEFAULT_STEP) -> dict[str, float]:
    """Relative residuals of ``dP/dtau = F`` and ``dM/dtau = z ^ F`` for prescribed motion.

    ``force(state)`` defaults to :func:`required_force`.  Totals include the
    radiated fluxes integrated from ``tau``, differentiated by finite differences.
    """
    force = force or (lambda st: required_force(st, c, e))
    s = w.state(tau)
    F = force(s)
    dP = fd_derivative(lambda t: total_momentum(w, c, e, t, tau), tau, h)
    dM = fd_derivative(lambda t: total_angular_momentum(w, c, e, t, tau), tau, h)
    torque = wedge(s.z, F)
    return {"momentum": _rel(dP - F, dP, F), "angular": _rel(dM - torque, dM, torque)}


def radiative_rate_check(w: Worldline, e: float, tau: float, tau_ref: float,
                         h: float = DEFAULT_STEP) -> float:
    """Radiation force against minus the derivative of the radiated momentum integral."""
    def integral(t):
        lo, hi = sorted((tau_ref, t))
        sign = 1.0 if t >= tau_ref else -1.0
        return sign * radiative_momentum(w, e, lo, hi, epsrel=1e-13) if t != tau_ref else np.zeros(6)

    d = fd_derivative(integral, tau, h)
    f = radiation_force(w.state(tau), e)
    return _rel(d + f, d, f)


def angular_rate_terms(state: KinematicState, e: float) -> np.ndarray:
    return radiated_angular_rate(state, e)


def appendix_chain_check(w: Worldline, c: RenormalizationConstants, e: float, tau: float,
                         h: float = DEFAULT_STEP) -> dict[str, float]:
    """Relative residuals of the scalar consistency chain behind the particle momentum.

    Keys ``A1``..``A8`` follow the chain from the velocity projection of the
    momentum balance to the closed form of ``M``; ``pp`` checks that ``M``
    turns the wedge-system solution into the particle momentum.
    """
    s = w.state(tau)
    eps = coupling(e)
    mu, nu = c.mu, c.nu
    t = tau

    def p_at(x):
        return particle_momentum(w.state(x), c, e)

    def pi_at(x):
        return particle_pi(w.state(x), c, e)

    def M_at(x):
        return wedge_scalar_M(w.state(x), c, e)

    p, pi = p_at(t), pi_at(t)
    pdot = fd_derivative(p_at, t, h)
    pidot = fd_derivative(pi_at, t, h)
    piddot = fd_derivative(pi_at, t, h, order=2)
    dot = minkowski_dot
    pu_dot = fd_derivative(lambda x: dot(p_at(x), w.state(x).u), t, h)
    piu_dot = fd_derivative(lambda x: dot(fd_derivative(pi_at, x, h), w.state(x).u), t, h)
    Mdot = fd_derivative(M_at, t, h)
    Mval = M_at(t)
    a2, a2d, a2dd, ad2 = s.a2, s.a2_dot, s.a2_ddot, s.adot2

    out = {}
    lhs, rhs = dot(pdot, s.u), eps * (0.8 * ad2 + 64.0 / 35.0 * a2**2)
    out["A1"] = _rel(lhs - rhs, lhs, rhs)
    lhs_r = dot(radiation_force(s, e), s.u)
    out["A1_force"] = _rel(lhs_r - rhs, lhs_r, rhs)
    lhs, rhs = dot(p, s.a), nu(t) * a2 - 64.0 / 35.0 * eps * a2**2 - dot(pidot, s.a)
    out["A2"] = _rel(lhs - rhs, dot(p, s.a), nu(t) * a2, eps * a2**2, dot(pidot, s.a))
    rhs = nu(t) * a2 + 0.8 * eps * ad2 - dot(pidot, s.a)
    out["A3"] = _rel(pu_dot - rhs, pu_dot, nu(t) * a2, eps * ad2, dot(pidot, s.a))
    rhs = -Mdot - piu_dot
    out["A4"] = _rel(pu_dot - rhs, pu_dot, Mdot, piu_dot)
    rhs = -nu(t) * a2 - 0.8 * eps * ad2 - dot(piddot, s.u)
    out["A5"] = _rel(Mdot - rhs, Mdot, nu(t) * a2, eps * ad2, dot(piddot, s.u))
    lhs = dot(piddot, s.u)
    rhs = -1.5 * mu * a2d - nu.derivative(t, 2) - nu(t) * a2 + eps * (1.6 * a2dd - 0.8 * ad2)
    out["A6"] = _rel(lhs - rhs, lhs, mu * a2d, nu.derivative(t, 2), nu(t) * a2, eps * a2dd, eps * ad2)
    rhs = 1.5 * mu * a2d + nu.derivative(t, 2) - 1.6 * eps * a2dd
    out["A7"] = _rel(Mdot - rhs, Mdot, mu * a2d, nu.derivative(t, 2), eps * a2dd)
    rhs = c.m + 1.5 * mu * a2 + nu.derivative(t, 1) - 1.6 * eps * a2d
    M_scale = (c.m, mu * a2, nu.derivative(t, 1), eps * a2d)
    out["A8"] = _rel(Mval - rhs, Mval, *M_scale)
    wedge_p = Mval * s.u + nu(t) * s.a - 64.0 / 35.0 * eps * a2 * s.a - pidot
    out["pp"] = _rel(wedge_p - p, wedge_p, p)
    return out
