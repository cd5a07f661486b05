"""Named numerical checks built from the module-level invariants.

Each suite returns a list of :class:`Check` rows carrying the measured value,
the tolerance it is judged against, and the verdict.  The command-line
``verify`` task is a composition of these suites.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import balance as bal
from . import flux as fx
from .lw_field import field_fd_oracle, field_from_frame, gauge_residual, wave_residual
from .quadrature import SphereQuadrature, moment_errors
from .stress_energy import null_contraction_check, stress_energy_split
from .worldline import Worldline, frame_from_state, null_vector, retarded_frame


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    value: float
    tol: float
    target: float | None = None

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        if self.target is None:
            return self.value <= self.tol
        return abs(self.value - self.target) <= self.tol


def _worst(values) -> float:
    return float(max(values, default=0.0))


def random_field_points(w: Worldline, n: int, seed: int, tau_range=(0.0, 1.0), r_range=(0.5, 2.0)):
    """Field points ``z(tau) + r k`` with random retarded time, distance and direction."""
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(n):
        tau = rng.uniform(*tau_range)
        r = rng.uniform(*r_range)
        ang = np.array([rng.uniform(0, math.pi), rng.uniform(0, math.pi), rng.uniform(0, math.pi),
                        rng.uniform(0, 2 * math.pi)])
        s = w.state(tau)
        pts.append(s.z + r * null_vector(s, ang))
    return pts


def moments_suite(nodes: int = 24, tol: float = 1e-10, u=None) -> list[Check]:
    u = np.array([1.0, 0, 0, 0, 0, 0]) if u is None else u
    errs = moment_errors(SphereQuadrature.uniform(nodes), u)
    return [Check("moments", f"order{k}", v, tol) for k, v in sorted(errs.items())]


def fd_orders(w: Worldline, e: float, y, h: float) -> dict[str, tuple[float, float]]:
    """Observed convergence orders (h -> h/2, h/2 -> h/4) of the stencil checks at ``y``."""
    fr = retarded_frame(w, y)
    F = field_from_frame(fr, e)
    errs = {"field": [], "gauge": [], "wave": []}
    for hh in (h, h / 2, h / 4):
        errs["field"].append(float(np.max(np.abs(field_fd_oracle(w, e, y, hh) - F))))
        errs["gauge"].append(abs(gauge_residual(w, e, y, hh)))
        errs["wave"].append(float(np.max(np.abs(wave_residual(w, e, y, hh)))))
    return {k: (math.log2(v[0] / v[1]), math.log2(v[1] / v[2])) for k, v in errs.items()}


def field_suite(w: Worldline, e: float, n_samples: int = 50, seed: int = 7, h_ratio: float = 0.04,
                order_tol: float = 0.3, tau_range=(0.0, 1.0), r_range=(0.5, 2.0),
                samples: list | None = None) -> list[Check]:
    """Convergence order of the finite-difference field, gauge and wave checks.

    Reports the median observed order over the samples for each check.  When
    ``samples`` is a list, one ``(tau_ret, r, orders)`` entry per point is
    appended to it.
    """
    orders = {"field": [], "gauge": [], "wave": []}
    for y in random_field_points(w, n_samples, seed, tau_range, r_range):
        fr = retarded_frame(w, y)
        got = fd_orders(w, e, y, h_ratio * fr.r)
        for k, v in got.items():
            orders[k].extend(v)
        if samples is not None:
            samples.append((fr.tau, fr.r, {k: v[1] for k, v in got.items()}))
    return [Check("field", f"{k}_order", float(np.median(v)), order_tol, 4.0) for k, v in orders.items()]


def stress_suite(w: Worldline, e: float, n_samples: int = 20, seed: int = 11, recon_tol: float = 1e-12,
                 null_tol: float = 1e-11, scale_tol: float = 1e-10, tau_range=(0.0, 1.0)) -> list[Check]:
    recon, null_rad, null_5, scale = [], [], [], []
    for y in random_field_points(w, n_samples, seed, tau_range):
        fr = retarded_frame(w, y)
        sp = stress_energy_split(fr, e)
        recon.append(sp.reconstruction_error())
        nr, n5 = null_contraction_check(sp, fr.k)
        null_rad.append(nr / sp.norm())
        null_5.append(n5 / sp.norm())
        # same retarded point and direction, doubled distance
        far = stress_energy_split(frame_from_state(fr.state, fr.state.z + 2.0 * fr.r * fr.k), e)
        for kappa in (4, 5, 6, 7, 8):
            near_t = sp.rad if kappa == 4 else sp.bnd_by_power[kappa]
            far_t = far.rad if kappa == 4 else far.bnd_by_power[kappa]
            i = np.unravel_index(np.argmax(np.abs(near_t)), near_t.shape)
            if abs(near_t[i]) > 1e-14 * sp.norm():
                scale.append(abs(math.log2(near_t[i] / far_t[i]) - kappa))
    return [
        Check("stress", "reconstruction", _worst(recon), recon_tol),
        Check("stress", "k.T_rad", _worst(null_rad), null_tol),
        Check("stress", "k.T_5", _worst(null_5), null_tol),
        Check("stress", "grade_rescaling", _worst(scale), scale_tol),
    ]


def flux_suite(w: Worldline, e: float, r: float, tau0: float, tau1: float, r_alt: float | None = None,
               q: SphereQuadrature | None = None, epsrel: float = 1e-11, rad_tol: float = 1e-7,
               bnd_tol: float = 1e-6, ang_tol: float = 1e-5, r_indep_tol: float = 1e-6,
               numeric: fx.TubeIntegral | None = None, limit: int = 2000) -> list[Check]:
    q = q or SphereQuadrature()
    num = numeric or fx.tube_flux_numeric(w, e, tau0, tau1, q, epsrel, limit=limit)
    rep = fx.flux_report(w, e, r, tau0, tau1, q, numeric=num)
    res = rep.residuals()
    checks = [
        Check("flux", "p_rad", res["p_rad"], rad_tol),
        Check("flux", "p_bnd", res["p_bnd"], bnd_tol),
        Check("flux", "M_rad", res["M_rad"], rad_tol),
        Check("flux", "M_bnd", res["M_bnd"], ang_tol),
    ]
    if r_alt is not None:
        mom_a, ang_a = fx.tube_flux_direct(w, e, r, tau0, tau1, q, epsrel, limit)
        mom_b, ang_b = fx.tube_flux_direct(w, e, r_alt, tau0, tau1, q, epsrel, limit)
        # radiative part = total minus the bound part at that radius
        ts = rep.term_scales
        for name, tot_a, tot_b, bnd_a, bnd_b, cancelled in (
                ("p_rad", mom_a, mom_b, num.p_bnd(r), num.p_bnd(r_alt), ts["p_bnd"]),
                ("M_rad", ang_a, ang_b, num.M_bnd(r), num.M_bnd(r_alt), max(ts["M_rad"], ts["M_bnd"]))):
            checks.append(Check("flux", f"{name}_r_independence",
                                fx.relative_residual(tot_a - bnd_a, tot_b - bnd_b, cancelled), r_indep_tol))
    return checks


def sweep_checks(sw: fx.SweepResult, expected, exponent_tol: float = 0.02, spin_tol: float = 1e-4) -> list[Check]:
    checks = []
    fit = sw.momentum_fit
    checks.append(Check("sweep", "momentum_powers", float(len(fit.exponents)), 0.0, float(len(expected))))
    for p in expected:
        dev = float(np.min(np.abs(fit.exponents - p))) if len(fit.exponents) else math.inf
        checks.append(Check("sweep", f"momentum_exponent_{p}", dev, exponent_tol))
    if sw.angular_fit is not None:
        for p in expected:
            dev = float(np.min(np.abs(sw.angular_fit.exponents - p)))
            checks.append(Check("sweep", f"angular_exponent_{p}", dev, exponent_tol))
    if sw.spin_fitted is not None:
        checks.append(Check("sweep", "spin_coefficient", sw.spin_residual(), spin_tol))
    return checks


def balance_suite(w: Worldline, c: bal.RenormalizationConstants, e: float, taus, h: float = bal.DEFAULT_STEP,
                  nu_tol: float = 1e-13, angular_tol: float = 1e-9, chain_tol: float = 1e-8,
                  identity_tol: float = 1e-12, closure_tol: float = 1e-8) -> list[Check]:
    nus = (bal.GaugeFunction.zero(), bal.GaugeFunction.sin(1.0, 1.0), bal.GaugeFunction.poly(0.3, -0.2, 0.1))
    nu_dev, ang, chain, spin, m0, clos_p, clos_m, mbal = [], [], [], [], [], [], [], []
    for tau in taus:
        s = w.state(tau)
        ref = bal.particle_momentum(s, c, e)
        scale = max(float(np.max(np.abs(ref))), 1e-300)
        for nu in nus:
            cn = bal.RenormalizationConstants(c.m, c.mu, nu)
            nu_dev.append(float(np.max(np.abs(bal.momentum_via_wedge_solution(s, cn, e) - ref))) / scale)
            ang.append(bal.angular_balance_residual(w, cn, e, tau, h)[1])
        chain.append(max(bal.appendix_chain_check(w, c, e, tau, h).values()))
        closed, contracted = bal.spin_magnitude(s, c, e)
        spin.append(abs(closed - contracted) / max(abs(contracted), 1.0))
        closed, contracted = bal.rest_mass(s, c, e)
        m0.append(abs(closed - contracted) / max(abs(contracted), 1.0))
        cl = bal.closure_residuals(w, c, e, tau, h=h)
        clos_p.append(cl["momentum"])
        clos_m.append(cl["angular"])
        mbal.append(bal.momentum_balance_residual(w, c, e, tau, bal.required_force(s, c, e), h)[1])
    return [
        Check("balance", "nu_invariance", _worst(nu_dev), nu_tol),
        Check("balance", "angular_wedge_system", _worst(ang), angular_tol),
        Check("balance", "scalar_chain", _worst(chain), chain_tol),
        Check("balance", "spin_square", _worst(spin), identity_tol),
        Check("balance", "rest_mass", _worst(m0), identity_tol),
        Check("balance", "momentum_balance", _worst(mbal), closure_tol),
        Check("balance", "momentum_closure", _worst(clos_p), closure_tol),
        Check("balance", "angular_closure", _worst(clos_m), closure_tol),
    ]
