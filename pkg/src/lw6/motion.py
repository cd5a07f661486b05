"""Integration of the particle's equation of motion under an external force.

The momentum balance with the particle momentum substituted is linear in the
highest derivative, so it is solved explicitly and the resulting first-order
system in ``(z, u, a, adot, addot)`` is advanced by an embedded Runge-Kutta
5(4) pair.  After every accepted step the state is projected back onto the
kinematic constraints; the drift seen before projection is recorded.

With ``e = 0`` the order drops: ``mu != 0`` leaves a system in
``(z, u, a, adot)``; ``mu = 0`` is Newtonian with ``a = F / m``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .balance import RenormalizationConstants
from .flux import coupling, radiated_rate
from .tensor6 import minkowski_dot
from .worldline import KinematicState

log = logging.getLogger(__name__)

DRIFT_BOUND = 1e-7


class StepCollapseError(RuntimeError):
    """The adaptive step fell below its floor, typically during runaway growth."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class ConstraintDriftError(RuntimeError):
    pass


@dataclass(frozen=True)
class MotionState:
    tau: float
    z: np.ndarray
    u: np.ndarray
    a: np.ndarray
    adot: np.ndarray
    addot: np.ndarray

    @classmethod
    def from_kinematic(cls, s: KinematicState) -> "MotionState":
        return cls(s.tau, s.z, s.u, s.a, s.adot, s.addot)

    @classmethod
    def at_rest(cls, tau: float = 0.0, z=None, a=None) -> "MotionState":
        zero = np.zeros(6)
        u = np.array([1.0, 0, 0, 0, 0, 0])
        z = zero if z is None else np.asarray(z, dtype=float)
        a = zero if a is None else np.asarray(a, dtype=float)
        return cls(tau, z, u, a, zero + minkowski_dot(a, a) * u, zero.copy())

    def chain_residuals(self) -> np.ndarray:
        dot = minkowski_dot
        return np.array([
            dot(self.u, self.u) + 1.0,
            dot(self.u, self.a),
            dot(self.u, self.adot) + dot(self.a, self.a),
            dot(self.u, self.addot) + 3.0 * dot(self.a, self.adot),
        ])


ForceFn = Callable[[float, MotionState], np.ndarray]


def no_force(tau: float, s: MotionState) -> np.ndarray:
    return np.zeros(6)


def lab_constant_force(f) -> ForceFn:
    """Constant spatial force in the lab frame, as a covariant six-force."""
    f = np.asarray(f, dtype=float)
    if f.shape != (5,):
        raise ValueError("lab force needs five spatial components")

    def force(tau, s):
        return np.concatenate([[f @ s.u[1:]], s.u[0] * f])

    return force


def covariant_constant_force(F) -> ForceFn:
    F = np.asarray(F, dtype=float)
    return lambda tau, s: F.copy()


def _perp(v, u):
    return v + minkowski_dot(u, v) * u


def _order(c: RenormalizationConstants, e: float) -> int:
    """Number of six-vector blocks in the integrated state."""
    if e != 0.0:
        return 5
    return 4 if c.mu != 0.0 else 2


def third_derivative(s: MotionState, c: RenormalizationConstants, e: float, F) -> np.ndarray:
    """Solve the momentum balance for ``d^3 a / d tau^3``-free form: returns ``adddot``."""
    eps = coupling(e)
    dot = minkowski_dot
    u, a, ad, add = s.u, s.a, s.adot, s.addot
    a2 = dot(a, a)
    a2d = 2.0 * dot(a, ad)
    a2dd = 2.0 * (dot(ad, ad) + dot(a, add))
    state = KinematicState(s.tau, s.z, u, a, ad, add, np.zeros(6))
    rhs = (F - radiated_rate(state, e) - c.m * a - c.mu * (-add + 1.5 * a2d * u + 1.5 * a2 * a)
           + eps * (1.6 * a2d * a + 1.6 * a2dd * u + 64.0 / 35.0 * (a2d * a + a2 * ad)))
    adddot = rhs / (0.8 * eps)
    return _perp(adddot, u) + (3.0 * dot(ad, ad) + 4.0 * dot(a, add)) * u


def rigid_second_derivative(s: MotionState, c: RenormalizationConstants, F) -> np.ndarray:
    dot = minkowski_dot
    u, a, ad = s.u, s.a, s.adot
    add = (c.m * a + c.mu * (1.5 * 2.0 * dot(a, ad) * u + 1.5 * dot(a, a) * a) - F) / c.mu
    return _perp(add, u) - 3.0 * dot(a, ad) * u


def _pack(s: MotionState, n: int) -> np.ndarray:
    return np.concatenate([s.z, s.u, s.a, s.adot, s.addot][:n])


def _unpack(tau: float, y: np.ndarray, n: int, c, e, force) -> MotionState:
    blocks = [y[6 * i:6 * i + 6] for i in range(n)] + [np.zeros(6)] * (5 - n)
    s = MotionState(tau, *blocks)
    if n == 2:
        a = _perp(force(tau, s), s.u) / c.m
        s = MotionState(tau, s.z, s.u, a, np.zeros(6), np.zeros(6))
    return s


def _rhs(tau, y, n, c, e, force):
    s = _unpack(tau, y, n, c, e, force)
    F = np.asarray(force(tau, s), dtype=float)
    if n == 5:
        return np.concatenate([s.u, s.a, s.adot, s.addot, third_derivative(s, c, e, F)])
    if n == 4:
        return np.concatenate([s.u, s.a, s.adot, rigid_second_derivative(s, c, F)])
    return np.concatenate([s.u, _perp(F, s.u) / c.m])


def project(y: np.ndarray, n: int) -> tuple[np.ndarray, float]:
    """Restore the kinematic constraints; returns the projected state and the drift before it."""
    dot = minkowski_dot
    y = y.copy()
    u = y[6:12]
    drift = abs(dot(u, u) + 1.0)
    u = u / math.sqrt(-dot(u, u))
    y[6:12] = u
    if n >= 4:
        a = y[12:18]
        drift = max(drift, abs(dot(u, a)))
        a = _perp(a, u)
        ad = y[18:24]
        drift = max(drift, abs(dot(u, ad) + dot(a, a)))
        ad = _perp(ad, u) + dot(a, a) * u
        y[12:18], y[18:24] = a, ad
    if n == 5:
        add = y[24:30]
        drift = max(drift, abs(dot(u, add) + 3.0 * dot(a, ad)))
        y[24:30] = _perp(add, u) + 3.0 * dot(a, ad) * u
    return y, drift


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


def _dp_step(f, t, y, h, k0):
    ks = [k0]
    for i in range(1, 7):
        yi = y + h * sum(aij * kj for aij, kj in zip(_A[i], ks))
        ks.append(f(t + _C[i] * h, yi))
    y5 = y + h * sum(b * k for b, k in zip(_B, ks))
    err = h * sum((b - b4) * k for b, b4, k in zip(_B, _B4, ks))
    return y5, err


@dataclass
class Trajectory:
    states: list[MotionState] = field(default_factory=list)
    drifts: list[float] = field(default_factory=list)
    rejected: int = 0
    dropped_force: float = 0.0

    @property
    def taus(self) -> np.ndarray:
        return np.array([s.tau for s in self.states])

    def array(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.states])

    @property
    def max_drift(self) -> float:
        return max(self.drifts, default=0.0)


def integrate_motion(initial: MotionState, c: RenormalizationConstants, e: float, force: ForceFn | None,
                     tau_end: float, rtol: float = 1e-12, atol: float = 1e-12, h0: float | None = None,
                     h_min: float = 1e-10, max_steps: int = 200_000, output_times=None,
                     drift_bound: float = DRIFT_BOUND, chain_tol: float = 1e-10) -> Trajectory:
    """Advance ``initial`` to ``tau_end``.

    Records every accepted step, landing exactly on ``output_times`` when
    given.  Runaway growth shows up as ordinary output until the step size
    collapses, which raises :class:`StepCollapseError` carrying the partial
    trajectory.  The component of the force along ``u`` is incompatible
    with the balance identities and is discarded; its largest size is kept in
    ``Trajectory.dropped_force``.
    """
    force = force or no_force
    if not tau_end > initial.tau:
        raise ValueError("tau_end must exceed the initial proper time")
    if c.m == 0.0 and c.mu == 0.0 and e == 0.0:
        raise ValueError("all inertial constants vanish")
    n = _order(c, e)
    if np.max(np.abs(initial.chain_residuals()[: n - 1])) > chain_tol:
        raise ValueError("initial state violates the kinematic chain")

    traj = Trajectory()

    def fwrap(tau, s):
        F = np.asarray(force(tau, s), dtype=float)
        along = abs(minkowski_dot(F, s.u))
        traj.dropped_force = max(traj.dropped_force, along)
        return _perp(F, s.u)

    def f(t, y):
        return _rhs(t, y, n, c, e, fwrap)

    t = float(initial.tau)
    y = _pack(initial, n)
    traj.states.append(_unpack(t, y, n, c, e, fwrap))
    traj.drifts.append(0.0)
    stops = sorted(float(x) for x in (() if output_times is None else output_times) if t < x < tau_end) + [float(tau_end)]
    h = h0 or min(1e-2, (tau_end - t) / 10)
    k0 = f(t, y)
    steps = 0
    while stops:
        target = stops[0]
        hh = min(h, target - t)
        y_new, err = _dp_step(f, t, y, hh, k0)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        ratio = float(np.sqrt(np.mean((err / scale) ** 2)))
        if not np.all(np.isfinite(y_new)):
            ratio = np.inf
        if ratio <= 1.0:
            t = target if hh == target - t else t + hh
            y, drift = project(y_new, n)
            if drift > drift_bound:
                raise ConstraintDriftError(f"constraint drift {drift:.2e} at tau={t:.6g}")
            traj.states.append(_unpack(t, y, n, c, e, fwrap))
            traj.drifts.append(drift)
            k0 = f(t, y)
            if t == target:
                stops.pop(0)
        else:
            traj.rejected += 1
        factor = 5.0 if ratio == 0.0 else 0.9 * ratio ** -0.2
        h = hh * min(5.0, max(0.2, factor)) if np.isfinite(ratio) else hh * 0.2
        steps += 1
        if h < h_min or steps > max_steps:
            log.info("step collapse at tau=%.6g (h=%.2e)", t, h)
            raise StepCollapseError(f"step size collapsed at tau={t:.6g}", traj)
    log.debug("integrated %d steps, %d rejected, max drift %.2e", len(traj.states) - 1, traj.rejected,
              traj.max_drift)
    return traj


def runaway_rates(c: RenormalizationConstants, e: float) -> np.ndarray:
    """Exponents of small transverse deviations from uniform motion.

    Roots of ``(4/5) eps lam^3 - mu lam^2 + m = 0``.
    """
    eps = coupling(e)
    return np.roots([0.8 * eps, -c.mu, 0.0, c.m])


def fitted_rates(taus, series, order: int = 3) -> np.ndarray:
    """Complex exponents of ``series(tau) ~ sum_k c_k exp(lam_k tau)`` by linear prediction.

    ``taus`` must be evenly spaced; ``series`` is one- or two-dimensional
    (samples along the first axis).
    """
    taus = np.asarray(taus, dtype=float)
    x = np.asarray(series, dtype=float).reshape(taus.size, -1)
    dt = np.diff(taus)
    if np.max(np.abs(dt - dt[0])) > 1e-9 * dt[0]:
        raise ValueError("samples must be evenly spaced")
    x = x / np.max(np.abs(x), axis=0)
    rows = [np.column_stack([x[j:x.shape[0] - order + j, c] for j in range(order + 1)]) for c in range(x.shape[1])]
    H = np.vstack(rows)
    b, *_ = np.linalg.lstsq(H[:, :order], -H[:, order], rcond=None)
    roots = np.roots(np.concatenate([[1.0], b[::-1]]))
    return np.log(roots.astype(complex)) / dt[0]
