"""Worldlines, kinematic states and the retarded-time problem.

A worldline is parametrised by proper time.  Each state carries position
and its first five derivatives: ``z, u, a, adot, addot, adddot``.  The
retarded frame of a field point ``y`` is the state whose future light cone
contains ``y``, together with the retarded distance ``r = -(y - z).u`` and
the null vector ``k = (y - z) / r``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .tensor6 import (
    LorentzMap,
    apply_lorentz,
    as_vector,
    boost_matrix,
    minkowski_dot,
)

KIN_TOL = 1e-8
R_MIN = 1e-9


class DomainError(ValueError):
    pass


class KinematicError(ValueError):
    """The differentiated normalisation chain is violated."""


class RetardedTimeError(RuntimeError):
    pass


@dataclass(frozen=True)
class KinematicState:
    tau: float
    z: np.ndarray
    u: np.ndarray
    a: np.ndarray
    adot: np.ndarray
    addot: np.ndarray
    adddot: np.ndarray

    @property
    def a2(self) -> float:
        return float(minkowski_dot(self.a, self.a))

    @property
    def a2_dot(self) -> float:
        """d(a.a)/dtau."""
        return 2.0 * float(minkowski_dot(self.a, self.adot))

    @property
    def a2_ddot(self) -> float:
        return 2.0 * float(minkowski_dot(self.adot, self.adot) + minkowski_dot(self.a, self.addot))

    @property
    def adot2(self) -> float:
        return float(minkowski_dot(self.adot, self.adot))

    def chain_residuals(self) -> np.ndarray:
        """``(u.u + 1, u.a, u.adot + a^2, u.addot + 3 a.adot)``."""
        d = minkowski_dot
        return np.array([
            d(self.u, self.u) + 1.0,
            d(self.u, self.a),
            d(self.u, self.adot) + self.a2,
            d(self.u, self.addot) + 3.0 * d(self.a, self.adot),
        ])

    def to_lab_boost(self) -> LorentzMap:
        return LorentzMap(boost_matrix(self.u), "to_lab")

    def transformed(self, lmap: LorentzMap, origin=None) -> "KinematicState":
        """The same state seen from another inertial frame (``y -> L(y - origin)``)."""
        shift = np.zeros(6) if origin is None else np.asarray(origin, dtype=float)
        return KinematicState(
            self.tau,
            apply_lorentz(lmap, self.z - shift),
            *(apply_lorentz(lmap, v) for v in (self.u, self.a, self.adot, self.addot, self.adddot)),
        )


class Worldline:
    """Base class; subclasses implement :meth:`_derivatives`."""

    domain: tuple[float, float] = (-math.inf, math.inf)

    def _derivatives(self, tau: float) -> tuple[np.ndarray, ...]:
        raise NotImplementedError

    def state(self, tau: float) -> KinematicState:
        lo, hi = self.domain
        if not lo <= tau <= hi:
            raise DomainError(f"tau={tau} outside worldline domain {self.domain}")
        return KinematicState(float(tau), *self._derivatives(float(tau)))

    def position(self, tau: float) -> np.ndarray:
        return self.state(tau).z

    def transformed(self, lmap: LorentzMap, origin=None) -> "Worldline":
        return TransformedWorldline(self, lmap, origin)


def kinematic_state(w: Worldline, tau: float) -> KinematicState:
    return w.state(tau)


class AnalyticWorldline(Worldline):
    """Worldline given by a function returning all six derivative vectors."""

    def __init__(self, kind: str, params: dict, derivatives: Callable[[float], tuple]):
        self.kind = kind
        self.params = dict(params)
        self._fn = derivatives

    def _derivatives(self, tau):
        return tuple(np.asarray(v, dtype=float) for v in self._fn(tau))

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in sorted(self.params.items()))
        return f"AnalyticWorldline({self.kind}: {args})"


class TransformedWorldline(Worldline):
    def __init__(self, base: Worldline, lmap: LorentzMap, origin=None):
        self.base = base
        self.lmap = lmap
        self.origin = np.zeros(6) if origin is None else as_vector(origin)
        self.domain = base.domain

    def _derivatives(self, tau):
        s = self.base.state(tau).transformed(self.lmap, self.origin)
        return s.z, s.u, s.a, s.adot, s.addot, s.adddot


def central_weights(order: int, half_width: int) -> np.ndarray:
    """Central finite-difference weights on ``-p..p`` for the given derivative order."""
    offsets = np.arange(-half_width, half_width + 1, dtype=float)
    n = offsets.size
    vander = np.vander(offsets, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(vander, rhs)


# 11-point stencils: accuracy order >= 6 up to the fifth derivative
_STENCIL_HALF = 5
_STENCILS = {m: central_weights(m, _STENCIL_HALF) for m in range(1, 6)}


class NumericWorldline(Worldline):
    """Worldline from a user position map ``tau -> z(tau)``.

    Derivatives come from 11-point central differences.  Unless ``step`` is
    given, the step is picked from a log grid by minimising the kinematic
    chain residual at ``probe_tau``.
    """

    def __init__(self, position: Callable[[float], np.ndarray], step: float | None = None,
                 domain=(-math.inf, math.inf), probe_tau: float | None = None,
                 check: bool = True, tol: float = KIN_TOL):
        self._z = position
        self.domain = tuple(domain)
        self.check = check
        self.tol = tol
        if step is None:
            if probe_tau is None:
                lo, hi = self.domain
                probe_tau = 0.0 if (lo <= 0.0 <= hi) else (lo + hi) / 2.0
            step = self.select_step(probe_tau)
        self.step = float(step)

    def derivatives_with_step(self, tau: float, h: float) -> tuple[np.ndarray, ...]:
        offsets = np.arange(-_STENCIL_HALF, _STENCIL_HALF + 1)
        samples = np.array([as_vector(self._z(tau + j * h)) for j in offsets])
        derivs = [samples[_STENCIL_HALF]]
        for m in range(1, 6):
            derivs.append(_STENCILS[m] @ samples / h**m)
        return tuple(derivs)

    def chain_residual(self, tau: float, h: float) -> float:
        s = KinematicState(tau, *self.derivatives_with_step(tau, h))
        return float(np.max(np.abs(s.chain_residuals())))

    def select_step(self, tau: float, grid=None) -> float:
        grid = np.logspace(-3.0, -0.5, 26) if grid is None else grid
        res = [self.chain_residual(tau, h) for h in grid]
        return float(grid[int(np.argmin(res))])

    def _derivatives(self, tau):
        derivs = self.derivatives_with_step(tau, self.step)
        if self.check:
            s = KinematicState(tau, *derivs)
            worst = float(np.max(np.abs(s.chain_residuals())))
            if worst > self.tol:
                raise KinematicError(
                    f"kinematic chain residual {worst:.3e} exceeds {self.tol:.1e} at tau={tau}")
        return derivs


# --- built-in trajectories -------------------------------------------------

def _uniform(velocity=(0.0, 0.0, 0.0, 0.0, 0.0), origin=(0.0,) * 6):
    v = np.asarray(velocity, dtype=float)
    if v.shape != (5,) or float(v @ v) >= 1.0:
        raise ValueError("uniform motion needs a 5-velocity with |v| < 1")
    gamma = 1.0 / math.sqrt(1.0 - float(v @ v))
    u = np.concatenate([[gamma], gamma * v])
    z0 = np.asarray(origin, dtype=float)
    zero = np.zeros(6)

    def derivs(tau):
        return z0 + u * tau, u, zero, zero, zero, zero

    return derivs


def _hyperbolic(g=1.0, axis=1):
    if g <= 0.0:
        raise ValueError("hyperbolic motion needs g > 0")
    if axis not in (1, 2, 3, 4, 5):
        raise ValueError("axis must be a spatial index 1..5")

    def derivs(tau):
        ch, sh = math.cosh(g * tau), math.sinh(g * tau)
        out = []
        for n in range(6):
            v = np.zeros(6)
            even = n % 2 == 0
            v[0] = g ** (n - 1) * (sh if even else ch)
            v[axis] = g ** (n - 1) * (ch if even else sh)
            out.append(v)
        return tuple(out)

    return derivs


def _helical(radius=1.0, beta=0.5, drift=0.0):
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    if beta <= 0.0 or beta**2 + drift**2 >= 1.0:
        raise ValueError("need 0 < beta and beta^2 + drift^2 < 1")
    gamma = 1.0 / math.sqrt(1.0 - beta**2 - drift**2)
    omega = beta * gamma / radius  # angular rate per unit proper time

    def derivs(tau):
        ph = omega * tau
        out = []
        for n in range(6):
            v = np.zeros(6)
            c = math.cos(ph + n * math.pi / 2.0)
            s = math.sin(ph + n * math.pi / 2.0)
            v[1] = radius * omega**n * c
            v[2] = radius * omega**n * s
            out.append(v)
        out[0][0] = gamma * tau
        out[0][3] = drift * gamma * tau
        out[1][0] = gamma
        out[1][3] = drift * gamma
        return tuple(out)

    return derivs


BUILTIN_KINDS = ("uniform", "hyperbolic", "circular", "helical")


def builtin_worldline(kind: str, **params) -> AnalyticWorldline:
    """Analytic test trajectory.

    ``uniform``: ``velocity`` (5 spatial components), ``origin``;
    ``hyperbolic``: ``g``, ``axis``; ``circular``: ``radius``, ``beta``;
    ``helical``: ``radius``, ``beta``, ``drift`` (velocity along axis 3).
    """
    if kind == "uniform":
        fn = _uniform(**params)
    elif kind == "hyperbolic":
        fn = _hyperbolic(**params)
    elif kind == "circular":
        fn = _helical(drift=0.0, **params)
    elif kind == "helical":
        fn = _helical(**params)
    else:
        raise ValueError(f"unknown trajectory kind {kind!r}; expected one of {BUILTIN_KINDS}")
    return AnalyticWorldline(kind, params, fn)


# --- angles and null directions ---------------------------------------------

def unit_direction(angles) -> np.ndarray:
    """Spatial unit vector(s) on S^4 for angles ``(theta1, theta2, theta3, phi)``."""
    th1, th2, th3, ph = np.moveaxis(np.asarray(angles, dtype=float), -1, 0)
    s1, s2, s3 = np.sin(th1), np.sin(th2), np.sin(th3)
    return np.stack([
        s3 * s2 * s1 * np.cos(ph),
        s3 * s2 * s1 * np.sin(ph),
        s3 * s2 * np.cos(th1),
        s3 * np.cos(th2),
        np.cos(th3),
    ], axis=-1)


def direction_angles(n) -> np.ndarray:
    """Inverse of :func:`unit_direction` (away from the chart's poles)."""
    n = np.asarray(n, dtype=float)
    th3 = math.atan2(math.hypot(*n[:4]), n[4])
    th2 = math.atan2(math.hypot(*n[:3]), n[3])
    th1 = math.atan2(math.hypot(n[0], n[1]), n[2])
    ph = math.atan2(n[1], n[0]) % (2.0 * math.pi)
    return np.array([th1, th2, th3, ph])


def null_vector(state: KinematicState, angles) -> np.ndarray:
    """``k = Lambda (1, n')``: the lab-frame null vector for comoving angles."""
    n = unit_direction(angles)
    kp = np.concatenate([np.ones(n.shape[:-1] + (1,)), n], axis=-1)
    return kp @ boost_matrix(state.u).T


def sphere_point(state: KinematicState, r: float, angles) -> np.ndarray:
    """Field point ``z + r k`` on the retarded sphere of radius ``r``."""
    if r <= 0.0:
        raise ValueError("retarded distance must be positive")
    return state.z + r * null_vector(state, angles)


def hyperplane_point(w: Worldline, t: float, tau: float, angles) -> np.ndarray:
    """Point of the hyperplane ``y0 = t`` on the light cone of ``z(tau)``.

    The retarded distance is ``(t - z0(tau)) / k0``; with a worldline
    parametrised by coordinate time this is ``(t - u) / k0``.
    """
    s = w.state(tau)
    lead = t - s.z[0]
    if lead <= 0.0:
        raise DomainError("hyperplane point needs the emission event before t")
    k = null_vector(s, angles)
    return s.z + (lead / k[..., 0])[..., None] * k


# --- retarded time ------------------------------------------------------------

@dataclass(frozen=True)
class RetardedFrame:
    tau: float
    r: float
    k: np.ndarray
    state: KinematicState = field(repr=False)

    @cached_property
    def n(self) -> np.ndarray:
        return self.k - self.state.u

    @property
    def a_k(self) -> float:
        return float(minkowski_dot(self.state.a, self.k))

    @property
    def y(self) -> np.ndarray:
        return self.state.z + self.r * self.k

    def angles(self) -> np.ndarray:
        lam = self.state.to_lab_boost().inverse()
        kp = apply_lorentz(lam, self.k)
        return direction_angles(kp[1:] / kp[0])


def light_cone_residual(w: Worldline, y, tau: float) -> float:
    """``(y0 - z0) - |y - z|``: positive inside the future cone of ``z(tau)``."""
    z = w.position(tau)
    d = np.asarray(y) - z
    return float(d[0] - np.linalg.norm(d[1:]))


def frame_from_state(state: KinematicState, y) -> RetardedFrame:
    d = np.asarray(y, dtype=float) - state.z
    r = -float(minkowski_dot(d, state.u))
    return RetardedFrame(state.tau, r, d / r, state)


def retarded_frame(w: Worldline, y, tol: float = 1e-12, max_expand: int = 200) -> RetardedFrame:
    """Solve the light-cone condition for the retarded proper time of ``y``.

    Brackets by marching back from ``tau = y0`` with growing steps, then runs
    Brent's method and polishes with Newton steps.
    """
    y = as_vector(y)
    lo_dom, hi_dom = w.domain

    def g(tau):
        try:
            return light_cone_residual(w, y, tau)
        except OverflowError:
            raise RetardedTimeError(f"worldline overflows at tau={tau:.3g} before the light cone is bracketed") from None

    hi = min(float(y[0]), hi_dom)
    g_hi = g(hi)
    step = 1.0
    for _ in range(max_expand):
        if g_hi < 0.0:
            break
        hi = min(hi + step, hi_dom)
        g_hi = g(hi)
        step *= 2.0
        if hi == hi_dom and g_hi >= 0.0:
            raise RetardedTimeError("field point lies on or inside the worldline's causal future boundary")
    else:
        raise RetardedTimeError("failed to bracket the retarded time from above")
    lo = hi
    g_lo = g_hi
    # unit first step: |g_hi| can be huge when z0 grows fast (hyperbolic motion)
    step = 1.0
    for _ in range(max_expand):
        lo = lo - step
        if lo < lo_dom:
            lo = lo_dom
        g_lo = g(lo)
        if g_lo > 0.0:
            break
        if lo == lo_dom:
            raise RetardedTimeError("field point precedes the worldline's causal past in its domain")
        step *= 2.0
    else:
        raise RetardedTimeError("failed to bracket the retarded time from below")
    try:
        tau = brentq(g, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)
    except RuntimeError as exc:  # pragma: no cover
        raise RetardedTimeError(str(exc)) from exc
    for _ in range(3):
        s = w.state(tau)
        d = y - s.z
        dist = np.linalg.norm(d[1:])
        res = d[0] - dist
        if abs(res) <= tol * 1e-3 * (1.0 + dist):
            break
        deriv = -s.u[0] + float(d[1:] @ s.u[1:]) / dist
        nxt = tau - res / deriv
        if not lo <= nxt <= hi:
            break
        tau = nxt
    s = w.state(tau)
    frame = frame_from_state(s, y)
    if frame.r <= R_MIN:
        raise RetardedTimeError(f"field point too close to the worldline (r={frame.r:.2e})")
    if abs(light_cone_residual(w, y, tau)) > tol * (1.0 + frame.r):
        raise RetardedTimeError("retarded-time solve did not reach tolerance")
    return frame
