"""Retarded potential and field strength of a point charge in six dimensions.

The overall factor ``e / 2 pi`` is kept explicit everywhere.  The field is
assembled from three pieces graded by the retarded distance:

    F = (e / 2 pi) (G4 / r^4 + G3 / r^3 + G2 / r^2)

with ``G4 = 3 u^k``, ``G3 = u^a + 3 (a + 2 u a_k)^k`` and ``G2 = W^k``,
``W = adot + u adot_k + 3 a a_k + 3 u a_k^2``.  All worldline quantities are
taken at the retarded time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tensor6 import ETA, as_vector, minkowski_dot, wedge
from .worldline import KinematicState, RetardedFrame, Worldline, retarded_frame

TWO_PI = 2.0 * math.pi


class StepError(ValueError):
    pass


@dataclass(frozen=True)
class FieldSample:
    y: np.ndarray
    A: np.ndarray
    F: np.ndarray
    frame: RetardedFrame
    e: float


def radiative_vector(state: KinematicState, k) -> np.ndarray:
    """``W``: the r^-2 coefficient of V; orthogonal to ``k``."""
    k = np.asarray(k, dtype=float)
    ak = minkowski_dot(state.a, k)[..., None]
    adk = minkowski_dot(state.adot, k)[..., None]
    return state.adot + state.u * adk + 3.0 * state.a * ak + 3.0 * state.u * ak**2


def field_pieces(state: KinematicState, k) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(G4, G3, G2)`` for one or many null vectors ``k``."""
    k = np.asarray(k, dtype=float)
    ak = minkowski_dot(state.a, k)[..., None]
    u = np.broadcast_to(state.u, k.shape)
    g4 = 3.0 * wedge(u, k)
    g3 = wedge(state.u, state.a) + wedge(3.0 * (state.a + 2.0 * state.u * ak), k)
    g2 = wedge(radiative_vector(state, k), k)
    return g4, g3, g2


def field_at(state: KinematicState, k, r, e: float) -> np.ndarray:
    """Field strength at ``z + r k`` (vectorised over ``k`` and ``r``)."""
    g4, g3, g2 = field_pieces(state, k)
    r = np.asarray(r, dtype=float)[..., None, None]
    return (e / TWO_PI) * (g4 / r**4 + g3 / r**3 + g2 / r**2)


def potential_at(state: KinematicState, k, r, e: float) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    r = np.asarray(r, dtype=float)[..., None]
    ak = minkowski_dot(state.a, k)[..., None]
    return (e / TWO_PI) * (state.a / r**2 + state.u * (1.0 + r * ak) / r**3)


def potential_from_frame(frame: RetardedFrame, e: float) -> np.ndarray:
    return potential_at(frame.state, frame.k, frame.r, e)


def field_from_frame(frame: RetardedFrame, e: float) -> np.ndarray:
    return field_at(frame.state, frame.k, frame.r, e)


def potential(w: Worldline, e: float, y) -> np.ndarray:
    """Contravariant retarded potential ``A`` at ``y``."""
    return potential_from_frame(retarded_frame(w, y), e)


def field_strength(w: Worldline, e: float, y) -> np.ndarray:
    """Contravariant field tensor ``F^{mu nu}`` at ``y``."""
    return field_from_frame(retarded_frame(w, y), e)


def sample(w: Worldline, e: float, y) -> FieldSample:
    fr = retarded_frame(w, y)
    return FieldSample(as_vector(y), potential_from_frame(fr, e), field_from_frame(fr, e), fr, e)


# --- finite-difference oracles ----------------------------------------------

_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_OFFSETS = np.arange(-2, 3)


def default_step(w: Worldline, y) -> float:
    """``r / 200`` shrunk by the local curvature radius when ``|a| > 1``."""
    fr = retarded_frame(w, y)
    amag = math.sqrt(max(fr.state.a2, 0.0))
    return fr.r / 200.0 * min(1.0, 1.0 / amag if amag > 0 else 1.0)


def _stencil_potentials(w: Worldline, e: float, y, h: float) -> np.ndarray:
    """Potential on the 5-point stencil along each axis: shape ``(6, 5, 6)``."""
    y = as_vector(y)
    r = retarded_frame(w, y).r
    if h <= 0.0 or r <= 10.0 * h:
        raise StepError(f"step h={h:.3e} too large for retarded distance r={r:.3e}")
    out = np.empty((6, 5, 6))
    for axis in range(6):
        for j, off in enumerate(_OFFSETS):
            pt = y.copy()
            pt[axis] += off * h
            out[axis, j] = potential(w, e, pt)
    return out


def potential_gradient(w: Worldline, e: float, y, h: float) -> np.ndarray:
    """``D[alpha, beta] = d_alpha A^beta`` by 4th-order central differences."""
    stencil = _stencil_potentials(w, e, y, h)
    return np.einsum("j,ajb->ab", _D1, stencil) / h


def field_fd_oracle(w: Worldline, e: float, y, h: float) -> np.ndarray:
    """``F_{ab} = d_a A_b - d_b A_a`` from 4th-order differences, returned contravariant."""
    grad = potential_gradient(w, e, y, h) @ ETA  # d_a A_b
    f_low = grad - grad.T
    return ETA @ f_low @ ETA


def gauge_residual(w: Worldline, e: float, y, h: float) -> float:
    """Numerical divergence ``d_a A^a``; zero in the Lorenz gauge."""
    return float(np.trace(potential_gradient(w, e, y, h)))


def wave_residual(w: Worldline, e: float, y, h: float) -> np.ndarray:
    """Numerical ``box A`` (4th-order); vanishes off the worldline."""
    stencil = _stencil_potentials(w, e, y, h)
    second = np.einsum("j,ajb->ab", _D2, stencil) / h**2
    return ETA.diagonal() @ second
