"""Minkowski algebra in six dimensions.

Vectors are plain ``numpy`` arrays of shape ``(..., 6)`` with index 0 the
time component; rank-2 tensors are ``(..., 6, 6)`` arrays. Everything is
stored contravariant; :func:`lower` applies the metric when a covariant
form is needed. The metric is mostly plus, ``diag(-1, 1, 1, 1, 1, 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DIM = 6
ETA = np.diag([-1.0, 1.0, 1.0, 1.0, 1.0, 1.0])
ETA.setflags(write=False)
_SIGN = np.array([-1.0, 1.0, 1.0, 1.0, 1.0, 1.0])


class NonFiniteError(ValueError):
    pass


class NotTimelikeError(ValueError):
    pass


def as_vector(v) -> np.ndarray:
    """Validate and return a float array whose last axis has length 6."""
    arr = np.asarray(v, dtype=float)
    if arr.shape[-1:] != (DIM,):
        raise ValueError(f"expected last axis of length 6, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("non-finite component in six-vector")
    return arr


def lower(v: np.ndarray) -> np.ndarray:
    """Lower the (last) index of a vector."""
    return v * _SIGN


def minkowski_dot(a, b) -> np.ndarray | float:
    """Return ``-a0 b0 + sum_i ai bi``, broadcasting over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.sum(a * b * _SIGN, axis=-1)


def wedge(a, b) -> np.ndarray:
    """Antisymmetric tensor ``a^mu b^nu - a^nu b^mu``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    outer = a[..., :, None] * b[..., None, :]
    return outer - np.swapaxes(outer, -1, -2)


def contract_first(v, t) -> np.ndarray:
    """``v_mu T^{mu nu}`` with ``v`` given contravariant."""
    return np.einsum("...m,...mn->...n", lower(np.asarray(v, dtype=float)), t)


def full_contraction(s, t) -> np.ndarray | float:
    """``S_{ab} T^{ab}`` for two contravariant rank-2 tensors."""
    return np.einsum("...ab,a,b,...ab->...", s, _SIGN, _SIGN, t)


def is_antisymmetric(t, atol: float = 0.0) -> bool:
    return bool(np.all(np.abs(t + np.swapaxes(t, -1, -2)) <= atol))


def boost_matrix(u) -> np.ndarray:
    """Pure boost sending ``(1, 0, ..., 0)`` to the unit timelike vector ``u``."""
    u = np.asarray(u, dtype=float)
    gamma = u[0]
    v = u[1:]
    lam = np.eye(DIM)
    lam[0, 0] = gamma
    lam[0, 1:] = v
    lam[1:, 0] = v
    lam[1:, 1:] += np.outer(v, v) / (1.0 + gamma)
    return lam


@dataclass(frozen=True)
class LorentzMap:
    """A Lorentz matrix together with the direction it maps in.

    ``direction`` is ``"to_mclf"`` (lab components -> comoving components) or
    ``"to_lab"``.
    """

    matrix: np.ndarray
    direction: str = "to_mclf"

    def inverse(self) -> "LorentzMap":
        # Lambda^{-1} = eta Lambda^T eta for any Lorentz matrix
        inv = ETA @ self.matrix.T @ ETA
        other = "to_lab" if self.direction == "to_mclf" else "to_mclf"
        return LorentzMap(inv, other)

    def metric_defect(self) -> float:
        """Max entry of ``|Lambda^T eta Lambda - eta|``."""
        return float(np.max(np.abs(self.matrix.T @ ETA @ self.matrix - ETA)))


def mclf_boost(u, tol: float = 1e-9) -> LorentzMap:
    """Boost to the momentarily comoving frame of the unit velocity ``u``.

    Raises :class:`NotTimelikeError` unless ``u.u = -1`` within ``tol`` and
    ``u0 > 0``.
    """
    u = as_vector(u)
    norm = minkowski_dot(u, u)
    if abs(norm + 1.0) > tol or u[0] <= 0.0:
        raise NotTimelikeError(f"velocity is not future unit timelike (u.u={norm:.3e}, u0={u[0]:.3e})")
    return LorentzMap(ETA @ boost_matrix(u).T @ ETA, "to_mclf")


def apply_lorentz(lmap: LorentzMap, v) -> np.ndarray:
    """Transform a vector (or a stack of vectors)."""
    return np.asarray(v, dtype=float) @ lmap.matrix.T


def apply_lorentz2(lmap: LorentzMap, t) -> np.ndarray:
    """Transform a contravariant rank-2 tensor, one matrix per slot."""
    lam = lmap.matrix
    return np.einsum("am,...mn,bn->...ab", lam, np.asarray(t, dtype=float), lam)


def projector(u) -> np.ndarray:
    """``eta^{ab} + u^a u^b``: projection orthogonal to a unit timelike ``u``."""
    u = np.asarray(u, dtype=float)
    return ETA + np.outer(u, u)
