"""Product quadrature on the unit 4-sphere.

Each polar angle is integrated with a Gauss-Jacobi rule in ``x = cos(theta)``
whose weight ``(1 - x^2)^((m-1)/2)`` absorbs the ``sin^m`` factor of the
solid-angle element (Legendre for theta1, Chebyshev-U for theta2,
Jacobi(1, 1) for theta3); the azimuth uses the periodic trapezoid rule.
Integrands polynomial in the direction are then integrated exactly once the
node counts exceed half their degree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi

from .tensor6 import ETA, boost_matrix
from .worldline import unit_direction

SPHERE_AREA = 8.0 * math.pi**2 / 3.0


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class SphereQuadrature:
    n_theta: tuple[int, int, int] = (6, 6, 6)
    n_phi: int = 12
    angles: np.ndarray = field(init=False, repr=False)
    directions: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if min(self.n_theta) < 1 or self.n_phi < 1:
            raise QuadratureError("node counts must be positive")
        rules = [roots_jacobi(n, 0.5 * m, 0.5 * m) for n, m in zip(self.n_theta, (0, 1, 2))]
        phi = 2.0 * math.pi * np.arange(self.n_phi) / self.n_phi
        wphi = np.full(self.n_phi, 2.0 * math.pi / self.n_phi)
        xs = np.meshgrid(rules[0][0], rules[1][0], rules[2][0], phi, indexing="ij")
        ws = np.einsum("i,j,k,l->ijkl", rules[0][1], rules[1][1], rules[2][1], wphi)
        angles = np.stack([np.arccos(xs[0]), np.arccos(xs[1]), np.arccos(xs[2]), xs[3]], axis=-1)
        angles = angles.reshape(-1, 4)
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "directions", unit_direction(angles))
        object.__setattr__(self, "weights", ws.ravel())

    @classmethod
    def uniform(cls, n: int) -> "SphereQuadrature":
        return cls((n, n, n), n)

    @property
    def size(self) -> int:
        return self.weights.size

    def total_weight(self) -> float:
        return float(math.fsum(self.weights))

    def sin_density(self) -> np.ndarray:
        """``sin(t1) sin(t2)^2 sin(t3)^3`` at the nodes."""
        s = np.sin(self.angles[:, :3])
        return s[:, 0] * s[:, 1] ** 2 * s[:, 2] ** 3

    def null_vectors(self, u) -> np.ndarray:
        """Lab-frame ``k = Lambda(u) (1, n')`` at every node."""
        kp = np.concatenate([np.ones((self.size, 1)), self.directions], axis=1)
        return kp @ boost_matrix(u).T


def sphere_moments(q: SphereQuadrature, u) -> dict[int, np.ndarray]:
    """Numerical moments ``int dOmega n^a n^b ...`` of ``n = k - u`` up to order 4."""
    u = np.asarray(u, dtype=float)
    n = q.null_vectors(u) - u
    w = q.weights
    pairs = (n[:, :, None] * n[:, None, :]).reshape(q.size, 36)
    wp = pairs * w[:, None]
    return {
        0: np.array(q.total_weight()),
        1: w @ n,
        2: (wp.sum(axis=0)).reshape(6, 6),
        3: (wp.T @ n).reshape(6, 6, 6),
        4: (wp.T @ pairs).reshape(6, 6, 6, 6),
    }


def sphere_moments_closed(u) -> dict[int, np.ndarray]:
    """Closed-form angular moments for the unit velocity ``u``."""
    p = ETA + np.outer(u, u)
    four = (np.einsum("ab,cd->abcd", p, p) + np.einsum("ac,bd->abcd", p, p)
            + np.einsum("ad,bc->abcd", p, p))
    return {
        0: np.array(SPHERE_AREA),
        1: np.zeros(6),
        2: 8.0 * math.pi**2 / 15.0 * p,
        3: np.zeros((6, 6, 6)),
        4: 8.0 * math.pi**2 / 105.0 * four,
    }


def moment_errors(q: SphereQuadrature, u) -> dict[int, float]:
    """Max abs error of each numerical moment, relative to the zeroth moment scale."""
    num = sphere_moments(q, u)
    ref = sphere_moments_closed(u)
    out = {}
    for order in num:
        scale = max(float(np.max(np.abs(ref[order]))), SPHERE_AREA if order % 2 else 0.0)
        out[order] = float(np.max(np.abs(num[order] - ref[order]))) / scale
    return out
