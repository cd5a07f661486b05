"""Stress-energy tensor of the retarded field, graded by retarded distance."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lw_field import TWO_PI, field_from_frame, field_pieces, radiative_vector
from .tensor6 import ETA, contract_first, full_contraction, minkowski_dot
from .worldline import KinematicState, RetardedFrame

SPHERE_AREA = 8.0 * math.pi**2 / 3.0
BOUND_GRADES = (5, 6, 7, 8)


def _bilinear(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``X^{m l} Y^n_l - 1/4 eta^{mn} X^{kl} Y_{kl}`` (not symmetrised)."""
    b = x @ ETA @ np.swapaxes(y, -1, -2)
    s = full_contraction(x, y)
    return b - 0.25 * np.asarray(s)[..., None, None] * ETA


def stress_energy_total(F) -> np.ndarray:
    """``T^{mn}`` of a contravariant field tensor, normalised by the 4-sphere area."""
    F = np.asarray(F, dtype=float)
    return _bilinear(F, F) / SPHERE_AREA


def trace(T) -> np.ndarray | float:
    return np.einsum("...ab,ab->...", T, ETA)


def stress_energy_prefactor(e: float) -> float:
    return (e / TWO_PI) ** 2 / SPHERE_AREA


def graded_coefficients(state: KinematicState, k, e: float) -> dict[int, np.ndarray]:
    """r-independent tensors ``C_kappa`` with ``T = sum_kappa C_kappa / r^kappa``.

    Built term by term from the three field pieces; kappa runs over 4..8 and
    ``C_4`` is the radiative part.
    """
    g = dict(zip((4, 3, 2), field_pieces(state, k)))
    pref = stress_energy_prefactor(e)
    out: dict[int, np.ndarray] = {}
    for i, gi in g.items():
        for j, gj in g.items():
            term = _bilinear(gi, gj)
            out[i + j] = out.get(i + j, 0.0) + term
    return {kappa: pref * c for kappa, c in sorted(out.items())}


@dataclass(frozen=True)
class StressEnergySplit:
    total: np.ndarray
    rad: np.ndarray
    bnd_by_power: dict[int, np.ndarray]

    @property
    def bound(self) -> np.ndarray:
        return sum(self.bnd_by_power.values())

    def reconstruction_error(self) -> float:
        scale = max(float(np.max(np.abs(self.total))), 1e-300)
        return float(np.max(np.abs(self.rad + self.bound - self.total))) / scale

    def norm(self) -> float:
        return max(float(np.max(np.abs(t))) for t in (self.total, self.rad, *self.bnd_by_power.values()))


def stress_energy_split(frame: RetardedFrame, e: float) -> StressEnergySplit:
    coeffs = graded_coefficients(frame.state, frame.k, e)
    r = frame.r
    return StressEnergySplit(
        total=stress_energy_total(field_from_frame(frame, e)),
        rad=coeffs[4] / r**4,
        bnd_by_power={kappa: coeffs[kappa] / r**kappa for kappa in BOUND_GRADES},
    )


def radiative_closed_form(frame: RetardedFrame, e: float) -> np.ndarray:
    """``(e^2/4pi^2) k k W.W / r^4`` divided by the sphere area."""
    w = radiative_vector(frame.state, frame.k)
    scale = e**2 / (4.0 * math.pi**2) * float(minkowski_dot(w, w)) / frame.r**4
    return scale * np.outer(frame.k, frame.k) / SPHERE_AREA


def null_contraction_check(split: StressEnergySplit, k) -> tuple[float, float]:
    """Max-norms of ``k_a T_rad^{ab}`` and ``k_a T_(-5)^{ab}``."""
    return (
        float(np.max(np.abs(contract_first(k, split.rad)))),
        float(np.max(np.abs(contract_first(k, split.bnd_by_power[5])))),
    )
