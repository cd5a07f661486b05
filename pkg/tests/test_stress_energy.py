import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lw6.checks import random_field_points, stress_suite
from lw6.lw_field import field_from_frame
from lw6.stress_energy import (BOUND_GRADES, SPHERE_AREA, null_contraction_check, radiative_closed_form,
                               stress_energy_split, stress_energy_total, trace)
from lw6.tensor6 import contract_first, wedge
from lw6.worldline import builtin_worldline, frame_from_state, retarded_frame

HELIX = builtin_worldline("helical", radius=1.0, beta=0.5, drift=0.3)


def test_zero_field():
    assert not np.any(stress_energy_total(np.zeros((6, 6))))


@given(arrays(float, (6, 6), elements=st.floats(-5, 5, allow_nan=False)))
def test_symmetric_for_any_antisymmetric_field(m):
    F = m - m.T
    T = stress_energy_total(F)
    np.testing.assert_array_equal(T, T.T)


def test_trace_of_field_invariant():
    # 6D trace is -(1/2) F.F / area: nonzero, unlike four dimensions
    u, n = np.eye(6)[0], np.eye(6)[1]
    F = wedge(u, n)
    assert abs(trace(stress_energy_total(F)) - 1.0 / SPHERE_AREA) <= 1e-15


def test_static_charge():
    w = builtin_worldline("uniform")
    fr = retarded_frame(w, [3.0, 1.0, 1.0, 0, 0, 1.0])
    sp = stress_energy_split(fr, 1.0)
    assert not np.any(sp.rad)
    for kappa in (5, 6, 7):
        assert not np.any(sp.bnd_by_power[kappa])
    assert sp.bnd_by_power[8][0, 0] > 0.0
    near = sp.total[0, 0]
    far = stress_energy_split(frame_from_state(fr.state, fr.state.z + 2 * fr.r * fr.k), 1.0).total[0, 0]
    assert abs(near / far - 2.0**8) <= 1e-10
    assert null_contraction_check(sp, fr.k) == (0.0, 0.0)


def test_radiative_closed_form_matches_grading():
    for y in random_field_points(HELIX, 10, seed=4):
        fr = retarded_frame(HELIX, y)
        sp = stress_energy_split(fr, 1.3)
        np.testing.assert_allclose(sp.rad, radiative_closed_form(fr, 1.3), atol=1e-14 * sp.norm())


def test_negative_control_with_velocity():
    fr = retarded_frame(HELIX, random_field_points(HELIX, 1, seed=8)[0])
    sp = stress_energy_split(fr, 1.0)
    assert np.max(np.abs(contract_first(fr.state.u, sp.rad))) > 1e-3 * np.max(np.abs(sp.rad))
    assert np.max(np.abs(contract_first(fr.state.u, sp.bnd_by_power[5]))) > 1e-3 * np.max(np.abs(sp.bnd_by_power[5]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.floats(0.2, 4.0))
def test_grades_rescale(seed, factor):
    fr = retarded_frame(HELIX, random_field_points(HELIX, 1, seed)[0])
    near = stress_energy_split(fr, 1.0)
    far = stress_energy_split(frame_from_state(fr.state, fr.state.z + factor * fr.r * fr.k), 1.0)
    np.testing.assert_allclose(far.rad, near.rad / factor**4, rtol=1e-10, atol=1e-14 * near.norm())
    for kappa in BOUND_GRADES:
        np.testing.assert_allclose(far.bnd_by_power[kappa], near.bnd_by_power[kappa] / factor**kappa,
                                   rtol=1e-10, atol=1e-14 * near.norm())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_reconstruction_and_null_contractions(seed):
    fr = retarded_frame(HELIX, random_field_points(HELIX, 1, seed)[0])
    sp = stress_energy_split(fr, 1.0)
    assert sp.reconstruction_error() <= 1e-12
    nr, n5 = null_contraction_check(sp, fr.k)
    assert nr <= 1e-11 * sp.norm() and n5 <= 1e-11 * sp.norm()
    np.testing.assert_allclose(stress_energy_total(field_from_frame(fr, 1.0)), sp.total)


@pytest.mark.parametrize("w", [builtin_worldline("hyperbolic", g=1.0), builtin_worldline("circular", radius=0.8, beta=0.7)])
def test_stress_suite(w):
    checks = stress_suite(w, 1.0, n_samples=30)
    assert all(c.passed for c in checks), checks


def test_sphere_area():
    assert abs(SPHERE_AREA - 8 * math.pi**2 / 3) == 0.0
