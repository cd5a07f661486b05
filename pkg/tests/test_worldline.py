import math

import numpy as np
import pytest
from conftest import ramp_position, ramp_velocity
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import bisect

from lw6.worldline import (DomainError, KinematicError, NumericWorldline, RetardedTimeError, builtin_worldline,
                           hyperplane_point, light_cone_residual, null_vector, retarded_frame, sphere_point)
from lw6.tensor6 import minkowski_dot

angles = st.tuples(st.floats(0.05, math.pi - 0.05), st.floats(0.05, math.pi - 0.05),
                   st.floats(0.05, math.pi - 0.05), st.floats(0.0, 2 * math.pi - 0.01))
KINDS = [("uniform", {"velocity": (0.3, -0.2, 0.1, 0.0, 0.4)}), ("hyperbolic", {"g": 0.7}),
         ("circular", {"radius": 1.0, "beta": 0.6}), ("helical", {"radius": 0.8, "beta": 0.5, "drift": 0.4})]


@pytest.mark.parametrize("kind,params", KINDS)
def test_kinematic_chain_builtin(kind, params):
    w = builtin_worldline(kind, **params)
    rng = np.random.default_rng(3)
    for tau in rng.uniform(-3.0, 3.0, 100):
        assert np.max(np.abs(w.state(tau).chain_residuals())) <= 1e-12


@pytest.mark.parametrize("kind,params", [("uniform", {"velocity": (1.0, 0, 0, 0, 0)}), ("hyperbolic", {"g": -1.0}),
                                         ("circular", {"radius": 1.0, "beta": 1.0}), ("spiral", {})])
def test_unphysical_parameters(kind, params):
    with pytest.raises(ValueError):
        builtin_worldline(kind, **params)


def test_invariants_of_builtins():
    w = builtin_worldline("uniform", velocity=(0.3, 0, 0, 0, 0))
    s = w.state(1.3)
    assert s.a2 == 0.0 and s.adot2 == 0.0
    hyp = builtin_worldline("hyperbolic", g=1.7)
    for tau in (-1.0, 0.0, 2.0):
        assert abs(hyp.state(tau).a2 - 1.7**2) <= 1e-12
    hel = builtin_worldline("helical", radius=0.8, beta=0.5, drift=0.4)
    ref = hel.state(0.0)
    for tau in (0.7, 3.1):
        s = hel.state(tau)
        assert abs(s.a2 - ref.a2) <= 1e-14 and abs(s.adot2 - ref.adot2) <= 1e-14


def test_static_retarded_time():
    w = builtin_worldline("uniform")
    fr = retarded_frame(w, [5.0, 3.0, 0, 0, 0, 0])
    assert abs(fr.tau - 2.0) <= 1e-12 and abs(fr.r - 3.0) <= 1e-12
    np.testing.assert_allclose(fr.k, [1, 1, 0, 0, 0, 0], atol=1e-12)


def test_hyperbolic_on_axis_matches_bisection():
    w = builtin_worldline("hyperbolic", g=1.0)
    y = np.array([2.0, 1.5, 0, 0, 0, 0])
    oracle = bisect(lambda t: light_cone_residual(w, y, t), -5.0, math.asinh(2.0), xtol=1e-15)
    assert abs(retarded_frame(w, y).tau - oracle) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(angles, st.floats(0.05, 5.0), st.floats(-2.0, 2.0))
def test_sphere_point_round_trip(ang, r, tau):
    w = builtin_worldline("helical", radius=0.8, beta=0.5, drift=0.4)
    s = w.state(tau)
    fr = retarded_frame(w, sphere_point(s, r, ang))
    assert abs(fr.tau - tau) <= 1e-10 and abs(fr.r - r) <= 1e-10 * max(1.0, r)
    got = fr.angles()
    np.testing.assert_allclose(got[:3], ang[:3], atol=1e-8)
    assert abs(math.remainder(got[3] - ang[3], 2 * math.pi)) <= 1e-8


@given(angles, st.floats(-2.0, 2.0))
def test_null_vector_geometry(ang, tau):
    s = builtin_worldline("hyperbolic", g=1.0).state(tau)
    k = null_vector(s, ang)
    n = k - s.u
    assert abs(minkowski_dot(k, k)) <= 1e-12 * k[0] ** 2
    assert abs(minkowski_dot(n, n) - 1.0) <= 1e-12 * k[0] ** 2
    assert abs(minkowski_dot(n, s.u)) <= 1e-12 * k[0] ** 2
    assert abs(minkowski_dot(k, s.u) + 1.0) <= 1e-12 * k[0] ** 2


def test_rest_sphere_point_axis():
    s = builtin_worldline("uniform").state(0.0)
    y = sphere_point(s, 2.0, (0.3, 1.1, 0.0, 0.4))
    np.testing.assert_allclose(y, [2.0, 0, 0, 0, 0, 2.0], atol=1e-15)


def test_hyperplane_point():
    w = builtin_worldline("uniform")
    y = hyperplane_point(w, 3.0, 1.0, (0.4, 0.9, 1.3, 2.0))
    assert y[0] == 3.0 and abs(np.linalg.norm(y[1:]) - 2.0) <= 1e-14
    hel = builtin_worldline("helical", radius=0.8, beta=0.5, drift=0.4)
    ang = (0.4, 0.9, 1.3, 2.0)
    y = hyperplane_point(hel, 4.0, 1.0, ang)
    fr = retarded_frame(hel, y)
    s = hel.state(1.0)
    assert abs(fr.tau - 1.0) <= 1e-10
    assert abs(fr.r - (4.0 - s.z[0]) / null_vector(s, ang)[0]) <= 1e-10
    with pytest.raises(DomainError):
        hyperplane_point(hel, s.z[0], 1.0, ang)


def test_retarded_time_errors():
    w = builtin_worldline("hyperbolic", g=1.0)
    # behind the past horizon y0 + y1 <= 0 nothing on the worldline is visible
    with pytest.raises(RetardedTimeError):
        retarded_frame(w, [-3.0, 1.0, 0, 0, 0, 0])
    with pytest.raises(RetardedTimeError):
        retarded_frame(w, w.state(0.5).z)


def test_far_field_point_on_hyperbolic():
    w = builtin_worldline("hyperbolic", g=1.0)
    s = w.state(1.0)
    y = sphere_point(s, 2.0, (0.3, 0.2, 0.1, 0.0))
    fr = retarded_frame(w, y)
    assert abs(fr.tau - 1.0) <= 1e-10


def test_numeric_worldline_matches_closed_form(ramp):
    for tau in (0.0, 0.5, 1.5):
        s = ramp.state(tau)
        np.testing.assert_allclose(s.u, ramp_velocity(tau), atol=1e-10)
        assert abs(s.a2 - (2.0 + tau) ** -2) <= 1e-10
        assert abs(s.a2_dot + 2.0 * (2.0 + tau) ** -3) <= 1e-8


def test_numeric_worldline_chain_converges():
    w = NumericWorldline(ramp_position, step=0.2, check=False)
    coarse = w.chain_residual(0.5, 0.2)
    fine = w.chain_residual(0.5, 0.1)
    assert coarse / fine >= 2**5


def test_numeric_worldline_rejects_non_kinematic():
    w = NumericWorldline(lambda t: np.array([t, 2.0 * t, 0, 0, 0, 0]), step=0.1)
    with pytest.raises(KinematicError):
        w.state(0.0)


def test_domain_enforced(ramp):
    with pytest.raises(DomainError):
        ramp.state(6.0)
