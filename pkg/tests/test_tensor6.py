import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lw6.tensor6 import (ETA, LorentzMap, NonFiniteError, NotTimelikeError, apply_lorentz, apply_lorentz2,
                         as_vector, boost_matrix, contract_first, full_contraction, is_antisymmetric, lower,
                         mclf_boost, minkowski_dot, projector, wedge)

finite = st.floats(-10.0, 10.0, allow_nan=False)
vectors = arrays(float, 6, elements=finite)
spatial = arrays(float, 5, elements=st.floats(-3.0, 3.0, allow_nan=False))


def unit_velocity(v):
    return np.concatenate([[np.sqrt(1.0 + v @ v)], v])


def test_metric_signature():
    assert minkowski_dot([1, 0, 0, 0, 0, 0], [1, 0, 0, 0, 0, 0]) == -1.0
    assert minkowski_dot([0, 0, 0, 0, 0, 1], [0, 0, 0, 0, 0, 1]) == 1.0
    np.testing.assert_array_equal(lower(np.arange(6.0)), ETA @ np.arange(6.0))


def test_as_vector_rejects_bad_input():
    with pytest.raises(ValueError):
        as_vector([1.0, 2.0])
    with pytest.raises(NonFiniteError):
        as_vector([0, 0, np.nan, 0, 0, 0])


def test_mclf_boost_rejects_non_timelike():
    with pytest.raises(NotTimelikeError):
        mclf_boost([1.0, 1.0, 0, 0, 0, 0])
    with pytest.raises(NotTimelikeError):
        mclf_boost([-1.0, 0, 0, 0, 0, 0])


@given(vectors, vectors)
def test_wedge_is_antisymmetric(a, b):
    w = wedge(a, b)
    assert is_antisymmetric(w)
    np.testing.assert_array_equal(w, -wedge(b, a))


@given(spatial)
def test_boost_is_lorentz_and_maps_rest_to_u(v):
    u = unit_velocity(v)
    lam = boost_matrix(u)
    assert LorentzMap(lam).metric_defect() <= 1e-11 * max(1.0, u[0] ** 2)
    np.testing.assert_allclose(lam[:, 0], u, rtol=1e-14)


@given(spatial, vectors, vectors)
def test_boost_preserves_products(v, a, b):
    to_rest = mclf_boost(unit_velocity(v))
    scale = max(1.0, unit_velocity(v)[0] ** 2) * (1.0 + np.abs(a).max() * np.abs(b).max())
    got = minkowski_dot(apply_lorentz(to_rest, a), apply_lorentz(to_rest, b))
    assert abs(got - minkowski_dot(a, b)) <= 1e-11 * scale


@settings(max_examples=50)
@given(spatial)
def test_mclf_round_trip(v):
    u = unit_velocity(v)
    to_rest = mclf_boost(u)
    np.testing.assert_allclose(apply_lorentz(to_rest, u), [1, 0, 0, 0, 0, 0], atol=1e-10 * u[0] ** 2)
    back = apply_lorentz(to_rest.inverse(), apply_lorentz(to_rest, u))
    np.testing.assert_allclose(back, u, rtol=1e-10, atol=1e-10)


@given(spatial, vectors, vectors)
def test_tensor_transform_matches_vector_transform(v, a, b):
    lmap = mclf_boost(unit_velocity(v))
    got = apply_lorentz2(lmap, wedge(a, b))
    want = wedge(apply_lorentz(lmap, a), apply_lorentz(lmap, b))
    np.testing.assert_allclose(got, want, atol=1e-9 * (1 + np.abs(want).max()))


def test_contractions():
    u = np.array([1.0, 0, 0, 0, 0, 0])
    n = np.array([0, 1.0, 0, 0, 0, 0])
    np.testing.assert_array_equal(contract_first(u, wedge(u, n)), -n)
    # -1/2 (u^n).(u^n) = 1 for a unit spatial n orthogonal to u
    assert -0.5 * full_contraction(wedge(u, n), wedge(u, n)) == 1.0
    np.testing.assert_array_equal(projector(u), np.diag([0.0, 1, 1, 1, 1, 1]))
