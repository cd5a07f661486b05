import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lw6 import flux as fx
from lw6.checks import flux_suite, sweep_checks
from lw6.kernels import available_backends
from lw6.quadrature import SphereQuadrature
from lw6.stress_energy import stress_energy_split
from lw6.tensor6 import lower, wedge
from lw6.worldline import builtin_worldline, retarded_frame, sphere_point

E = 1.0
EPS = E**2 / (4 * math.pi**2)
HYP = builtin_worldline("hyperbolic", g=1.0)
HELIX = builtin_worldline("helical", radius=1.0, beta=0.5, drift=0.3)
STATIC = builtin_worldline("uniform")


@pytest.fixture(scope="module")
def helix_tube():
    return fx.tube_flux_numeric(HELIX, E, 0.0, 1.5)


@pytest.mark.parametrize("tau", [-1.0, 0.0, 0.8, 2.0])
def test_hyperbolic_radiated_rate(tau):
    rate = fx.radiated_rate(HYP.state(tau), E)
    assert abs(rate[0] - 36.0 / 35.0 * EPS * math.cosh(tau)) <= 1e-15 * math.cosh(tau)
    assert abs(rate[1] - 36.0 / 35.0 * EPS * math.sinh(tau)) <= 1e-15 * math.cosh(tau)
    numeric = fx.tube_rate(HYP.state(tau), E, SphereQuadrature())[0][4]
    np.testing.assert_allclose(numeric, rate, rtol=1e-12, atol=1e-15)


def test_hyperbolic_radiated_momentum():
    got = fx.radiative_momentum(HYP, E, 0.0, 1.0)
    want = 36.0 / 35.0 * EPS * np.array([math.sinh(1.0), math.cosh(1.0) - 1.0, 0, 0, 0, 0])
    np.testing.assert_allclose(got, want, rtol=1e-13, atol=1e-17)


def test_uniform_motion_radiates_nothing():
    w = builtin_worldline("uniform", velocity=(0.4, 0.1, 0, 0, 0))
    assert not np.any(fx.radiative_momentum(w, E, 0.0, 2.0))
    tube = fx.tube_flux_numeric(w, E, 0.0, 2.0)
    assert np.max(np.abs(tube.p_rad())) <= 1e-16
    # the bound momentum of a free charge is the same at both ends
    assert np.max(np.abs(tube.p_bnd(0.5))) <= 1e-13


def test_static_bound_momentum():
    s = STATIC.state(0.0)
    np.testing.assert_allclose(fx.bound_momentum(s, E, 0.5), [1.5 * EPS / 0.125, 0, 0, 0, 0, 0], rtol=1e-15)
    with pytest.raises(ValueError):
        fx.bound_momentum(s, E, 0.0)


def test_bound_terms_hyperbolic():
    s = HYP.state(0.3)
    terms = fx.bound_momentum_terms(s, E)
    np.testing.assert_allclose(terms[-1], 2 * EPS * s.u, rtol=1e-15)
    np.testing.assert_allclose(terms[-2], 2.4 * EPS * s.a, rtol=1e-15)
    np.testing.assert_allclose(fx.spin_shadow(s, E), 2.4 * EPS * wedge(s.u, s.a), rtol=1e-15)


def test_surface_element_static():
    y = sphere_point(STATIC.state(0.0), 2.0, (0.4, 1.0, 2.0, 3.0))
    fr = retarded_frame(STATIC, y)
    np.testing.assert_allclose(fx.surface_element(fr), lower(fr.n) * 16.0, atol=1e-13)
    np.testing.assert_allclose(fx.surface_element(fr, 4.0), lower(fr.n) * 256.0, atol=1e-12)


def test_surface_element_sees_only_minus_u_in_radiative_part():
    fr = retarded_frame(HELIX, sphere_point(HELIX.state(0.3), 1.2, (0.4, 1.0, 2.0, 3.0)))
    sp = stress_energy_split(fr, E)
    full = fx.surface_element(fr) @ sp.rad
    only_u = lower(-fr.state.u) * fr.r**4 @ sp.rad
    np.testing.assert_allclose(full, only_u, atol=1e-14 * np.abs(full).max())


def test_flux_report_helix(helix_tube):
    rep = fx.flux_report(HELIX, E, 0.7, 0.0, 1.5, numeric=helix_tube)
    res = rep.residuals()
    assert res["p_rad"] <= 1e-7 and res["M_rad"] <= 1e-7
    assert res["p_bnd"] <= 1e-6 and res["M_bnd"] <= 1e-5
    assert len(rep.rows()) == 2 * 6 + 2 * 15


def test_endpoint_property_independent_of_paneling(helix_tube):
    split = fx.tube_flux_numeric(HELIX, E, 0.0, 1.5, points=[0.3, 0.9, 1.2])
    for r in (0.5, 2.0):
        assert fx.relative_residual(split.p_bnd(r), helix_tube.p_bnd(r)) <= 1e-9
        closed = fx.bound_momentum(HELIX.state(1.5), E, r) - fx.bound_momentum(HELIX.state(0.0), E, r)
        assert fx.relative_residual(split.p_bnd(r), closed) <= 1e-6
    # no r^-4 term survives in either integral
    assert np.max(np.abs(split.momentum[-4])) <= 1e-12 * np.max(np.abs(split.momentum[-3]))


def test_hyperbolic_angular_momentum_cancels():
    orbital, own = fx.radiative_angular_pieces(HYP, E, 0.0, 1.0)
    total = orbital + own
    assert np.max(np.abs(total)) <= 1e-15
    assert abs(orbital[0, 1]) > 1e-3
    assert abs(orbital[0, 1] + own[0, 1]) <= 1e-14 * abs(orbital[0, 1])
    mask = np.ones((6, 6), bool)
    mask[0, 1] = mask[1, 0] = False
    assert not np.any(orbital[mask]) and not np.any(own[mask])


def test_flux_suite_hyperbolic_two_radii():
    checks = flux_suite(HYP, E, 0.5, 0.0, 1.0, r_alt=2.0)
    assert all(c.passed for c in checks), checks


@pytest.mark.skipif(len(available_backends()) < 2, reason="compiled kernel not built")
def test_backends_agree():
    q = SphereQuadrature()
    s = HELIX.state(0.4)
    m_c, a_c = fx.tube_rate(s, E, q, backend="cython")
    m_p, a_p = fx.tube_rate(s, E, q, backend="python")
    np.testing.assert_allclose(m_c, m_p, rtol=1e-13, atol=1e-13 * np.abs(m_p).max())
    np.testing.assert_allclose(a_c, a_p, rtol=1e-13, atol=1e-13 * np.abs(a_p).max())


def test_unknown_backend():
    with pytest.raises(ValueError):
        fx.tube_rate(HELIX.state(0.0), E, SphereQuadrature(), backend="fortran")


def test_tube_graded_matches_ungraded():
    q = SphereQuadrature()
    s = HELIX.state(0.6)
    mom, ang = fx.tube_rate(s, E, q)
    for r in (0.3, 1.7):
        tm, ta = fx.tube_total_rate(s, E, r, q)
        np.testing.assert_allclose(sum(mom[p + 4] * r**p for p in fx.MOMENTUM_POWERS), tm,
                                   atol=1e-12 * np.abs(tm).max())
        np.testing.assert_allclose(sum(ang[p + 4] * r**p for p in fx.ANGULAR_POWERS), ta,
                                   atol=1e-12 * np.abs(ta).max())


def test_convergence_failure():
    with pytest.raises(fx.ConvergenceError):
        fx.tube_flux_numeric(HELIX, E, 0.0, 1.5, limit=1)


def test_window_order():
    with pytest.raises(ValueError):
        fx.tube_flux_numeric(HELIX, E, 1.0, 0.0)


# --- hyperplane -------------------------------------------------------------------

def test_hyperplane_static_matches_closed_form():
    q = SphereQuadrature.uniform(4)
    got = fx.hyperplane_flux_oracle(STATIC, E, 3.0, -1.0, 0.5, q)
    H = fx.hyperplane_bound_expression
    want = H(STATIC.state(0.5), E, 3.0) - H(STATIC.state(-1.0), E, 3.0)
    np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-16)


def test_hyperplane_helix_matches_closed_form():
    q = SphereQuadrature.uniform(10)
    got = fx.hyperplane_flux_oracle(HELIX, E, 3.0, -1.0, 0.5, q)
    H = fx.hyperplane_bound_expression
    want = H(HELIX.state(0.5), E, 3.0) - H(HELIX.state(-1.0), E, 3.0)
    assert fx.relative_residual(got, want) <= 1e-9


@settings(max_examples=20, deadline=None)
@given(st.floats(-3.0, 3.0), st.floats(0.05, 5.0))
def test_cap_identity(tau, r):
    s = HELIX.state(tau)
    assert fx.relative_residual(fx.cap_bound_momentum(s, E, r), fx.bound_momentum(s, E, r)) <= 1e-12


def test_hyperplane_rejects_causal_order():
    with pytest.raises(ValueError):
        fx.hyperplane_bound_expression(STATIC.state(3.0), E, 3.0)
    with pytest.raises(ValueError):
        fx.hyperplane_flux_oracle(STATIC, E, 1.0, 0.0, 1.5)


def test_static_sweep_recovers_coulomb_power():
    sw = fx.sweep_hyperplane(STATIC, E, 0.0)
    assert len(sw.momentum_fit.exponents) == 1
    assert abs(sw.momentum_fit.exponents[0] + 3.0) <= 1e-6
    assert abs(sw.momentum_fit.coefficient_near(-3.0)[0] - 1.5 * EPS) <= 1e-8 * EPS


# --- power-law fits ---------------------------------------------------------------

def test_fit_recovers_synthetic_powers():
    r = 0.25 * 2.0 ** np.arange(6)
    vals = np.stack([3.0 + 2.0 / r**3 - 1.0 / r**2 + 0.5 / r, 1.0 / r**3 + 4.0 / r], axis=1)
    fit = fx.fit_power_laws(r, vals)
    np.testing.assert_allclose(fit.exponents, [-3, -2, -1], atol=1e-8)
    np.testing.assert_allclose(fit.constant, [3.0, 0.0], atol=1e-8)
    np.testing.assert_allclose(fit.coefficient_near(-2), [-1.0, 0.0], atol=1e-8)
    with pytest.raises(fx.FitError):
        fit.coefficient_near(-1.5)


@pytest.mark.parametrize("radii", [[0.5, 1, 2, 4], [1, 2, 3, 4, 5, 6], [-1, -2, -4, -8, -16], [1, 1.01, 1.0201, 1.030301, 1.04060401]])
def test_fit_rejects_bad_radii(radii):
    with pytest.raises(fx.FitError):
        fx.fit_power_laws(radii, np.ones(len(radii)))


def test_fit_rejects_constant_and_too_many_powers():
    r = 2.0 ** np.arange(5)
    with pytest.raises(fx.FitError):
        fx.fit_power_laws(r, np.full(5, 7.0))
    with pytest.raises(fx.FitError):
        fx.fit_power_laws(r, 1 / r**3 + 1 / r**2 + 1 / r + r + r**2)


def test_tube_sweep_helix():
    sw = fx.sweep_tube(HELIX, E, 0.0, 1.5, workers=2)
    checks = sweep_checks(sw, (-3, -2, -1))
    assert all(c.passed for c in checks), checks
    assert sw.spin_residual() <= 1e-4
