import math

import numpy as np
import pytest

from lw6 import balance as bal
from lw6 import motion as mo
from lw6.flux import radiated_rate
from lw6.worldline import KinematicState, builtin_worldline

NEUTRAL = bal.RenormalizationConstants(1.0, 0.0)
RIGID = bal.RenormalizationConstants(1.0, 0.3)
CHARGED = bal.RenormalizationConstants(1.0, 0.05)


def test_constant_lab_force_gives_hyperbolic_motion():
    taus = np.linspace(0.0, 5.0, 11)
    traj = mo.integrate_motion(mo.MotionState.at_rest(), NEUTRAL, 0.0, mo.lab_constant_force([0.5, 0, 0, 0, 0]),
                               5.0, output_times=taus)
    rows = {s.tau: s for s in traj.states}
    g = 0.5
    for t in taus:
        s = rows[t]
        assert abs(s.z[1] - (math.cosh(g * t) - 1) / g) <= 1e-8
        assert abs(s.z[0] - math.sinh(g * t) / g) <= 1e-8
        # coordinate-time form of the same curve
        assert abs(s.z[1] - (math.sqrt(1 + (g * s.z[0]) ** 2) - 1) / g) <= 1e-8
    assert traj.max_drift <= 1e-7


def test_rigid_and_charged_particles_follow_hyperbolic_motion():
    """A constant lab force reproduces hyperbolic motion once the particle starts on it."""
    w = builtin_worldline("hyperbolic", g=0.8)
    for c, e in ((RIGID, 0.0), (CHARGED, 1.0)):
        required = bal.required_force(w.state(0.0), c, e)
        # at tau = 0 the required force points along the axis of motion
        assert np.max(np.abs(np.delete(required, 1))) <= 1e-14
        s0 = mo.MotionState.from_kinematic(w.state(0.0))
        traj = mo.integrate_motion(s0, c, e, mo.lab_constant_force([required[1], 0, 0, 0, 0]), 0.5)
        assert np.max(np.abs(traj.states[-1].z - w.state(0.5).z)) <= 1e-8


def test_free_uniform_motion_stays_uniform():
    u = np.array([math.sqrt(1.09), 0.3, 0, 0, 0, 0])
    s0 = mo.MotionState(0.0, np.zeros(6), u, np.zeros(6), np.zeros(6), np.zeros(6))
    for c, e in ((CHARGED, 1.0), (RIGID, 0.0), (NEUTRAL, 0.0)):
        traj = mo.integrate_motion(s0, c, e, None, 5.0)
        assert np.max(np.abs(traj.array("a"))) <= 1e-12
        assert np.max(np.abs(traj.array("z") - np.outer(traj.taus, u))) <= 1e-12


def test_state_size_depends_on_charge_and_rigidity():
    assert mo._order(CHARGED, 1.0) == 5
    assert mo._order(RIGID, 0.0) == 4
    assert mo._order(NEUTRAL, 0.0) == 2
    with pytest.raises(ValueError):
        mo.integrate_motion(mo.MotionState.at_rest(), bal.RenormalizationConstants(0.0, 0.0), 0.0, None, 1.0)


def test_third_derivative_solves_momentum_balance():
    w = builtin_worldline("helical", radius=1.0, beta=0.5, drift=0.3)
    ks = w.state(0.4)
    F = bal.required_force(ks, CHARGED, 1.0)
    got = mo.third_derivative(mo.MotionState.from_kinematic(ks), CHARGED, 1.0, F)
    np.testing.assert_allclose(got, ks.adddot, atol=1e-12)
    s = mo.MotionState.from_kinematic(ks)
    res = bal.momentum_derivative(KinematicState(s.tau, s.z, s.u, s.a, s.adot, s.addot, got), CHARGED, 1.0)
    np.testing.assert_allclose(res + radiated_rate(ks, 1.0), F, atol=1e-12)


def test_runaway_rates_match_linearization():
    roots = mo.runaway_rates(CHARGED, 1.0)
    eps = 1.0 / (4 * math.pi**2)
    for lam in roots:
        assert abs(0.8 * eps * lam**3 - 0.05 * lam**2 + 1.0) <= 1e-10
    dominant = roots[np.argmax(roots.real)]
    assert dominant.real > 0.0


def test_free_charged_particle_runs_away():
    s0 = mo.MotionState.at_rest(a=[0, 0, 1e-8, 0, 0, 0])
    out = np.arange(0.05, 3.0, 0.05)
    traj = mo.integrate_motion(s0, CHARGED, 1.0, None, 3.0, atol=1e-18, output_times=out)
    rows = [s for s in traj.states if s.tau in set(out)]
    acc = np.array([s.a[2] for s in rows])
    fitted = mo.fitted_rates([s.tau for s in rows], acc)
    roots = mo.runaway_rates(CHARGED, 1.0)
    dominant = roots[np.argmax(roots.real)]
    nearest = fitted[np.argmin(np.abs(fitted - dominant))]
    assert abs(nearest - dominant) <= 0.02 * abs(dominant)
    assert traj.max_drift <= 1e-7


def test_fitted_rates_on_synthetic_series():
    t = np.linspace(0.0, 2.0, 41)
    x = 2.0 * np.exp(0.7 * t) + np.exp(-1.5 * t)
    got = np.sort(mo.fitted_rates(t, x, order=2).real)
    np.testing.assert_allclose(got, [-1.5, 0.7], atol=1e-8)
    with pytest.raises(ValueError):
        mo.fitted_rates([0.0, 0.1, 0.3, 0.4], [1, 2, 3, 4])


def test_step_collapse_carries_partial_trajectory():
    s0 = mo.MotionState.at_rest(a=[0, 0.5, 0, 0, 0, 0])
    with pytest.raises(mo.StepCollapseError) as info:
        mo.integrate_motion(s0, CHARGED, 1.0, None, 100.0, h_min=1e-4)
    assert info.value.trajectory is not None and len(info.value.trajectory.states) > 1


def test_drift_bound_violation():
    with pytest.raises(mo.ConstraintDriftError):
        mo.integrate_motion(mo.MotionState.at_rest(), NEUTRAL, 0.0, mo.lab_constant_force([1.0, 0, 0, 0, 0]), 1.0,
                            drift_bound=0.0, rtol=1e-6, atol=1e-6)


def test_initial_chain_is_validated():
    bad = mo.MotionState(0.0, np.zeros(6), np.array([1.0, 0.1, 0, 0, 0, 0]), np.zeros(6), np.zeros(6), np.zeros(6))
    with pytest.raises(ValueError):
        mo.integrate_motion(bad, CHARGED, 1.0, None, 1.0)
    with pytest.raises(ValueError):
        mo.integrate_motion(mo.MotionState.at_rest(), CHARGED, 1.0, None, 0.0)


def test_projection_restores_constraints():
    s = mo.MotionState.at_rest(a=[0, 0.3, 0, 0, 0, 0])
    y = mo._pack(s, 5) + 1e-6 * np.arange(30)
    y2, drift = mo.project(y, 5)
    assert drift > 1e-7
    blocks = [y2[6 * i:6 * i + 6] for i in range(5)]
    assert np.max(np.abs(mo.MotionState(0.0, *blocks).chain_residuals())) <= 1e-14


def test_force_along_velocity_is_dropped():
    traj = mo.integrate_motion(mo.MotionState.at_rest(), NEUTRAL, 0.0,
                               mo.covariant_constant_force([0.2, 0.3, 0, 0, 0, 0]), 1.0)
    assert traj.dropped_force > 0.1
    assert np.max(np.abs(traj.states[-1].chain_residuals()[:1])) <= 1e-14


def test_lab_force_shape():
    with pytest.raises(ValueError):
        mo.lab_constant_force([1.0, 0.0])
