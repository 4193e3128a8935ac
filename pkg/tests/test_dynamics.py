"""Flow layer: vector field, integrators, decay laws, volume contraction."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import contactmech as cm
from contactmech.errors import (IntegrationError, SingularMeasureError,
                                UnsupportedModelError)


def test_vector_field_examples(linear_model):
    f0 = cm.vector_field(linear_model, cm.make_state(0.0, 0.0, 0.0, 0.0))
    assert_allclose([f0.dq[0], f0.dp[0], f0.dS, f0.dt], [0.0, 0.0, 0.0, 1.0])
    f1 = cm.vector_field(linear_model, cm.make_state(1.0, 0.0, 0.0, 0.0))
    assert_allclose([f1.dq[0], f1.dp[0], f1.dS, f1.dt], [0.0, -1.0, -0.5, 1.0])


def test_vector_field_reduces_to_symplectic_for_S_independent():
    ck = cm.make_caldirola_kanai(1.0, 0.1, cm.quadratic_potential())
    x = cm.make_state(0.8, -0.5, 3.0, 1.2)
    f = cm.vector_field(ck, x)
    d = ck.partials(x)
    assert_allclose(f.dp, -d.dH_dq)  # no p dH/dS term
    assert_allclose(f.dq, d.dH_dp)


def test_step_rk4_zero_model():
    zero = cm.make_custom(1, lambda x: 0.0, depends_on_S=False, depends_on_t=False)
    x = cm.make_state(1.0, 2.0, 3.0, 4.0)
    y = cm.step_rk4(zero, x, 0.25)
    assert_allclose([y.q[0], y.p[0], y.S, y.t], [1.0, 2.0, 3.0, 4.25])
    with pytest.raises(ValueError):
        cm.step_rk4(zero, x, 0.0)


def test_step_rk4_matches_adaptive_reference(linear_model):
    x = cm.make_state(1.0, 0.0, 0.0, 0.0)
    h = 1e-3
    one = cm.step_rk4(linear_model, x, h)
    opts = cm.IntegratorOptions(rel_tol=1e-12, abs_tol=1e-14, sample_interval=h)
    ref = cm.integrate(linear_model, x, h, opts)
    assert_allclose([one.q[0], one.p[0], one.S],
                    [ref.q[-1, 0], ref.p[-1, 0], ref.S[-1]], atol=1e-12)


def test_rk4_full_period_return(conservative_model):
    x = cm.make_state(1.0, 0.0, 0.0, 0.0)
    h = 1e-3
    state = x
    steps = int(round(2 * math.pi / h))
    for _ in range(steps):
        state = cm.step_rk4(conservative_model, state, h)
    state = cm.step_rk4(conservative_model, state, 2 * math.pi - steps * h)
    assert abs(state.q[0] - 1.0) < 1e-8
    assert abs(state.p[0]) < 1e-8


def test_integrate_decay_example(linear_traj):
    assert linear_traj.H[-1] == pytest.approx(0.5 * math.exp(-1.0), rel=1e-8)
    pred = 0.5 * np.exp(-0.1 * linear_traj.times)
    assert np.max(np.abs(linear_traj.H - pred) / pred) < 1e-8


def test_integrate_zero_model_constant():
    zero = cm.make_custom(1, lambda x: 0.0, depends_on_S=False, depends_on_t=False)
    traj = cm.integrate(zero, cm.make_state(1.0, -2.0, 0.7, 0.0), 3.0,
                        cm.IntegratorOptions(sample_interval=0.5))
    assert_allclose(traj.q, 1.0)
    assert_allclose(traj.p, -2.0)
    assert_allclose(traj.S, 0.7)
    assert traj.times[-1] == 3.0


def test_integrate_fixed_rk4_lands_on_samples(linear_model):
    opts = cm.IntegratorOptions(method="fixed_rk4", step=1e-3, sample_interval=0.37)
    traj = cm.integrate(linear_model, cm.make_state(1.0, 0.0, 0.0, 0.0), 2.0, opts)
    assert traj.times[-1] == 2.0
    assert np.max(np.diff(traj.times)) <= 0.37 + 1e-12
    pred = 0.5 * np.exp(-0.1 * traj.times)
    assert np.max(np.abs(traj.H - pred) / pred) < 1e-9


def test_caldirola_kanai_q_matches_contact_model(tight_opts):
    """Both models produce the damped Newton equation for q."""
    hs = cm.make_linear_dissipation(1.0, 0.1, cm.quadratic_potential())
    ck = cm.make_caldirola_kanai(1.0, 0.1, cm.quadratic_potential())
    x0 = cm.make_state(1.0, 0.0, 0.0, 0.0)
    t1 = cm.integrate(hs, x0, 10.0, tight_opts)
    t2 = cm.integrate(ck, x0, 10.0, tight_opts)
    assert np.max(np.abs(t1.q - t2.q)) < 1e-6
    # physical momentum p = e^{-gamma t} p_CK
    assert np.max(np.abs(t1.p[:, 0] - np.exp(-0.1 * t2.times) * t2.p[:, 0])) < 1e-6


def test_divergence_examples(linear_model, conservative_model):
    x = cm.make_state(0.3, -1.2, 0.8, 2.0)
    assert cm.divergence(linear_model, x) == -0.2
    assert cm.divergence(conservative_model, x) == 0.0
    s2 = cm.make_custom(1, lambda z: z.S ** 2, depends_on_t=False)
    assert cm.divergence(s2, cm.make_state(0.0, 0.0, 1.0, 0.0)) == pytest.approx(-4.0, rel=1e-9)


def test_measure_weight_examples(linear_model):
    assert cm.measure_weight(linear_model, cm.make_state(1.0, 0.0, 0.0, 0.0)) == 4.0
    one = cm.make_custom(1, lambda z: 1.0, depends_on_S=False, depends_on_t=False)
    assert cm.measure_weight(one, cm.make_state(0.0, 0.0, 0.0, 0.0)) == 1.0
    with pytest.raises(SingularMeasureError):
        cm.measure_weight(linear_model, cm.make_state(0.0, 0.0, 0.0, 0.0))


def test_observable_rate_examples(linear_model):
    x = cm.make_state(1.0, 2.0, 0.0, 0.0)
    # F = q reproduces the dq/dt equation
    Fq = cm.make_custom(1, lambda z: z.q[0], depends_on_S=False, depends_on_t=False)
    assert cm.observable_rate(linear_model, Fq, x) == pytest.approx(
        linear_model.partials(x).dH_dp[0], rel=1e-9)
    # F = H: dH/dt = -H dH/dS for time-independent models
    h = linear_model.evaluate(x)
    assert cm.observable_rate(linear_model, linear_model, x) == pytest.approx(
        -h * 0.1, rel=1e-9)
    # F = H_mec: mechanical-energy dissipation rate -m gamma qdot^2
    Fmec = cm.make_custom(1, lambda z: z.p[0] ** 2 / 2 + z.q[0] ** 2 / 2,
                          depends_on_S=False, depends_on_t=False)
    assert cm.observable_rate(linear_model, Fmec, x) == pytest.approx(-0.4, rel=1e-8)


def test_predicted_hamiltonian(linear_traj, linear_model):
    pred = cm.predicted_hamiltonian(linear_model, linear_traj)
    assert np.max(np.abs(pred - linear_traj.H) / np.abs(pred)) < 1e-6
    zero_h = cm.make_custom(1, lambda z: z.p[0] ** 2 / 2, depends_on_S=False,
                            depends_on_t=False, h_prime=lambda S: 0.0)
    traj = cm.integrate(zero_h, cm.make_state(0.0, 1.0, 0.0, 0.0), 1.0,
                        cm.IntegratorOptions(sample_interval=0.1))
    assert_allclose(cm.predicted_hamiltonian(zero_h, traj), traj.H[0])
    no_split = cm.make_custom(1, lambda z: z.p[0] ** 2 / 2)
    with pytest.raises(UnsupportedModelError):
        cm.predicted_hamiltonian(no_split, traj)


def test_recover_S_linear(linear_model, linear_traj):
    assert cm.recover_S_linear(linear_model, 1.0, 0.0, 0.0, 0.5) == 0.0
    H0 = linear_traj.H[0]
    rec = np.array([cm.recover_S_linear(linear_model, linear_traj.q[i, 0],
                                        linear_traj.p[i, 0], linear_traj.times[i], H0)
                    for i in range(0, len(linear_traj), 100)])
    assert np.max(np.abs(rec - linear_traj.S[::100])) < 1e-6
    cons = cm.make_linear_dissipation(1.0, 0.0, cm.quadratic_potential())
    with pytest.raises(ZeroDivisionError):
        cm.recover_S_linear(cons, 1.0, 0.0, 0.0, 0.5)
    with pytest.raises(UnsupportedModelError):
        cm.recover_S_linear(cm.make_custom(1, lambda z: 0.0), 1.0, 0.0, 0.0, 0.5)


def test_flow_jacobian_determinant(linear_model, conservative_model):
    x0 = cm.make_state(1.0, 0.0, 0.0, 0.0)
    assert cm.flow_jacobian_determinant(linear_model, x0, 0.0) == 1.0
    det = cm.flow_jacobian_determinant(linear_model, x0, 5.0)
    assert det == pytest.approx(math.exp(-1.0), abs=1e-5)
    det_c = cm.flow_jacobian_determinant(conservative_model, x0, 5.0)
    assert det_c == pytest.approx(1.0, abs=1e-8)


def test_measure_invariance_along_flow(linear_model, linear_traj, tight_opts):
    _, dets = cm.jacobian_determinant_series(linear_model, linear_traj.state(0),
                                             10.0, tight_opts)
    weight = np.abs(linear_traj.H) ** -2.0
    product = weight * dets
    assert np.max(np.abs(product - product[0]) / product[0]) < 1e-4


def test_conservative_energy_drift_adaptive(conservative_model):
    opts = cm.IntegratorOptions(rel_tol=1e-10, abs_tol=1e-13, sample_interval=0.1)
    traj = cm.integrate(conservative_model, cm.make_state(1.0, 0.0, 0.0, 0.0),
                        100.0, opts)
    assert np.max(np.abs(traj.H - traj.H[0])) / traj.H[0] < 1e-8
    assert_allclose(traj.div, 0.0)


def test_hamiltonian_evolution_rate_fd(tight_opts):
    """Finite-difference dH/dt vs -H dH/dS + dH/dt along a time-dependent flow."""
    omega = cm.ScalarFunction(f=lambda t: 1 + 0.1 * math.sin(0.3 * t),
                              df=lambda t: 0.03 * math.cos(0.3 * t))
    model = cm.make_damped_parametric(1.0, 0.1, omega)
    opts = cm.IntegratorOptions(rel_tol=1e-11, abs_tol=1e-13, sample_interval=0.002)
    traj = cm.integrate(model, cm.make_state(1.0, 0.0, 0.3, 0.0), 10.0, opts)
    fd = (traj.H[2:] - traj.H[:-2]) / (traj.times[2:] - traj.times[:-2])
    expected = np.array([-traj.H[i] * model.partials(traj.state(i)).dH_dS
                         + model.partials(traj.state(i)).dH_dt
                         for i in range(1, len(traj) - 1)])
    scale = np.max(np.abs(expected))
    assert np.max(np.abs(fd - expected)) / scale < 1e-5


def test_energy_dissipation_rate_fd(linear_model):
    """Finite-difference dH_mec/dt vs -p dH_mec/dp h'(S) = -m gamma qdot^2."""
    opts = cm.IntegratorOptions(rel_tol=1e-11, abs_tol=1e-13, sample_interval=0.002)
    traj = cm.integrate(linear_model, cm.make_state(1.0, 0.0, 0.0, 0.0), 10.0, opts)
    hmec = traj.H - 0.1 * traj.S
    fd = (hmec[2:] - hmec[:-2]) / (traj.times[2:] - traj.times[:-2])
    expected = -0.1 * traj.p[1:-1, 0] ** 2
    scale = np.max(np.abs(expected))
    assert np.max(np.abs(fd - expected)) / scale < 1e-5


def test_rk4_convergence_order(linear_model):
    """Halving h shrinks the endpoint error by ~16 (4th order)."""
    x0 = cm.make_state(1.0, 0.0, 0.0, 0.0)
    ref_opts = cm.IntegratorOptions(rel_tol=1e-13, abs_tol=1e-15, sample_interval=1.0)
    ref = cm.integrate(linear_model, x0, 1.0, ref_opts)
    errs = []
    for h in (0.05, 0.025):
        opts = cm.IntegratorOptions(method="fixed_rk4", step=h, sample_interval=1.0)
        traj = cm.integrate(linear_model, x0, 1.0, opts)
        errs.append(np.max(np.abs(
            np.concatenate([traj.q[-1], traj.p[-1], [traj.S[-1]]])
            - np.concatenate([ref.q[-1], ref.p[-1], [ref.S[-1]]]))))
    ratio = errs[0] / errs[1]
    assert 16 * 0.8 <= ratio <= 16 * 1.2


def test_integration_errors(linear_model):
    x0 = cm.make_state(1.0, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        cm.integrate(linear_model, x0, -1.0)
    opts = cm.IntegratorOptions(max_steps=3, sample_interval=0.1)
    with pytest.raises(IntegrationError) as err:
        cm.integrate(linear_model, x0, 50.0, opts)
    assert err.value.last_time is not None
    with pytest.raises(ValueError):
        cm.IntegratorOptions(method="leapfrog")
    with pytest.raises(ValueError):
        cm.IntegratorOptions(step=-1.0)
    with pytest.raises(ValueError):
        cm.IntegratorOptions(sample_interval=0.0)


def test_trajectory_invariants(linear_traj):
    assert np.all(np.diff(linear_traj.times) > 0)
    assert len(linear_traj) == len(linear_traj.times)
    st0 = linear_traj.state(0)
    assert st0.q[0] == 1.0 and st0.t == 0.0
    with pytest.raises(ValueError):
        cm.Trajectory(times=np.array([0.0, 0.0, 1.0]), q=np.zeros((3, 1)),
                      p=np.zeros((3, 1)), S=np.zeros(3), H=np.zeros(3),
                      div=np.zeros(3))
