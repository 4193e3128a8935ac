"""Shared fixtures: reference models and tightly-integrated trajectories."""

import numpy as np
import pytest

import contactmech as cm


@pytest.fixture(scope="session")
def linear_model():
    """H = p^2/2 + q^2/2 + 0.1 S."""
    return cm.make_linear_dissipation(1.0, 0.1, cm.quadratic_potential())


@pytest.fixture(scope="session")
def conservative_model():
    """H = p^2/2 + q^2/2 (gamma = 0)."""
    return cm.make_linear_dissipation(1.0, 0.0, cm.quadratic_potential())


@pytest.fixture(scope="session")
def parametric_model():
    """Damped harmonic oscillator in contact form: gamma = 0.1, omega = 1."""
    return cm.make_damped_parametric(1.0, 0.1, 1.0)


@pytest.fixture(scope="session")
def tight_opts():
    return cm.IntegratorOptions(method="adaptive_rk45", rel_tol=1e-10,
                                abs_tol=1e-13, sample_interval=0.01)


@pytest.fixture(scope="session")
def linear_traj(linear_model, tight_opts):
    """Damped oscillator from (1, 0, 0) over [0, 10]."""
    x0 = cm.make_state(1.0, 0.0, 0.0, 0.0)
    return cm.integrate(linear_model, x0, 10.0, tight_opts)


@pytest.fixture(scope="session")
def parametric_traj(parametric_model, tight_opts):
    """Damped harmonic oscillator from (1, 0, 0.3) over [0, 10]."""
    x0 = cm.make_state(1.0, 0.0, 0.3, 0.0)
    return cm.integrate(parametric_model, x0, 10.0, tight_opts)


@pytest.fixture(scope="session")
def ermakov_const(parametric_traj):
    """Ermakov solution for gamma = 0.1, omega = 1 on the trajectory grid."""
    return cm.solve_ermakov(1.0, 0.1, 1.0, 0.0, parametric_traj.times)


def random_states(n_points, seed=0, t_range=(0.0, 5.0), q_range=(0.5, 1.5)):
    rng = np.random.default_rng(seed)
    return [cm.make_state(float(rng.uniform(*q_range)),
                          float(rng.uniform(-1.0, 1.0)),
                          float(rng.uniform(-1.0, 1.0)),
                          float(rng.uniform(*t_range)))
            for _ in range(n_points)]
