"""Contact Hamiltonian flow: vector field, integrators and flow diagnostics.

The equations of motion in contact coordinates are

    dq_a/dt = dH/dp_a
    dp_a/dt = -dH/dq_a - p_a dH/dS
    dS/dt   = p_a dH/dp_a - H

augmented with dt/dt = 1 for explicitly time-dependent systems.  The flow has
divergence -(n+1) dH/dS in the (q, p, S) volume sense, which is the package's
operational definition of dissipation, and |H|^-(n+1) is the density of the
invariant measure away from the H = 0 level set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import RK45

from .errors import (IntegrationError, NonFiniteError, SingularMeasureError,
                     UnsupportedModelError)
from .model import ContactState, ExtendedState, HamiltonianModel

MEASURE_EPS = 1e-12      # |H| below this is treated as the singular level set
JACOBIAN_FD_STEP = 1e-6  # field-Jacobian finite-difference step (variational equations)


# ---------------------------------------------------------------------------
# Vector field
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Tangent:
    """Components of the extended contact Hamiltonian vector field (dt = 1)."""

    dq: np.ndarray
    dp: np.ndarray
    dS: float
    dt: float = 1.0


def vector_field(model: HamiltonianModel, x: ExtendedState) -> Tangent:
    """Evaluate the contact Hamiltonian vector field at x."""
    h = model.evaluate(x)
    d = model.partials(x)
    dq = d.dH_dp
    dp = -d.dH_dq - x.p * d.dH_dS
    dS = float(np.dot(x.p, d.dH_dp)) - h
    out = np.concatenate([dq, dp, [dS]])
    if not np.all(np.isfinite(out)):
        raise NonFiniteError(f"non-finite vector field at {x!r}: {out}")
    return Tangent(dq, dp, dS, 1.0)


def _field_flat(model: HamiltonianModel, t: float, y: np.ndarray) -> np.ndarray:
    x = ExtendedState.from_flat(y, model.n, t)
    f = vector_field(model, x)
    return np.concatenate([f.dq, f.dp, [f.dS]])


# ---------------------------------------------------------------------------
# Integration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegratorOptions:
    """Step control for `integrate`; defaults favour tight invariant checks."""

    method: str = "adaptive_rk45"      # or "fixed_rk4"
    step: float = 1e-3                 # fixed_rk4 only (upper bound on substep)
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_steps: int = 1_000_000
    sample_interval: float = 0.1

    def __post_init__(self):
        if self.method not in ("adaptive_rk45", "fixed_rk4"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.step <= 0 or self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("step and tolerances must be positive")
        if self.max_steps <= 0 or self.sample_interval <= 0:
            raise ValueError("max_steps and sample_interval must be positive")


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered samples of a contact flow plus per-sample diagnostics."""

    times: np.ndarray            # (m,) strictly increasing
    q: np.ndarray                # (m, n)
    p: np.ndarray                # (m, n)
    S: np.ndarray                # (m,)
    H: np.ndarray                # (m,) Hamiltonian value per sample
    div: np.ndarray              # (m,) flow divergence per sample

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        if not (len(self.times) == len(self.q) == len(self.p) == len(self.S)):
            raise ValueError("trajectory component lengths differ")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def n(self) -> int:
        return self.q.shape[1]

    def state(self, i: int) -> ExtendedState:
        return ExtendedState(ContactState(self.q[i], self.p[i], self.S[i]), self.times[i])

    def states(self):
        return (self.state(i) for i in range(len(self)))


def sample_grid(t0: float, t_end: float, sample_interval: float) -> np.ndarray:
    """Uniform grid covering [t0, t_end] with spacing <= sample_interval."""
    m = max(1, int(math.ceil((t_end - t0) / sample_interval - 1e-12)))
    return np.linspace(t0, t_end, m + 1)


def step_rk4(model: HamiltonianModel, x: ExtendedState, h: float) -> ExtendedState:
    """One classical 4th-order Runge-Kutta step of the contact field."""
    if h == 0:
        raise ValueError("step size must be nonzero")
    n = model.n
    t, y = x.t, x.flat()
    k1 = _field_flat(model, t, y)
    k2 = _field_flat(model, t + h / 2, y + h / 2 * k1)
    k3 = _field_flat(model, t + h / 2, y + h / 2 * k2)
    k4 = _field_flat(model, t + h, y + h * k3)
    y1 = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(y1)):
        raise NonFiniteError(f"non-finite RK4 state after step from t={t}")
    return ExtendedState.from_flat(y1, n, t + h)


def _integrate_flat(rhs, y0: np.ndarray, t0: float, t_end: float,
                    opts: IntegratorOptions, grid: np.ndarray) -> np.ndarray:
    """Integrate dy/dt = rhs(t, y) and return samples at grid points.

    `grid` must start at t0 and end at t_end.  Adaptive mode wraps scipy's
    embedded RK45 pair and samples through its dense output; fixed mode takes
    equal substeps of size <= opts.step between consecutive grid points.
    """
    out = np.empty((len(grid), len(y0)))
    out[0] = y0
    nsteps = 0
    if opts.method == "fixed_rk4":
        y, t = y0.copy(), t0
        for i in range(1, len(grid)):
            span = grid[i] - t
            nsub = max(1, int(math.ceil(span / opts.step - 1e-12)))
            h = span / nsub
            for _ in range(nsub):
                nsteps += 1
                if nsteps > opts.max_steps:
                    raise IntegrationError(
                        f"max_steps={opts.max_steps} exceeded at t={t:.6g}", last_time=t)
                k1 = rhs(t, y)
                k2 = rhs(t + h / 2, y + h / 2 * k1)
                k3 = rhs(t + h / 2, y + h / 2 * k2)
                k4 = rhs(t + h, y + h * k3)
                y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
                t += h
            t = grid[i]  # land exactly, avoiding accumulated rounding
            if not np.all(np.isfinite(y)):
                raise NonFiniteError(f"non-finite state at t={t:.6g}")
            out[i] = y
        return out

    solver = RK45(rhs, t0, y0, t_bound=t_end, rtol=opts.rel_tol, atol=opts.abs_tol)
    next_i = 1
    while solver.status == "running":
        nsteps += 1
        if nsteps > opts.max_steps:
            raise IntegrationError(
                f"max_steps={opts.max_steps} exceeded at t={solver.t:.6g}",
                last_time=solver.t)
        solver.step()
        if solver.status == "failed":
            raise IntegrationError(f"adaptive step failed at t={solver.t:.6g}",
                                   last_time=solver.t)
        dense = solver.dense_output()
        while next_i < len(grid) and grid[next_i] <= solver.t + 1e-15:
            out[next_i] = dense(min(grid[next_i], solver.t))
            next_i += 1
    if next_i < len(grid):
        raise IntegrationError(f"integration stopped at t={solver.t:.6g} before t_end",
                               last_time=solver.t)
    if not np.all(np.isfinite(out)):
        raise NonFiniteError("non-finite state produced during integration")
    return out


def integrate(model: HamiltonianModel, init: ExtendedState, t_end: float,
              opts: Optional[IntegratorOptions] = None) -> Trajectory:
    """Integrate the contact equations from init.t to t_end and sample the flow."""
    opts = opts or IntegratorOptions()
    model.check_dimensions(init)
    if t_end <= init.t:
        raise ValueError(f"t_end={t_end} must exceed the initial time {init.t}")
    n = model.n
    grid = sample_grid(init.t, t_end, opts.sample_interval)
    ys = _integrate_flat(lambda t, y: _field_flat(model, t, y),
                         init.flat(), init.t, t_end, opts, grid)
    H = np.empty(len(grid))
    dv = np.empty(len(grid))
    for i, t in enumerate(grid):
        x = ExtendedState.from_flat(ys[i], n, t)
        H[i] = model.evaluate(x)
        dv[i] = divergence(model, x)
    return Trajectory(times=grid, q=ys[:, :n].copy(), p=ys[:, n:2 * n].copy(),
                      S=ys[:, 2 * n].copy(), H=H, div=dv)


# ---------------------------------------------------------------------------
# Flow diagnostics
# ---------------------------------------------------------------------------

def divergence(model: HamiltonianModel, x: ExtendedState) -> float:
    """Divergence of the contact flow in the (q, p, S) volume sense: -(n+1) dH/dS."""
    return -(model.n + 1) * model.partials(x).dH_dS


def measure_weight(model: HamiltonianModel, x: ExtendedState,
                   eps: float = MEASURE_EPS) -> float:
    """Invariant-measure density |H|^-(n+1); defined only away from H = 0."""
    h = model.evaluate(x)
    if abs(h) <= eps:
        raise SingularMeasureError(
            f"|H|={abs(h):.3g} <= {eps:.3g}: invariant measure is singular on H=0")
    return abs(h) ** (-(model.n + 1))


def observable_rate(model: HamiltonianModel, observable: HamiltonianModel,
                    x: ExtendedState) -> float:
    """Total time derivative of an observable F(q, p, S, t) along the flow.

    dF/dt = -H dF/dS + p_a (dF/dS dH/dp_a - dF/dp_a dH/dS)
            + {F, H}_(q,p) + dF/dt.
    """
    h = model.evaluate(x)
    dH = model.partials(x)
    dF = observable.partials(x)
    poisson = float(np.dot(dF.dH_dq, dH.dH_dp) - np.dot(dF.dH_dp, dH.dH_dq))
    contact = float(np.dot(x.p, dF.dH_dS * dH.dH_dp - dH.dH_dS * dF.dH_dp))
    return -h * dF.dH_dS + contact + poisson + dF.dH_dt


def predicted_hamiltonian(model: HamiltonianModel, traj: Trajectory) -> np.ndarray:
    """H(t) predicted from the decay law H_0 exp(-int h'(S) dtau).

    Requires the model to expose the environment-coupling derivative h'(S) of
    the split H = H_mec + h(S); quadrature is trapezoidal on the sample grid.
    """
    if model.h_prime is None:
        raise UnsupportedModelError(
            f"model '{model.name}' does not expose an h(S) split")
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    hp = np.array([model.h_prime(s) for s in traj.S])
    dt = np.diff(traj.times)
    acc = np.concatenate([[0.0], np.cumsum(0.5 * dt * (hp[1:] + hp[:-1]))])
    return traj.H[0] * np.exp(-acc)


def recover_S_linear(model: HamiltonianModel, q: float, p: float, t: float,
                     H0: float) -> float:
    """Solve the decay law of the linear-dissipation system for S(q, p, t)."""
    params = model.params
    if "gamma" not in params or "V" not in params or "m" not in params:
        raise UnsupportedModelError("recover_S_linear needs a linear-dissipation model")
    gamma, m, V = params["gamma"], params["m"], params["V"]
    if gamma == 0:
        raise ZeroDivisionError("recover_S_linear is undefined for gamma = 0")
    return (H0 * math.exp(-gamma * t) - p * p / (2.0 * m) - V(q)) / gamma


# ---------------------------------------------------------------------------
# Variational equations / volume contraction
# ---------------------------------------------------------------------------

def _field_jacobian(model: HamiltonianModel, t: float, y: np.ndarray) -> np.ndarray:
    """Jacobian of the (q, p, S) field by central differences of the field."""
    d = len(y)
    A = np.empty((d, d))
    for j in range(d):
        h = JACOBIAN_FD_STEP * max(1.0, abs(y[j]))
        yp, ym = y.copy(), y.copy()
        yp[j] += h
        ym[j] -= h
        A[:, j] = (_field_flat(model, t, yp) - _field_flat(model, t, ym)) / (2.0 * h)
    return A


def _det_series(model: HamiltonianModel, init: ExtendedState, t_end: float,
                opts: IntegratorOptions, grid: np.ndarray) -> np.ndarray:
    """det of the fundamental matrix of the variational equations at grid times."""
    d = 2 * model.n + 1
    eye = np.eye(d)

    def rhs(t, z):
        y = z[:d]
        J = z[d:].reshape(d, d)
        A = _field_jacobian(model, t, y)
        return np.concatenate([_field_flat(model, t, y), (A @ J).ravel()])

    z0 = np.concatenate([init.flat(), eye.ravel()])
    zs = _integrate_flat(rhs, z0, init.t, t_end, opts, grid)
    return np.array([np.linalg.det(zs[i, d:].reshape(d, d)) for i in range(len(grid))])


def flow_jacobian_determinant(model: HamiltonianModel, init: ExtendedState,
                              t_end: float,
                              opts: Optional[IntegratorOptions] = None) -> float:
    """Volume-contraction factor det dPhi_t at t_end.

    Equals exp(int divergence dt) along the flow up to integration tolerance;
    identically 1 for S-independent models (Liouville's theorem).
    """
    opts = opts or IntegratorOptions()
    model.check_dimensions(init)
    if t_end == init.t:
        return 1.0
    if t_end < init.t:
        raise ValueError(f"t_end={t_end} must not precede the initial time {init.t}")
    grid = np.array([init.t, t_end])
    return float(_det_series(model, init, t_end, opts, grid)[-1])


def jacobian_determinant_series(model: HamiltonianModel, init: ExtendedState,
                                t_end: float,
                                opts: Optional[IntegratorOptions] = None) -> tuple:
    """(times, det) sampled like `integrate`; used by measure/volume diagnostics."""
    opts = opts or IntegratorOptions()
    model.check_dimensions(init)
    if t_end <= init.t:
        raise ValueError(f"t_end={t_end} must exceed the initial time {init.t}")
    grid = sample_grid(init.t, t_end, opts.sample_interval)
    return grid, _det_series(model, init, t_end, opts, grid)
