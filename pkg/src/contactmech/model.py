"""Contact phase-space states and contact Hamiltonian descriptors.

The phase space is described in Darboux coordinates (q, p, S): generalized
positions, conjugate momenta and an action-like contact variable.  A
``HamiltonianModel`` wraps a scalar function H(q, p, S, t) together with its
partial derivatives; the built-in factories cover linear dissipation, the
damped parametric oscillator and the Caldirola-Kanai effective model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Optional

import numpy as np

from .errors import DimensionMismatchError, NonFiniteError

FD_STEP = 1e-6  # relative step for central finite differences


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContactState:
    """A point (q, p, S) of the contact phase space; immutable after construction."""

    q: np.ndarray
    p: np.ndarray
    S: float

    def __post_init__(self):
        object.__setattr__(self, "q", _readonly(self.q))
        object.__setattr__(self, "p", _readonly(self.p))
        object.__setattr__(self, "S", float(self.S))
        if self.q.ndim != 1 or self.p.ndim != 1 or self.q.size != self.p.size:
            raise DimensionMismatchError(
                f"q and p must be 1-d arrays of equal length, got {self.q.shape} and {self.p.shape}"
            )
        if self.q.size < 1:
            raise DimensionMismatchError("need at least one degree of freedom")
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.p)) and math.isfinite(self.S)):
            raise NonFiniteError(f"non-finite contact state: q={self.q}, p={self.p}, S={self.S}")

    @property
    def n(self) -> int:
        return self.q.size

    def __repr__(self):
        return f"ContactState(q={self.q.tolist()}, p={self.p.tolist()}, S={self.S})"


@dataclass(frozen=True)
class ExtendedState:
    """A contact state with the time coordinate appended."""

    state: ContactState
    t: float

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        if not math.isfinite(self.t):
            raise NonFiniteError(f"non-finite time t={self.t}")

    @property
    def q(self) -> np.ndarray:
        return self.state.q

    @property
    def p(self) -> np.ndarray:
        return self.state.p

    @property
    def S(self) -> float:
        return self.state.S

    @property
    def n(self) -> int:
        return self.state.n

    def flat(self) -> np.ndarray:
        """Pack into [q, p, S] (time excluded)."""
        return np.concatenate([self.q, self.p, [self.S]])

    @staticmethod
    def from_flat(y: np.ndarray, n: int, t: float) -> "ExtendedState":
        return ExtendedState(ContactState(y[:n], y[n:2 * n], y[2 * n]), t)


def make_state(q, p, S=0.0, t=0.0) -> ExtendedState:
    """Convenience constructor; scalars are promoted to length-1 vectors."""
    return ExtendedState(ContactState(np.atleast_1d(q), np.atleast_1d(p), S), t)


@dataclass(frozen=True)
class PartialDerivatives:
    """First partials of a contact Hamiltonian at one extended state."""

    dH_dq: np.ndarray
    dH_dp: np.ndarray
    dH_dS: float
    dH_dt: float

    def __post_init__(self):
        object.__setattr__(self, "dH_dq", _readonly(self.dH_dq))
        object.__setattr__(self, "dH_dp", _readonly(self.dH_dp))
        object.__setattr__(self, "dH_dS", float(self.dH_dS))
        object.__setattr__(self, "dH_dt", float(self.dH_dt))
        if self.dH_dq.size != self.dH_dp.size:
            raise DimensionMismatchError("dH_dq and dH_dp lengths differ")
        vals = np.concatenate([self.dH_dq, self.dH_dp, [self.dH_dS, self.dH_dt]])
        if not np.all(np.isfinite(vals)):
            raise NonFiniteError(f"non-finite partial derivatives: {vals}")


# ---------------------------------------------------------------------------
# Scalar helper functions (potentials, frequencies)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalarFunction:
    """A scalar function of one variable carrying its own derivative.

    Built-ins always supply an analytic derivative; passing ``df=None`` falls
    back to central finite differences (documented fallback, not the default).
    """

    f: Callable[[float], float]
    df: Optional[Callable[[float], float]] = None
    is_constant: bool = False

    def __call__(self, x: float) -> float:
        return float(self.f(x))

    def derivative(self, x: float) -> float:
        if self.is_constant:
            return 0.0
        if self.df is not None:
            return float(self.df(x))
        h = FD_STEP * max(1.0, abs(x))
        return (float(self.f(x + h)) - float(self.f(x - h))) / (2.0 * h)


def as_scalar_fn(obj, name: str = "function") -> ScalarFunction:
    """Coerce numbers, callables or ScalarFunctions to a ScalarFunction."""
    if isinstance(obj, ScalarFunction):
        return obj
    if isinstance(obj, (int, float)):
        c = float(obj)
        return ScalarFunction(f=lambda _x, c=c: c, df=lambda _x: 0.0, is_constant=True)
    if callable(obj):
        return ScalarFunction(f=obj)
    raise TypeError(f"{name} must be a number, callable or ScalarFunction, got {type(obj)!r}")


def quadratic_potential(k: float = 1.0) -> ScalarFunction:
    """V(q) = k q^2 / 2 with analytic derivative."""
    return ScalarFunction(f=lambda q: 0.5 * k * q * q, df=lambda q: k * q)


# ---------------------------------------------------------------------------
# Hamiltonian models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HamiltonianModel:
    """Descriptor of a contact Hamiltonian H(q, p, S, t).

    ``value`` maps an ExtendedState to a real number; ``partials_fn`` (when
    supplied) returns closed-form first partials, otherwise central finite
    differences of ``value`` are used.  ``h_prime``, when present, is h'(S)
    for Hamiltonians that split as H = H_mec(q, p[, t]) + h(S).
    """

    n: int
    value: Callable[[ExtendedState], float]
    partials_fn: Optional[Callable[[ExtendedState], PartialDerivatives]] = None
    depends_on_S: bool = True
    depends_on_t: bool = True
    name: str = "custom"
    params: Mapping[str, Any] = field(default_factory=dict)
    h_prime: Optional[Callable[[float], float]] = None

    def check_dimensions(self, x: ExtendedState):
        if x.n != self.n:
            raise DimensionMismatchError(
                f"model '{self.name}' has n={self.n} but state has n={x.n}"
            )

    def evaluate(self, x: ExtendedState) -> float:
        """Value of the contact Hamiltonian at x; pure and side-effect free."""
        self.check_dimensions(x)
        v = float(self.value(x))
        if not math.isfinite(v):
            raise NonFiniteError(f"model '{self.name}' is non-finite at {x!r}")
        return v

    def partials(self, x: ExtendedState) -> PartialDerivatives:
        """Closed-form partials when available, else central finite differences."""
        self.check_dimensions(x)
        if self.partials_fn is not None:
            d = self.partials_fn(x)
            if d.dH_dq.size != self.n:
                raise DimensionMismatchError("partials length does not match model n")
            return d
        return self._fd_partials(x)

    def _fd_partials(self, x: ExtendedState) -> PartialDerivatives:
        n = self.n
        y = np.concatenate([x.flat(), [x.t]])

        def value_of(z):
            return self.evaluate(ExtendedState.from_flat(z[: 2 * n + 1], n, z[2 * n + 1]))

        grad = np.empty(2 * n + 2)
        for i in range(2 * n + 2):
            h = FD_STEP * max(1.0, abs(y[i]))
            yp, ym = y.copy(), y.copy()
            yp[i] += h
            ym[i] -= h
            grad[i] = (value_of(yp) - value_of(ym)) / (2.0 * h)
        dS = 0.0 if not self.depends_on_S else grad[2 * n]
        dt = 0.0 if not self.depends_on_t else grad[2 * n + 1]
        return PartialDerivatives(grad[:n], grad[n:2 * n], dS, dt)


def evaluate(model: HamiltonianModel, x: ExtendedState) -> float:
    return model.evaluate(x)


def partials(model: HamiltonianModel, x: ExtendedState) -> PartialDerivatives:
    return model.partials(x)


# ---------------------------------------------------------------------------
# Built-in systems
# ---------------------------------------------------------------------------

def make_linear_dissipation(m: float, gamma: float, V) -> HamiltonianModel:
    """H = p^2/2m + V(q) + gamma*S, the one-dimensional linear-friction system."""
    if m <= 0:
        raise ValueError(f"mass must be positive, got m={m}")
    if gamma < 0:
        raise ValueError(f"damping rate must be non-negative, got gamma={gamma}")
    Vfn = as_scalar_fn(V, "V")

    def value(x: ExtendedState) -> float:
        q, p = x.q[0], x.p[0]
        return p * p / (2.0 * m) + Vfn(q) + gamma * x.S

    def parts(x: ExtendedState) -> PartialDerivatives:
        q, p = x.q[0], x.p[0]
        return PartialDerivatives([Vfn.derivative(q)], [p / m], gamma, 0.0)

    return HamiltonianModel(
        n=1, value=value, partials_fn=parts,
        depends_on_S=gamma > 0, depends_on_t=False,
        name="linear_dissipation",
        params={"m": m, "gamma": gamma, "V": Vfn},
        h_prime=lambda S: gamma,
    )


def make_damped_parametric(m: float, gamma: float, omega) -> HamiltonianModel:
    """H = p^2/2m + m w(t)^2 q^2 / 2 + gamma*S, the damped parametric oscillator.

    ``omega`` may be a number (constant frequency: damped harmonic oscillator,
    and the model is flagged time-independent), zero (damped free particle) or
    a time-dependent ScalarFunction/callable.
    """
    if m <= 0:
        raise ValueError(f"mass must be positive, got m={m}")
    if gamma < 0:
        raise ValueError(f"damping rate must be non-negative, got gamma={gamma}")
    wfn = as_scalar_fn(omega, "omega")

    def value(x: ExtendedState) -> float:
        q, p = x.q[0], x.p[0]
        w = wfn(x.t)
        return p * p / (2.0 * m) + 0.5 * m * w * w * q * q + gamma * x.S

    def parts(x: ExtendedState) -> PartialDerivatives:
        q, p = x.q[0], x.p[0]
        w = wfn(x.t)
        dt = m * w * wfn.derivative(x.t) * q * q
        return PartialDerivatives([m * w * w * q], [p / m], gamma, dt)

    return HamiltonianModel(
        n=1, value=value, partials_fn=parts,
        depends_on_S=gamma > 0, depends_on_t=not wfn.is_constant,
        name="damped_parametric",
        params={"m": m, "gamma": gamma, "omega": wfn},
        h_prime=lambda S: gamma,
    )


def make_caldirola_kanai(m: float, gamma: float, V) -> HamiltonianModel:
    """H = e^{-gamma t} p^2/2m + e^{gamma t} V(q), explicitly time dependent.

    The S-independent effective model for linear damping: integrated with the
    contact equations its (q, p) flow is the standard symplectic one, and q(t)
    obeys the same damped Newton equation as the linear-dissipation model.
    """
    if m <= 0:
        raise ValueError(f"mass must be positive, got m={m}")
    if gamma < 0:
        raise ValueError(f"damping rate must be non-negative, got gamma={gamma}")
    Vfn = as_scalar_fn(V, "V")

    def value(x: ExtendedState) -> float:
        q, p = x.q[0], x.p[0]
        return math.exp(-gamma * x.t) * p * p / (2.0 * m) + math.exp(gamma * x.t) * Vfn(q)

    def parts(x: ExtendedState) -> PartialDerivatives:
        q, p = x.q[0], x.p[0]
        em, ep = math.exp(-gamma * x.t), math.exp(gamma * x.t)
        dt = -gamma * em * p * p / (2.0 * m) + gamma * ep * Vfn(q)
        return PartialDerivatives([ep * Vfn.derivative(q)], [em * p / m], 0.0, dt)

    return HamiltonianModel(
        n=1, value=value, partials_fn=parts,
        depends_on_S=False, depends_on_t=gamma > 0,
        name="caldirola_kanai",
        params={"m": m, "gamma": gamma, "V": Vfn},
        h_prime=lambda S: 0.0,
    )


def make_custom(n: int, value, partials_fn=None, depends_on_S: bool = True,
                depends_on_t: bool = True, name: str = "custom",
                params: Optional[Mapping[str, Any]] = None,
                h_prime=None) -> HamiltonianModel:
    """Wrap arbitrary callables as a model; finite differences fill in partials."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return HamiltonianModel(
        n=int(n), value=value, partials_fn=partials_fn,
        depends_on_S=depends_on_S, depends_on_t=depends_on_t,
        name=name, params=dict(params or {}), h_prime=h_prime,
    )
