"""Analytic and semi-analytic machinery for the damped parametric oscillator.

Covers the auxiliary Ermakov amplitude alpha(t) and its phase integral, the
quadratic (Lewis-type) invariant and the S-dependent invariant, the closed
form of the motion built from them, the Riccati function C(t) driving the
quadratic Hamilton-Jacobi ansatz, and the coefficient construction for the
general quadratic invariant.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from .errors import (BranchError, ErmakovCollapseError, IntegrationError,
                     RiccatiPoleError)
from .model import ContactState, ExtendedState, ScalarFunction, as_scalar_fn

SOLVER_RTOL = 1e-10
SOLVER_ATOL = 1e-12
COLLAPSE_EPS = 1e-6      # Ermakov amplitude below this aborts (1/alpha^3 stiffness)
RICCATI_BLOWUP = 1e8     # |C| beyond this counts as a pole
SENSITIVITY_STEP = 1e-6  # relative step for dC/dC0 by paired initial conditions


def _internal_nodes(grid: np.ndarray) -> np.ndarray:
    """Union of the requested grid with a uniform refinement for interpolation."""
    t0, t1 = float(grid[0]), float(grid[-1])
    span = t1 - t0
    m = max(64, int(math.ceil(span / 0.01)))
    fine = np.linspace(t0, t1, m + 1)
    return np.union1d(np.asarray(grid, dtype=float), fine)


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be a 1-d array with at least two nodes")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    return grid


class _Dense:
    """Bundle of cubic Hermite interpolants over a common node set."""

    def __init__(self, ts: np.ndarray, t_range):
        self.ts = ts
        self.t_range = t_range

    def _check_t(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.t_range
        if np.any(t < lo - 1e-12) or np.any(t > hi + 1e-12):
            raise ValueError(f"t={t} outside the solved range [{lo}, {hi}]")
        return t


class ErmakovSolution(_Dense):
    """Dense solution of the damped-oscillator auxiliary (Ermakov) equation

        alpha'' + (omega(t)^2 - gamma^2/4) alpha = 1 / alpha^3,  alpha > 0,

    with the accumulated phase phi(t) = int_{t0}^{t} dtau / alpha(tau)^2.
    """

    def __init__(self, ts, alpha, alpha_dot, phase, gamma, omega: ScalarFunction,
                 alpha0, alpha_dot0, grid):
        super().__init__(ts, (float(ts[0]), float(ts[-1])))
        self.gamma = float(gamma)
        self.omega = omega
        self.alpha0 = float(alpha0)
        self.alpha_dot0 = float(alpha_dot0)
        self.grid = grid
        w = np.array([omega(float(t)) for t in ts])
        add = -(w * w - 0.25 * gamma * gamma) * alpha + alpha ** -3.0
        self._alpha = CubicHermiteSpline(ts, alpha, alpha_dot)
        self._alpha_dot = CubicHermiteSpline(ts, alpha_dot, add)
        self._phase = CubicHermiteSpline(ts, phase, alpha ** -2.0)

    def alpha(self, t):
        return self._alpha(self._check_t(t))[()]

    def alpha_dot(self, t):
        return self._alpha_dot(self._check_t(t))[()]

    def alpha_ddot(self, t):
        """Second derivative through the defining equation (exact given alpha)."""
        t = self._check_t(t)
        a = self._alpha(t)
        w = (np.array([self.omega(float(x)) for x in np.atleast_1d(t)])
             .reshape(np.shape(t)))
        return (-(w * w - 0.25 * self.gamma ** 2) * a + a ** -3.0)[()]

    def phase(self, t):
        """phi(t), measured from the grid origin; strictly increasing."""
        return self._phase(self._check_t(t))[()]

    def residual(self, t):
        """alpha'' + (omega^2 - gamma^2/4) alpha - 1/alpha^3 with alpha'' by
        central finite differences of the alpha' interpolant (step 1e-4)."""
        t = self._check_t(t)
        h = 1e-4
        add = (self._alpha_dot(t + h) - self._alpha_dot(t - h)) / (2 * h)
        a = self._alpha(t)
        w = (np.array([self.omega(float(x)) for x in np.atleast_1d(t)])
             .reshape(np.shape(t)))
        return (add + (w * w - 0.25 * self.gamma ** 2) * a - a ** -3.0)[()]


def solve_ermakov(omega, gamma: float, alpha0: float, alpha_dot0: float,
                  grid) -> ErmakovSolution:
    """Integrate the auxiliary equation together with its phase integral.

    Aborts with the collapse time if alpha(t) approaches zero (the 1/alpha^3
    term makes the equation stiff there).
    """
    grid = _check_grid(grid)
    if alpha0 <= 0:
        raise ValueError("alpha0 must be positive")
    wfn = as_scalar_fn(omega, "omega")
    g2 = 0.25 * gamma * gamma

    def rhs(t, y):
        a, ad, _phi = y
        w = wfn(t)
        return [ad, -(w * w - g2) * a + a ** -3.0, a ** -2.0]

    def collapse(t, y):
        return y[0] - COLLAPSE_EPS

    collapse.terminal = True
    collapse.direction = -1

    ts = _internal_nodes(grid)
    sol = solve_ivp(rhs, (ts[0], ts[-1]), [alpha0, alpha_dot0, 0.0],
                    t_eval=ts, rtol=SOLVER_RTOL, atol=SOLVER_ATOL,
                    events=collapse, method="RK45")
    if sol.status == 1:
        tc = float(sol.t_events[0][0])
        raise ErmakovCollapseError(
            f"Ermakov amplitude collapsed below {COLLAPSE_EPS:g} at t={tc:.6g}",
            last_time=tc)
    if not sol.success:
        raise IntegrationError(f"Ermakov solve failed: {sol.message}",
                               last_time=float(sol.t[-1]) if len(sol.t) else None)
    return ErmakovSolution(ts, sol.y[0], sol.y[1], sol.y[2], gamma, wfn,
                           alpha0, alpha_dot0, grid)


# ---------------------------------------------------------------------------
# Invariants
# ---------------------------------------------------------------------------

def lewis_invariant(m: float, gamma: float, erm: ErmakovSolution,
                    x: ExtendedState) -> float:
    """Quadratic invariant of the damped parametric oscillator.

    I = (m e^{gt}/2) [ (alpha p/m - [alpha' - g alpha/2] q)^2 + (q/alpha)^2 ];
    reduces to the classic parametric-oscillator invariant at gamma = 0.
    """
    if x.n != 1:
        raise ValueError("the quadratic invariant is defined for n = 1")
    q, p, t = x.q[0], x.p[0], x.t
    a = erm.alpha(t)
    u = erm.alpha_dot(t) - 0.5 * gamma * a
    A = a * p / m - u * q
    return 0.5 * m * math.exp(gamma * t) * (A * A + (q / a) ** 2)


def g_invariant(gamma: float, x: ExtendedState) -> float:
    """The S-dependent invariant G = e^{gt} (S - q p / 2)."""
    if x.n != 1:
        raise ValueError("the S-dependent invariant is defined for n = 1")
    return math.exp(gamma * x.t) * (x.S - 0.5 * x.q[0] * x.p[0])


def invariants_from_state(m: float, gamma: float, erm: ErmakovSolution,
                          x: ExtendedState):
    """(I, G, phi0) reproducing x through `analytic_state` at time x.t."""
    I = lewis_invariant(m, gamma, erm, x)
    G = g_invariant(gamma, x)
    q, p, t = x.q[0], x.p[0], x.t
    a = erm.alpha(t)
    u = erm.alpha_dot(t) - 0.5 * gamma * a
    A = a * p / m - u * q
    phi0 = math.atan2(-A, q / a) - erm.phase(t)
    return I, G, phi0


def analytic_state(m: float, gamma: float, erm: ErmakovSolution, I: float,
                   G: float, phi0: float, t: float,
                   growing_exponent: bool = False) -> ContactState:
    """Closed-form state of the damped parametric oscillator at time t.

        q(t) = sqrt(2 I / m) e^{-g t/2} alpha cos(phi)
        p(t) = sqrt(2 m I)  e^{-g t/2} [(alpha' - g alpha/2) cos(phi) - sin(phi)/alpha]
        S(t) = e^{-g t} G + q p / 2,    phi(t) = phi0 + int dtau / alpha^2.

    ``growing_exponent=True`` swaps the e^{-g t/2} prefactor for e^{+g t}; that
    variant violates constancy of the quadratic invariant whenever gamma > 0
    and is provided only so the failure can be demonstrated.
    """
    if I < 0:
        raise ValueError("the quadratic invariant must be non-negative")
    a = erm.alpha(t)
    u = erm.alpha_dot(t) - 0.5 * gamma * a
    phi = phi0 + erm.phase(t)
    pref = math.exp(gamma * t) if growing_exponent else math.exp(-0.5 * gamma * t)
    q = math.sqrt(2.0 * I / m) * pref * a * math.cos(phi)
    p = math.sqrt(2.0 * m * I) * pref * (u * math.cos(phi) - math.sin(phi) / a)
    S = math.exp(-gamma * t) * G + 0.5 * q * p
    return ContactState([q], [p], S)


def quadratic_invariant_coefficients(m: float, gamma: float, zeta0: float,
                                     erm: ErmakovSolution, t):
    """Coefficients (beta, eta, xi, zeta) of the quadratic invariant

        F = beta p^2 - 2 xi q p + eta q^2 + zeta S = I + zeta0 G.

    The xi term carries zeta0/4 (not a fixed 1/4): the coefficient system only
    closes for arbitrary zeta0 with that scaling, matching the decomposition
    into the two elementary invariants.
    """
    t = np.asarray(t, dtype=float)
    e = np.exp(gamma * t)
    a = np.asarray(erm.alpha(t))
    u = np.asarray(erm.alpha_dot(t)) - 0.5 * gamma * a
    beta = e * a * a / (2.0 * m)
    eta = e * 0.5 * m * (u * u + a ** -2.0)
    xi = e * (0.5 * a * u + 0.25 * zeta0)
    zeta = zeta0 * e
    return beta[()], eta[()], xi[()], zeta[()]


# ---------------------------------------------------------------------------
# Riccati route
# ---------------------------------------------------------------------------

class RiccatiSolution(_Dense):
    """Dense solution of C' = -C^2 - gamma C - omega(t)^2 together with the
    companion damped Newton solution lambda (lambda(t0)=1, lambda'(t0)=C0),
    linked by C = lambda'/lambda wherever lambda != 0."""

    def __init__(self, ts, C, lam, lam_dot, gamma, omega: ScalarFunction, C0, grid):
        super().__init__(ts, (float(ts[0]), float(ts[-1])))
        self.gamma = float(gamma)
        self.omega = omega
        self.C0 = float(C0)
        self.grid = grid
        w = np.array([omega(float(t)) for t in ts])
        self._C = CubicHermiteSpline(ts, C, -C * C - gamma * C - w * w)
        self._lam = CubicHermiteSpline(ts, lam, lam_dot)
        self._lam_dot = CubicHermiteSpline(ts, lam_dot, -gamma * lam_dot - w * w * lam)

    def C(self, t):
        return self._C(self._check_t(t))[()]

    def lam(self, t):
        return self._lam(self._check_t(t))[()]

    def lam_dot(self, t):
        return self._lam_dot(self._check_t(t))[()]

    def C_dot(self, t):
        """C' through the defining equation (exact given C)."""
        t = self._check_t(t)
        c = self._C(t)
        w = (np.array([self.omega(float(x)) for x in np.atleast_1d(t)])
             .reshape(np.shape(t)))
        return (-c * c - self.gamma * c - w * w)[()]


def _riccati_rhs(wfn, gamma):
    def rhs(t, y):
        C, lam, lam_dot = y
        w2 = wfn(t) ** 2
        return [-C * C - gamma * C - w2, lam_dot, -gamma * lam_dot - w2 * lam]
    return rhs


def solve_riccati(omega, gamma: float, C0: float, grid) -> RiccatiSolution:
    """Integrate the Riccati equation, detecting finite-time blow-up.

    Riccati solutions generically have poles (where the companion lambda
    vanishes); crossing one raises with the escape time rather than silently
    continuing on the far branch.
    """
    grid = _check_grid(grid)
    wfn = as_scalar_fn(omega, "omega")

    def blowup(t, y):
        return RICCATI_BLOWUP - abs(y[0])

    blowup.terminal = True
    blowup.direction = -1

    ts = _internal_nodes(grid)
    sol = solve_ivp(_riccati_rhs(wfn, gamma), (ts[0], ts[-1]), [C0, 1.0, C0],
                    t_eval=ts, rtol=SOLVER_RTOL, atol=SOLVER_ATOL,
                    events=blowup, method="RK45")
    if sol.status == 1:
        tp = float(sol.t_events[0][0])
        raise RiccatiPoleError(
            f"Riccati solution blew up (|C| > {RICCATI_BLOWUP:g}) at t={tp:.6g}",
            last_time=tp)
    if not sol.success:
        raise IntegrationError(f"Riccati solve failed: {sol.message}",
                               last_time=float(sol.t[-1]) if len(sol.t) else None)
    return RiccatiSolution(ts, sol.y[0], sol.y[1], sol.y[2], gamma, wfn, C0, grid)


def riccati_free_particle(gamma: float, C0: float, t):
    """Closed-form Riccati solution for the damped free particle (omega = 0):

        C(t) = e^{-g t} / (1/C0 + (1 - e^{-g t}) / g),  C(0) = C0.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive for the closed form")
    t = np.asarray(t, dtype=float)
    if C0 == 0.0:
        return np.zeros_like(t)[()]
    denom = 1.0 / C0 + (1.0 - np.exp(-gamma * t)) / gamma
    if C0 < 0 and np.any(denom >= 0):
        raise RiccatiPoleError(
            f"closed-form Riccati pole crossed before t={float(np.max(t)):.6g}")
    return (np.exp(-gamma * t) / denom)[()]


def riccati_sensitivity(omega, gamma: float, C0: float, grid,
                        delta: Optional[float] = None):
    """dC/dC0 as a dense callable, by paired solves at C0 +/- delta.

    The two initial conditions are advanced as one stacked system so that they
    share the adaptive step sequence; the centered difference then cancels the
    common local error instead of amplifying it by 1/delta.
    """
    grid = _check_grid(grid)
    wfn = as_scalar_fn(omega, "omega")
    if delta is None:
        delta = SENSITIVITY_STEP * max(1.0, abs(C0))

    def rhs(t, y):
        w2 = wfn(t) ** 2
        return -y * y - gamma * y - w2

    def blowup(t, y):
        return RICCATI_BLOWUP - float(np.max(np.abs(y)))

    blowup.terminal = True
    blowup.direction = -1

    ts = _internal_nodes(grid)
    sol = solve_ivp(rhs, (ts[0], ts[-1]), np.array([C0 + delta, C0 - delta]),
                    t_eval=ts, rtol=SOLVER_RTOL, atol=SOLVER_ATOL,
                    events=blowup, method="RK45")
    if sol.status == 1:
        tp = float(sol.t_events[0][0])
        raise RiccatiPoleError(
            f"Riccati pair blew up at t={tp:.6g} during sensitivity solve",
            last_time=tp)
    if not sol.success:
        raise IntegrationError(f"Riccati pair solve failed: {sol.message}")
    sens = (sol.y[0] - sol.y[1]) / (2.0 * delta)
    w2 = np.array([wfn(float(t)) ** 2 for t in ts])
    dsens = ((-sol.y[0] ** 2 - gamma * sol.y[0] - w2)
             - (-sol.y[1] ** 2 - gamma * sol.y[1] - w2)) / (2.0 * delta)
    return CubicHermiteSpline(ts, sens, dsens)


# ---------------------------------------------------------------------------
# Hamilton-Jacobi route
# ---------------------------------------------------------------------------

def hj_principal_function(m: float, C: float, lam: float, lam_dot: float, q):
    """The quadratic-ansatz solution of the contact Hamilton-Jacobi equation:

        S(q, t) = (m/2) C (q - lambda)^2 + m lambda' (q - lambda) + (m/2) lambda lambda'.
    """
    q = np.asarray(q, dtype=float)
    r = q - lam
    return (0.5 * m * C * r * r + m * lam_dot * r + 0.5 * m * lam * lam_dot)[()]


def trajectory_from_hj(m: float, gamma: float, b0: float, C0: float,
                       ric: RiccatiSolution, t):
    """Recover q(t) from the principal-function family via the constant b0:

        q(t) = sqrt( (2 b0 e^{-g (t - t0)} / m) / (dC/dC0)(t) ).

    The sensitivity dC/dC0 comes from paired Riccati solves; it must stay
    positive on the requested times (it does wherever C itself is finite).
    """
    if b0 <= 0:
        raise ValueError("b0 must be positive")
    if abs(ric.gamma - gamma) > 1e-12 or abs(ric.C0 - C0) > 1e-12:
        raise ValueError("gamma/C0 disagree with the supplied Riccati solution")
    t = np.asarray(t, dtype=float)
    sens = riccati_sensitivity(ric.omega, gamma, C0, ric.grid)(t)
    if np.any(sens <= 0):
        raise BranchError("dC/dC0 is not positive at the requested times")
    elapsed = t - ric.t_range[0]
    return np.sqrt(2.0 * b0 * np.exp(-gamma * elapsed) / (m * sens))[()]
