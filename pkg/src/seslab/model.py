"""Nondimensional n-agent resource/effort model and its integration engine."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp


class ParameterError(ValueError):
    """Raised when a parameter set violates a model invariant."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class IntegrationError(RuntimeError):
    """Raised when the integrator cannot advance; carries the last valid state."""

    def __init__(self, message, last_time, last_state):
        super().__init__(message)
        self.last_time = last_time
        self.last_state = last_state


def _frozen(values, dtype=float):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _check_weights(w, n, tol=1e-9):
    if w.shape != (n, n):
        raise ParameterError(f"weights must be {n}x{n}, got {w.shape}")
    if np.any(w < 0):
        raise ParameterError("weights must be nonnegative")
    if np.any(np.abs(np.diag(w)) > 0):
        raise ParameterError("weights must have a zero diagonal")
    if n > 1:
        rows = w.sum(axis=1)
        bad = np.flatnonzero(np.abs(rows - 1.0) > tol)
        if bad.size:
            raise ParameterError(f"weight row {int(bad[0])} sums to {rows[bad[0]]!r}, expected 1")


def complete_weights(n):
    """Uniform all-to-all weights w_ij = 1/(n-1)."""
    if n == 1:
        return np.zeros((1, 1))
    w = np.full((n, n), 1.0 / (n - 1))
    np.fill_diagonal(w, 0.0)
    return w


def star_weights(n, hub=0):
    """Hub spreads its attention uniformly over leaves; each leaf watches only the hub."""
    if n < 2:
        raise ParameterError("a star needs at least two nodes")
    w = np.zeros((n, n))
    for j in range(n):
        if j != hub:
            w[hub, j] = 1.0 / (n - 1)
            w[j, hub] = 1.0
    return w


@dataclass(frozen=True)
class DimensionalParams:
    carrying_capacity: float
    growth_rate: float
    attribution: np.ndarray
    social_value: np.ndarray
    scarcity_threshold: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        a = _frozen(np.atleast_1d(self.attribution))
        s = _frozen(np.atleast_1d(self.social_value))
        rhat = _frozen(np.atleast_1d(self.scarcity_threshold))
        n = a.size
        if s.size != n or rhat.size != n:
            raise ParameterError("per-agent arrays must share one length")
        w = _frozen(np.atleast_2d(self.weights))
        if not self.carrying_capacity > 0 or not self.growth_rate > 0:
            raise ParameterError("carrying capacity and growth rate must be positive")
        if np.any(a < 0) or np.any(s < 0):
            raise ParameterError("attribution and social value must be nonnegative")
        _check_weights(w, n)
        object.__setattr__(self, "attribution", a)
        object.__setattr__(self, "social_value", s)
        object.__setattr__(self, "scarcity_threshold", rhat)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the nondimensional system.

    ``alpha`` is derived as ``1 - nu`` so the two relevances can never disagree.
    """

    b: np.ndarray
    nu: np.ndarray
    rho: np.ndarray
    weights: np.ndarray = None
    alpha: np.ndarray = field(init=False)

    def __post_init__(self):
        b = _frozen(np.atleast_1d(self.b))
        nu = _frozen(np.atleast_1d(self.nu))
        rho = _frozen(np.atleast_1d(self.rho))
        n = b.size
        if nu.size != n or rho.size != n:
            raise ParameterError("b, nu and rho must share one length")
        if n < 1:
            raise ParameterError("need at least one agent")
        if not np.all(b > 0):
            raise ParameterError("susceptibilities b_i must be positive")
        if np.any(nu < 0) or np.any(nu > 1):
            raise ParameterError("social relevance nu_i must lie in [0, 1]")
        if not np.all(np.isfinite(rho)):
            raise ParameterError("environmentalism rho_i must be finite")
        w = complete_weights(n) if self.weights is None else np.atleast_2d(np.asarray(self.weights, float))
        _check_weights(w, n)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "alpha", _frozen(1.0 - nu))

    @property
    def n(self):
        return self.b.size

    def replace(self, **changes):
        fields = {"b": self.b, "nu": self.nu, "rho": self.rho, "weights": self.weights}
        fields.update(changes)
        return ModelParams(**fields)


@dataclass(frozen=True)
class SystemState:
    x: float
    y: np.ndarray

    def __post_init__(self):
        if not self.x >= 0:
            raise ParameterError(f"resource stock must be nonnegative, got {self.x!r}")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", _frozen(np.atleast_1d(self.y)))

    def as_vector(self):
        return np.concatenate(([self.x], self.y))


@dataclass(frozen=True)
class StepControl:
    rtol: float = 1e-7
    atol: float = 1e-9
    max_step: float = np.inf
    first_step: float | None = None


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    x: np.ndarray
    y: np.ndarray  # shape (n, len(times))
    params: ModelParams

    def __post_init__(self):
        if self.x.shape != self.times.shape or self.y.shape[1] != self.times.size:
            raise ParameterError("trajectory arrays have mismatched lengths")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ParameterError("trajectory times must be strictly increasing")

    @property
    def states(self):
        return [SystemState(self.x[k], self.y[:, k]) for k in range(self.times.size)]

    @property
    def final(self):
        return SystemState(self.x[-1], self.y[:, -1])

    def rows(self):
        return np.vstack([self.times, self.x, self.y]).T

    def header(self):
        return ["t", "x"] + [f"y_{i + 1}" for i in range(self.y.shape[0])]


def nondimensionalize(dim: DimensionalParams) -> ModelParams:
    a, s = dim.attribution, dim.social_value
    rmax, r = dim.carrying_capacity, dim.growth_rate
    total = a * rmax + r * s
    if np.any(total <= 0):
        i = int(np.flatnonzero(total <= 0)[0])
        raise ParameterError(f"agent {i} has zero attribution and zero social value")
    alpha = a * rmax / total
    return ModelParams(b=total / r**2, nu=1.0 - alpha, rho=dim.scarcity_threshold / rmax,
                       weights=dim.weights)


def _effort_rhs(params, x, y):
    w = params.weights
    social = w @ y
    spread = w.sum(axis=1) * y - social
    return params.b * (params.alpha * (x - params.rho) - params.nu * spread)


def rhs(params: ModelParams, state: SystemState):
    """Time derivative ``(dx, dy)`` at ``state``."""
    x, y = state.x, state.y
    dx = (1.0 - x) * x - x * y.sum()
    return dx, _effort_rhs(params, x, y)


def _make_system(params, extinct):
    if extinct:
        def f(t, u):
            return _effort_rhs(params, 0.0, u)
    else:
        # first coordinate is log x, which keeps x > 0 exactly
        def f(t, u):
            # rejected trial steps may overflow; the step controller discards them
            with np.errstate(over="ignore", invalid="ignore"):
                x = np.exp(u[0])
                y = u[1:]
                out = np.empty_like(u)
                out[0] = 1.0 - x - y.sum()
                out[1:] = _effort_rhs(params, x, y)
            return out
    return f


def _solve(params, init, t_span, t_eval, control, dense=False):
    extinct = init.x == 0.0
    u0 = init.y.copy() if extinct else np.concatenate(([np.log(init.x)], init.y))
    kw = dict(method="RK45", rtol=control.rtol, atol=control.atol, max_step=control.max_step)
    if control.first_step is not None:
        kw["first_step"] = control.first_step
    sol = solve_ivp(_make_system(params, extinct), t_span, u0, t_eval=t_eval,
                    dense_output=dense, **kw)
    if sol.status < 0 or not np.all(np.isfinite(sol.y)):
        last = sol.y[:, -1] if sol.y.size else u0
        ok = np.all(np.isfinite(last))
        t_last = sol.t[-1] if sol.t.size else t_span[0]
        state = _unpack(last, extinct) if ok else init
        raise IntegrationError(f"integration failed near t={t_last!r}: {sol.message}", t_last, state)
    return sol, extinct


def _unpack(u, extinct):
    if extinct:
        return SystemState(0.0, u)
    return SystemState(float(np.exp(u[0])), u[1:])


def integrate(params: ModelParams, init: SystemState, t_end: float,
              control: StepControl = StepControl(), t_eval=None, n_samples: int = 1001) -> Trajectory:
    """Integrate from ``init`` over ``[0, t_end]`` and sample the solution.

    Samples default to ``n_samples`` evenly spaced times; pass ``t_eval`` to choose them.
    """
    if not t_end > 0:
        raise ParameterError("t_end must be positive")
    if init.y.size != params.n:
        raise ParameterError("state dimension does not match the parameter set")
    if t_eval is None:
        t_eval = np.linspace(0.0, t_end, n_samples)
    t_eval = np.asarray(t_eval, float)
    sol, extinct = _solve(params, init, (0.0, t_end), t_eval, control)
    if extinct:
        x = np.zeros(sol.t.size)
        y = sol.y
    else:
        x = np.exp(sol.y[0])
        y = sol.y[1:]
    return Trajectory(times=sol.t, x=x, y=y, params=params)


@dataclass(frozen=True)
class ConvergenceCriteria:
    window: float = 10.0
    tol: float = 1e-8
    plateau_windows: int = 5
    horizon: float = 1e4
    samples_per_window: int = 101


@dataclass(frozen=True)
class SteadyStateResult:
    converged: bool
    state: SystemState
    time: float
    reason: str = ""
    variation: float = 0.0


# Near a fixed point the step controller hunts at the stability limit and leaves a noise
# floor of order rtol; the 1e-8 window criterion therefore needs tighter tolerances.
STEADY_CONTROL = StepControl(rtol=1e-10, atol=1e-12)


def steady_state(params: ModelParams, init: SystemState,
                 criteria: ConvergenceCriteria = ConvergenceCriteria(),
                 control: StepControl = STEADY_CONTROL) -> SteadyStateResult:
    """Integrate window by window until the windowed sup-norm variation drops below tolerance.

    A window whose variation stops shrinking for ``plateau_windows`` consecutive windows,
    while the long-run envelope is flat, is reported as an oscillation.
    """
    extinct = init.x == 0.0
    u = init.y.copy() if extinct else np.concatenate(([np.log(init.x)], init.y))
    f = _make_system(params, extinct)
    t = 0.0
    history = []
    kw = dict(method="RK45", rtol=control.rtol, atol=control.atol, max_step=control.max_step)
    while t < criteria.horizon:
        t1 = min(t + criteria.window, criteria.horizon)
        grid = np.linspace(t, t1, criteria.samples_per_window)
        sol = solve_ivp(f, (t, t1), u, t_eval=grid, **kw)
        if sol.status < 0 or not np.all(np.isfinite(sol.y)):
            raise IntegrationError(f"integration failed near t={t!r}: {sol.message}", t, _unpack(u, extinct))
        vals = sol.y.copy()
        if not extinct:
            vals[0] = np.exp(vals[0])
        var = float(np.max(vals.max(axis=1) - vals.min(axis=1)))
        u = sol.y[:, -1]
        t = t1
        history.append(var)
        if var < criteria.tol:
            return SteadyStateResult(True, _unpack(u, extinct), t, "converged", var)
        if _plateaued(history, criteria.plateau_windows):
            return SteadyStateResult(False, _unpack(u, extinct), t, "oscillation", var)
    return SteadyStateResult(False, _unpack(u, extinct), t, "time budget", history[-1])


def _plateaued(history, k):
    # Compare the envelope of the latest k windows with the k before; a decaying transient
    # shrinks it, a sustained orbit does not.
    if len(history) < 2 * k or len(history) < 20:
        return False
    recent = max(history[-k:])
    before = max(history[-2 * k:-k])
    older = max(history[-4 * k:-2 * k]) if len(history) >= 4 * k else before
    return recent >= 0.98 * before and before >= 0.98 * older
