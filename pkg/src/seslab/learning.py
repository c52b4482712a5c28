"""Best-response learning of environmentalism coupled to the dyad's resource dynamics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .games import best_response, best_response_slope, nash_equilibrium
from .model import IntegrationError, ParameterError, StepControl


@dataclass(frozen=True)
class LearningParams:
    nu1: float
    nu2: float
    b1: float = 1.0
    b2: float = 1.0

    def __post_init__(self):
        for name in ("nu1", "nu2"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ParameterError(f"{name} must lie in (0, 1), got {v!r}", name)
        for name in ("b1", "b2"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive", name)


@dataclass(frozen=True)
class LearningState:
    x: float
    y1: float
    y2: float
    rho1: float
    rho2: float

    def __post_init__(self):
        if not self.x >= 0:
            raise ParameterError(f"resource stock must be nonnegative, got {self.x!r}", "x")

    def as_vector(self):
        return np.array([self.x, self.y1, self.y2, self.rho1, self.rho2])


def rho_rhs(p: LearningParams, rho1, rho2):
    """Strategy drift toward the best response; independent of (x, y)."""
    return (best_response(p.nu1, p.nu2, rho2) - rho1,
            best_response(p.nu2, p.nu1, rho1) - rho2)


def learning_rhs(p: LearningParams, s: LearningState):
    x, y1, y2 = s.x, s.y1, s.y2
    dx = (1 - x) * x - (y1 + y2) * x
    dy1 = p.b1 * (1 - p.nu1) * (x - s.rho1) - p.b1 * p.nu1 * (y1 - y2)
    dy2 = p.b2 * (1 - p.nu2) * (x - s.rho2) - p.b2 * p.nu2 * (y2 - y1)
    dr1, dr2 = rho_rhs(p, s.rho1, s.rho2)
    return np.array([dx, dy1, dy2, dr1, dr2])


def learning_equilibrium(nu1, nu2):
    if not (0 < nu1 < 1 and 0 < nu2 < 1):
        raise ParameterError("social relevances must lie in (0, 1)")
    s = nu1 + nu2 + 2 * nu1 * nu2
    r1, r2 = nash_equilibrium(nu1, nu2)
    return LearningState(2 * nu1 * nu2 / s, nu1 / s, nu2 / s, r1, r2)


@dataclass(frozen=True)
class LearningStability:
    eigenvalues: tuple
    slope_product: float
    cond1: bool
    cond2: bool

    @property
    def stable(self):
        return self.cond1 and self.cond2

    def to_dict(self):
        return {
            "eigenvalues": [[float(np.real(e)), float(np.imag(e))] for e in self.eigenvalues],
            "slope_product": self.slope_product, "cond1": self.cond1, "cond2": self.cond2,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(complex(r, i) for r, i in d["eigenvalues"]), d["slope_product"],
                   d["cond1"], d["cond2"])


def learning_stability(p: LearningParams):
    """Verdict for the coupled system.

    cond1 is the susceptibility condition guaranteeing global stability of the
    resource subsystem at fixed rho. cond2 asks that the linear rho-subsystem,
    with matrix [[-1, s1], [s2, -1]], have eigenvalues -1 +- sqrt(s1*s2) in the
    open left half plane. Since s1*s2 = nu1*nu2 - (nu1 - nu2)^2/(4 nu1 nu2) < 1,
    cond2 holds throughout the open unit square; it is still evaluated.
    """
    s1 = best_response_slope(p.nu1, p.nu2)
    s2 = best_response_slope(p.nu2, p.nu1)
    prod = s1 * s2
    root = np.sqrt(complex(prod))
    eig = (-1 + root, -1 - root)
    cond1 = (p.b1 - p.b2) * (p.b1 * p.nu1 - p.b2 * p.nu2) + 4 * p.b1 * p.nu1 * p.b2 * p.nu2 > 0
    cond2 = max(e.real for e in eig) < 0
    return LearningStability(eig, float(prod), bool(cond1), bool(cond2))


@dataclass
class LearningTrajectory:
    t: np.ndarray
    states: np.ndarray  # shape (5, T): x, y1, y2, rho1, rho2

    @property
    def final(self):
        return LearningState(*map(float, self.states[:, -1]))

    def rows(self):
        return [tuple(float(v) for v in (t, *col)) for t, col in zip(self.t, self.states.T)]

    @staticmethod
    def header():
        return ("t", "x", "y1", "y2", "rho1", "rho2")


def simulate_learning(p: LearningParams, init: LearningState, t_end, control=None, n_samples=1001):
    """Integrate the five-dimensional system with the stock carried as ln x."""
    if not t_end > 0:
        raise ParameterError("t_end must be positive")
    control = control or StepControl()
    extinct = init.x == 0

    def rhs(t, v):
        if extinct:
            x = 0.0
            dl = 0.0
        else:
            x = math.exp(v[0])
            dl = 1 - x - v[1] - v[2]
        d = learning_rhs(p, LearningState(x, v[1], v[2], v[3], v[4]))
        return [dl, d[1], d[2], d[3], d[4]]

    v0 = [0.0 if extinct else math.log(init.x), init.y1, init.y2, init.rho1, init.rho2]
    t_eval = np.linspace(0.0, t_end, n_samples)
    with np.errstate(over="ignore", invalid="ignore"):
        sol = solve_ivp(rhs, (0.0, t_end), v0, t_eval=t_eval, rtol=control.rtol,
                        atol=control.atol, max_step=control.max_step)
    if sol.status != 0:
        raise IntegrationError(sol.message, float(sol.t[-1]) if sol.t.size else 0.0, None)
    states = sol.y.copy()
    states[0] = 0.0 if extinct else np.exp(sol.y[0])
    return LearningTrajectory(sol.t, states)
