"""Local and global stability verdicts plus a simulation-backed oracle."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .equilibria import equilibrium, equilibrium_dual, equilibrium_single
from .model import (ConvergenceCriteria, IntegrationError, ModelParams, ParameterError,
                    SystemState, steady_state)

DEGENERATE_NODE_RTOL = 1e-9


@dataclass(frozen=True)
class StabilityReport:
    local: str
    eigenvalues: tuple
    global_condition: str = "not_applicable"
    values: dict = field(default_factory=dict)
    oracle: float | None = None

    def to_dict(self):
        return {
            "local": self.local,
            "eigenvalues": [[float(np.real(e)), float(np.imag(e))] for e in self.eigenvalues],
            "global_condition": self.global_condition,
            "values": dict(self.values),
            "oracle": self.oracle,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(local=d["local"], eigenvalues=tuple(complex(r, i) for r, i in d["eigenvalues"]),
                   global_condition=d["global_condition"], values=dict(d["values"]),
                   oracle=d["oracle"])


def jacobian(params: ModelParams, state: SystemState):
    """Jacobian of the full (x, y) vector field at ``state``."""
    n = params.n
    x, y = state.x, state.y
    w = params.weights
    jac = np.zeros((n + 1, n + 1))
    jac[0, 0] = 1.0 - 2.0 * x - y.sum()
    jac[0, 1:] = -x
    jac[1:, 0] = params.b * params.alpha
    lap = np.diag(w.sum(axis=1)) - w
    jac[1:, 1:] = -(params.b * params.nu)[:, None] * lap
    return jac


def locally_stable(params: ModelParams, state: SystemState | None = None, margin=0.0):
    """True when every Jacobian eigenvalue at the equilibrium has real part below ``-margin``."""
    if state is None:
        rep = equilibrium(params)
        if not rep.exists or rep.family:
            return False
        state = rep.state
    ev = np.linalg.eigvals(jacobian(params, state))
    return bool(np.all(ev.real < -margin))


def classify_single(params: ModelParams) -> StabilityReport:
    if params.n != 1:
        raise ParameterError("single-agent classification needs n = 1")
    b, alpha, rho = float(params.b[0]), float(params.alpha[0]), float(params.rho[0])
    if rho <= 0:
        return StabilityReport("inconclusive", (), "not_applicable", {"reason": "no interior equilibrium"})
    disc = rho * rho - 4.0 * b * alpha * rho
    root = np.sqrt(complex(disc))
    eig = (-rho / 2 + root / 2, -rho / 2 - root / 2)
    gap = rho - 4.0 * b * alpha
    if abs(gap) < DEGENERATE_NODE_RTOL * max(rho, 4.0 * b * alpha):
        local = "stable_degenerate"
    elif gap > 0:
        local = "stable_node"
    else:
        local = "stable_spiral"
    return StabilityReport(local, eig, "holds", {"rho_minus_4b_alpha": gap})


def lyapunov_single(params: ModelParams, x, y):
    """Lyapunov function and its time derivative for the single-agent system.

    Works on arrays; ``x`` must be positive.
    """
    b, alpha, rho = float(params.b[0]), float(params.alpha[0]), float(params.rho[0])
    p = np.log(x) - np.log(rho)
    q = np.asarray(y) - (1.0 - rho)
    v = np.exp(p) - p - 1.0 + q * q / (2.0 * b * alpha * rho)
    v_dot = -rho * (np.exp(p) - 1.0) ** 2
    return v, v_dot


def global_single(params: ModelParams) -> StabilityReport:
    rep = classify_single(params)
    if params.rho[0] <= 0:
        return rep
    return StabilityReport(rep.local, rep.eigenvalues, "holds",
                           {"lyapunov": "V = (e^p - p - 1) + q^2/(2 b alpha rho), p = ln(x/rho), q = y - (1 - rho)"})


def _dual_terms(params):
    if params.n != 2:
        raise ParameterError("dual analysis needs n = 2")
    b1, b2 = params.b
    n1, n2 = params.nu
    r1, r2 = params.rho
    return b1, b2, n1, n2, r1, r2


def routh_quantities(params: ModelParams):
    """Closed-form local condition and the sufficient chain built on ``q(b1/b2)``."""
    b1, b2, n1, n2, r1, r2 = _dual_terms(params)
    a1, a2 = 1 - n1, 1 - n2
    s = a2 * n1 + a1 * n2
    closed = (b1 + b2) / s**2 * ((b1 * n1 + b2 * n2) * s + a2 * n1 * r2 + a1 * n2 * r1) - 2 * b1 * b2
    ratio = b1 / b2
    lin = n1 * (2 * n2 - 1) + n2 * (2 * n1 - 1)
    q = n1 * ratio**2 + lin * ratio + n2
    disc = lin**2 - 4 * n1 * n2
    if disc < 0:
        branch = "complex_roots"
    elif -lin > 0:
        roots = np.sort(np.roots([n1, lin, n2]).real)
        branch = "between_roots" if roots[0] < ratio < roots[1] else "outside_roots"
    else:
        branch = "nonpositive_roots"
    return {
        "closed_form": float(closed),
        "sufficient_lhs": float((b1 + b2) * (b1 * n1 + b2 * n2) / s - 2 * b1 * b2),
        "q_of_ratio": float(q),
        "q_discriminant": float(disc),
        "q_linear_coefficient": float(lin),
        "sufficient_branch": branch,
    }


def stability_guaranteed_for_all_ratios(nu1, nu2):
    """True when the sufficient polynomial is positive for every susceptibility ratio."""
    lin = nu1 * (2 * nu2 - 1) + nu2 * (2 * nu1 - 1)
    return lin**2 - 4 * nu1 * nu2 < 0 or lin >= 0


def routh_dual(params: ModelParams) -> StabilityReport:
    """Exact Routh test on the Jacobian's characteristic cubic, with the closed-form chain attached."""
    rep = equilibrium_dual(params)
    if not rep.exists or rep.family:
        raise ParameterError(f"no isolated equilibrium: {rep.reason}")
    jac = jacobian(params, rep.state)
    _, c1, c2, c3 = np.poly(jac)
    stable = c1 > 0 and c3 > 0 and c1 * c2 > c3
    values = routh_quantities(params)
    values.update({"c1": float(c1), "c2": float(c2), "c3": float(c3),
                   "routh_margin": float(c1 * c2 - c3)})
    ev = tuple(np.linalg.eigvals(jac))
    return StabilityReport("routh_stable" if stable else "routh_unstable", ev, "not_applicable", values)


@dataclass(frozen=True)
class LyapunovCoefficients:
    A: float
    a: float
    B: float
    b: float
    D: float
    d: float


def lyapunov_coefficients(params: ModelParams) -> LyapunovCoefficients:
    b1, b2, n1, n2, r1, r2 = _dual_terms(params)
    return LyapunovCoefficients(
        A=b1 * (1 - n1) + b2 * (1 - n2),
        a=b1 * (1 - n1) - b2 * (1 - n2),
        B=b1 * n1 + b2 * n2,
        b=-b1 * n1 + b2 * n2,
        D=b1 * (1 - n1) * (1 - r1) + b2 * (1 - n2) * (1 - r2),
        d=-b1 * (1 - n1) * (1 - r1) + b2 * (1 - n2) * (1 - r2),
    )


def lyapunov_dual(params: ModelParams) -> StabilityReport:
    c = lyapunov_coefficients(params)
    b1, b2, n1, n2, _, _ = _dual_terms(params)
    margin = c.B**2 - c.a * c.b
    sufficient = (b1 - b2) * (b1 * n1 - b2 * n2) + 4 * b1 * n1 * b2 * n2
    values = {"B2_minus_ab": float(margin), "sufficient_lhs": float(sufficient),
              "sufficient_holds": bool(sufficient > 0)}
    return StabilityReport("inconclusive", (), "holds" if margin > 0 else "fails", values)


def stability_oracle(params: ModelParams, n_trials=5, scale=0.1, rng=None, tol=1e-5,
                     criteria: ConvergenceCriteria = ConvergenceCriteria()):
    """Fraction of perturbed starts that settle back onto the equilibrium.

    The stock is perturbed multiplicatively so it stays positive; efforts additively.
    """
    rep = equilibrium(params)
    if not rep.exists or rep.family:
        raise ParameterError(f"oracle needs an isolated equilibrium: {rep.reason}")
    rng = np.random.default_rng(rng)
    target = rep.state.as_vector()
    hits = 0
    for _ in range(n_trials):
        x0 = rep.x_bar * float(np.exp(scale * rng.standard_normal()))
        y0 = np.asarray(rep.y_bar) + scale * rng.standard_normal(params.n)
        try:
            res = steady_state(params, SystemState(x0, y0), criteria)
        except IntegrationError:
            continue
        if res.converged and np.max(np.abs(res.state.as_vector() - target)) < tol:
            hits += 1
    return hits / n_trials if n_trials else 1.0


def stability_grid(b1, b2, rho1, rho2, nu_values):
    """Routh verdict over a (nu1, nu2) grid; rows of (nu1, nu2, verdict)."""
    rows = []
    for n1 in nu_values:
        for n2 in nu_values:
            p = ModelParams(b=[b1, b2], nu=[n1, n2], rho=[rho1, rho2], weights=[[0, 1], [1, 0]])
            try:
                verdict = routh_dual(p).local
            except ParameterError:
                verdict = "undefined"
            rows.append((float(n1), float(n2), verdict))
    return rows


__all__ = [
    "StabilityReport", "LyapunovCoefficients", "jacobian", "locally_stable", "classify_single",
    "lyapunov_single", "global_single", "routh_quantities", "routh_dual", "lyapunov_coefficients",
    "lyapunov_dual", "stability_oracle", "stability_grid", "stability_guaranteed_for_all_ratios",
]
