"""Closed-form fixed points for the single, dyadic, well-mixed and star topologies."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np

from .model import (ConvergenceCriteria, ModelParams, ParameterError, SystemState,
                    complete_weights, star_weights, steady_state)

ZERO_EFFORT_TOL = 1e-10
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class EquilibriumReport:
    exists: bool
    reason: str
    x_bar: float | None = None
    y_bar: tuple = ()
    classification: str = ""
    riders: tuple = ()
    subsidizers: tuple = ()
    source: str = ""
    family: bool = False
    others: tuple = field(default_factory=tuple)  # additional isolated equilibria as (x, y...) tuples
    notes: tuple = ()

    def to_dict(self):
        return {
            "exists": self.exists,
            "reason": self.reason,
            "x_bar": self.x_bar,
            "y_bar": list(self.y_bar),
            "classification": self.classification,
            "riders": list(self.riders),
            "subsidizers": list(self.subsidizers),
            "source": self.source,
            "family": self.family,
            "others": [list(o) for o in self.others],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(exists=d["exists"], reason=d["reason"], x_bar=d["x_bar"],
                   y_bar=tuple(d["y_bar"]), classification=d["classification"],
                   riders=tuple(d["riders"]), subsidizers=tuple(d["subsidizers"]),
                   source=d["source"], family=d["family"],
                   others=tuple(tuple(o) for o in d["others"]), notes=tuple(d["notes"]))

    @property
    def state(self):
        return SystemState(self.x_bar, np.array(self.y_bar))


def classify_efforts(y, tol=ZERO_EFFORT_TOL):
    """Free-riding label from effort signs alone.

    Returns ``(label, riders, subsidizers)``; riders harvest (positive effort) while some
    other agent restores (negative effort).
    """
    y = np.asarray(y, float)
    if np.any(np.abs(y) <= tol):
        return "boundary", (), ()
    pos = tuple(int(i) for i in np.flatnonzero(y > 0))
    neg = tuple(int(i) for i in np.flatnonzero(y < 0))
    if not neg:
        return "self_reliant", (), ()
    if not pos:
        return "restorative", (), ()
    return "free_riding", pos, neg


def _report(x, y, source, notes=()):
    y = tuple(float(v) for v in y)
    label, riders, subs = classify_efforts(y)
    return EquilibriumReport(True, "unique equilibrium", float(x), y, label, riders, subs,
                             source, notes=tuple(notes))


def _none(reason, source):
    return EquilibriumReport(False, reason, source=source)


def _family(reason, source, x=None, y=(), others=()):
    return EquilibriumReport(True, reason, x, tuple(y), "", (), (), source, family=True,
                             others=tuple(others))


def equilibrium_single(params: ModelParams) -> EquilibriumReport:
    if params.n != 1:
        raise ParameterError("single-agent equilibrium needs n = 1")
    rho = float(params.rho[0])
    if rho < 0:
        return _none("negative environmentalism unreachable", "closed_form_1")
    notes = ("negative aggregate effort",) if rho > 1 else ()
    return _report(rho, [1.0 - rho], "closed_form_1", notes)


def _is_dyad(params):
    return params.n == 2 and np.allclose(params.weights, [[0, 1], [1, 0]])


def equilibrium_dual(params: ModelParams) -> EquilibriumReport:
    if not _is_dyad(params):
        raise ParameterError("dual equilibrium needs a two-agent dyad")
    n1, n2 = params.nu
    r1, r2 = params.rho
    a1, a2 = 1.0 - n1, 1.0 - n2
    src = "closed_form_2"
    if abs(n1) <= DEGENERATE_TOL and abs(n2) <= DEGENERATE_TOL:
        if abs(r1 - r2) <= DEGENERATE_TOL:
            return _family("infinitely many equilibria: x = rho, y_1 + y_2 = 1 - rho", src,
                           x=float(r1))
        return _none("no equilibrium exists: purely ecological agents with different rho", src)
    if abs(n1 - 1) <= DEGENERATE_TOL and abs(n2 - 1) <= DEGENERATE_TOL:
        return _family("infinitely many equilibria: y_1 = y_2, x = 1 - 2 y_1", src)
    s = a2 * n1 + a1 * n2
    x = (a1 * n2 * r1 + a2 * n1 * r2) / s
    y1 = ((1 - r1) * a1 * n2 + (1 - r2) * a2 * n1 - (r1 - r2) * a1 * a2) / (2 * s)
    y2 = ((1 - r1) * a1 * n2 + (1 - r2) * a2 * n1 - (r2 - r1) * a1 * a2) / (2 * s)
    return _report(x, [y1, y2], src)


def _prod_except(nu, *skip):
    return prod(float(nu[k]) for k in range(len(nu)) if k not in skip)


def _is_zero(v):
    return abs(v) <= DEGENERATE_TOL


def _society_branches(nu, rho, src, n):
    """Named degenerate societies shared by the well-mixed and star closed forms."""
    if all(_is_zero(v - 1) for v in nu):
        return None  # handled by the caller, results differ per topology
    if all(_is_zero(v) for v in nu):
        if all(_is_zero(r - rho[0]) for r in rho):
            others = ((0.0,) + (0.0,) * n,) if _is_zero(rho[0]) else ()
            return _family("minimally social society: x = rho, sum of efforts = 1 - rho",
                           src, x=float(rho[0]), others=others)
        return _none("minimally social society with unequal rho: no equilibrium exists", src)
    if all(_is_zero(r) for r in rho):
        return _family("minimally environmental society: x = 0 with equal efforts", src, x=0.0)
    return False


def equilibrium_well_mixed(params: ModelParams) -> EquilibriumReport:
    n = params.n
    if n < 2 or not np.allclose(params.weights, complete_weights(n)):
        raise ParameterError("well-mixed equilibrium needs uniform complete weights")
    nu, rho = params.nu, params.rho
    src = "closed_form_well_mixed"
    if all(_is_zero(v - 1) for v in nu):
        return _family("maximally social society: equal efforts y, x = 1 - n y; also x = 0",
                       src)
    branch = _society_branches(nu, rho, src, n)
    if branch is not False:
        return branch
    if sum(_is_zero(v) for v in nu) > 1:
        return _none("violated: more than one agent with zero social relevance", src)
    idx = range(n)
    d = n * _prod_except(nu) - sum(_prod_except(nu, j) for j in idx)
    x = sum(rho[i] * (nu[i] - 1) * _prod_except(nu, i) for i in idx) / d
    y = []
    for i in idx:
        others = [j for j in idx if j != i]
        s1 = sum(_prod_except(nu, i, j) for j in others)
        t1 = rho[i] * (nu[i] - 1) * ((1 - n) * s1 + n * (n - 2) * _prod_except(nu, i))
        t2 = (1 - n + n * nu[i]) * sum(rho[j] * (nu[j] - 1) * _prod_except(nu, i, j) for j in others)
        y.append(1.0 / n + (t1 - t2) / (n * d))
    return _report(x, y, src)


def equilibrium_star(params: ModelParams) -> EquilibriumReport:
    """Star with the hub at index 0.

    The hub effort uses the product form; each leaf is tied to the hub by its own
    balance ``y_i = y_hub + (1 - nu_i)(x - rho_i) / nu_i``.
    """
    n = params.n
    if n < 2 or not np.allclose(params.weights, star_weights(n, 0)):
        raise ParameterError("star equilibrium needs hub 0 linked to every leaf and no leaf-leaf ties")
    nu, rho = params.nu, params.rho
    src = "closed_form_star"
    if all(_is_zero(v - 1) for v in nu):
        return _family("maximally social society: two isolated equilibria", src,
                       others=((1.0,) + (0.0,) * n, (0.0,) + (0.0,) * n))
    branch = _society_branches(nu, rho, src, n)
    if branch is not False:
        return branch
    leaves = range(1, n)
    d = (2 * (n - 1) * _prod_except(nu) - sum(_prod_except(nu, j) for j in leaves)
         - (n - 1) * _prod_except(nu, 0))
    if _is_zero(d):
        return _none("singular balance: more than one agent with zero social relevance", src)
    num = ((n - 1) * rho[0] * (nu[0] - 1) * _prod_except(nu, 0)
           + sum(rho[i] * (nu[i] - 1) * _prod_except(nu, i) for i in leaves))
    x = num / d
    s_hub = -sum(_prod_except(nu, 0, j) for j in leaves) + (n - 2) * _prod_except(nu, 0)
    t2 = (1 - n + n * nu[0]) * sum(rho[j] * (nu[j] - 1) * _prod_except(nu, 0, j) for j in leaves)
    y_hub = 1.0 / n + ((n - 1) * rho[0] * (nu[0] - 1) * s_hub - t2) / (n * d)
    y = [y_hub] + [0.0] * (n - 1)
    unsocial = [i for i in leaves if _is_zero(nu[i])]
    for i in leaves:
        if i not in unsocial:
            y[i] = y_hub + (1 - nu[i]) * (x - rho[i]) / nu[i]
    if unsocial:
        # a single unsocial leaf pins x to its own rho; conservation fixes its effort
        i = unsocial[0]
        y[i] = 1.0 - x - (sum(y) - y[i])
    return _report(x, y, src)


def equilibrium_numerical(params: ModelParams, init: SystemState | None = None,
                          criteria: ConvergenceCriteria = ConvergenceCriteria()) -> EquilibriumReport:
    """Steady state by simulation; failure to converge does not assert nonexistence."""
    if init is None:
        init = SystemState(0.5, np.zeros(params.n))
    res = steady_state(params, init, criteria)
    if not res.converged:
        return _none(f"no convergence ({res.reason}); existence not established", "numerical")
    return _report(res.state.x, res.state.y, "numerical")


def equilibrium(params: ModelParams) -> EquilibriumReport:
    """Dispatch on topology, falling back to simulation for unrecognized networks."""
    n = params.n
    if n == 1:
        return equilibrium_single(params)
    if _is_dyad(params):
        return equilibrium_dual(params)
    if np.allclose(params.weights, complete_weights(n)):
        return equilibrium_well_mixed(params)
    if n > 2 and np.allclose(params.weights, star_weights(n, 0)):
        return equilibrium_star(params)
    return equilibrium_numerical(params)


# comparative statics ---------------------------------------------------------------

VARIABLES = ("x_bar", "y_bar_1", "y_bar_2")
PARAMETERS = ("nu_1", "nu_2", "rho_1", "rho_2")


def dual_partials(nu1, nu2, rho1, rho2):
    """Analytic partial derivatives of the dyadic equilibrium, keyed by (variable, parameter)."""
    s = nu1 + nu2 - 2 * nu1 * nu2
    if s <= 0:
        raise ParameterError("comparative statics undefined for degenerate social relevances")
    dr = rho1 - rho2
    s2 = s * s
    return {
        ("x_bar", "nu_1"): -dr * nu2 * (1 - nu2) / s2,
        ("x_bar", "nu_2"): dr * nu1 * (1 - nu1) / s2,
        ("x_bar", "rho_1"): (1 - nu1) * nu2 / s,
        ("x_bar", "rho_2"): (1 - nu2) * nu1 / s,
        ("y_bar_1", "nu_1"): (1 - nu2) * dr / (2 * s2),
        ("y_bar_1", "nu_2"): (1 - nu1) * (1 - 2 * nu1) * dr / (2 * s2),
        ("y_bar_1", "rho_1"): -(1 - nu1) / (2 * s),
        ("y_bar_1", "rho_2"): -(2 * nu1 - 1) * (1 - nu2) / (2 * s),
        ("y_bar_2", "nu_1"): (1 - nu2) * (2 * nu2 - 1) * dr / (2 * s2),
        ("y_bar_2", "nu_2"): -(1 - nu1) * dr / (2 * s2),
        ("y_bar_2", "rho_1"): -(1 - nu1) * (2 * nu2 - 1) / (2 * s),
        ("y_bar_2", "rho_2"): -(1 - nu2) / (2 * s),
    }


def _sign(v, tol=1e-12):
    if abs(v) <= tol:
        return "0"
    return "+" if v > 0 else "-"


def comparative_statics_dual(nu1, nu2, rho1, rho2):
    """Sign of every partial at one parameter point."""
    return {k: _sign(v) for k, v in dual_partials(nu1, nu2, rho1, rho2).items()}


def comparative_statics_regimes(samples=400, seed=0):
    """Sign table per rho-ordering regime; entries whose sign varies become '?'.

    Every regime is probed on a random cloud of (nu_1, nu_2) in the open unit square.
    """
    rng = np.random.default_rng(seed)
    tables = {}
    for regime in ("rho1=rho2", "rho1>rho2", "rho1<rho2"):
        seen = {}
        for _ in range(samples):
            nu1, nu2 = rng.uniform(0.01, 0.99, 2)
            lo, hi = np.sort(rng.uniform(0.0, 1.0, 2))
            if regime == "rho1=rho2":
                r1 = r2 = lo
            elif regime == "rho1>rho2":
                r1, r2 = hi, lo
            else:
                r1, r2 = lo, hi
            for k, s in comparative_statics_dual(nu1, nu2, r1, r2).items():
                seen.setdefault(k, set()).add(s)
        tables[regime] = {k: (next(iter(v)) if len(v) == 1 else "?") for k, v in seen.items()}
    return tables
