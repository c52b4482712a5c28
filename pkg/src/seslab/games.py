"""Two-player consumption games built on the dyad's steady state.

Payoffs are steady-state harvests pi_i = x_bar * y_bar_i. Strategies are
environmentalism levels rho_i; social relevances are treated as fixed
parameters in the continuous game and bundled with rho in the discrete one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .equilibria import equilibrium_dual
from .model import ModelParams, ParameterError
from .stability import stability_guaranteed_for_all_ratios

TIE_RTOL = 1e-9

_DYAD_W = np.array([[0.0, 1.0], [1.0, 0.0]])


def _check_nu(*nus, allow_one=False):
    for v in nus:
        if not (0 < v < 1 or (allow_one and v == 1)):
            raise ParameterError(f"social relevance must lie in (0, 1), got {v!r}")


def payoffs(nu1, nu2, rho1, rho2):
    """(pi_1, pi_2) read off the dyad's closed-form equilibrium."""
    params = ModelParams(b=[1.0, 1.0], nu=[nu1, nu2], rho=[rho1, rho2], weights=_DYAD_W)
    rep = equilibrium_dual(params)
    if not rep.exists or rep.family:
        raise ParameterError(f"no isolated equilibrium at this profile: {rep.reason}")
    return rep.x_bar * rep.y_bar[0], rep.x_bar * rep.y_bar[1]


def best_response(nu_i, nu_j, rho_j):
    """Player i's payoff-maximising rho_i against rho_j."""
    if nu_j == 0:
        raise ParameterError("best response undefined for nu_j = 0")
    if nu_i == 1:
        raise ParameterError("best response undefined for nu_i = 1")
    lead = (1 - nu_j) * (rho_j - nu_j * (1 - rho_j)) / (2 * nu_j)
    return lead / (nu_i - 1) + (rho_j + nu_j * (1 - rho_j) * (2 * nu_j - 1)) / (2 * nu_j)


def best_response_slope(nu_i, nu_j):
    """d BR_i / d rho_j; the map is affine in rho_j."""
    return best_response(nu_i, nu_j, 1.0) - best_response(nu_i, nu_j, 0.0)


def nash_equilibrium(nu1, nu2):
    _check_nu(nu1, nu2)
    s = nu1 + nu2 + 2 * nu1 * nu2
    r1 = nu1 * (3 * nu2 - nu1 - 2 * nu1 * nu2) / ((1 - nu1) * s)
    r2 = nu2 * (3 * nu1 - nu2 - 2 * nu1 * nu2) / ((1 - nu2) * s)
    return r1, r2


def iterate_best_response(maps, start, tol=1e-13, max_iter=10_000):
    """Simultaneous fixed-point iteration q <- (BR_1(q_2), BR_2(q_1)).

    ``maps`` is a pair of callables taking the opponent's strategy.
    Returns (point, iterations); raises when the sequence does not settle.
    """
    q1, q2 = start
    for k in range(1, max_iter + 1):
        n1, n2 = maps[0](q2), maps[1](q1)
        if max(abs(n1 - q1), abs(n2 - q2)) <= tol * max(1.0, abs(n1), abs(n2)):
            return (n1, n2), k
        q1, q2 = n1, n2
    raise RuntimeError(f"best-response iteration did not converge in {max_iter} steps")


def nash_by_iteration(nu1, nu2, start=0.5, tol=1e-14, max_iter=100_000):
    """Nash point as the fixed point of r1 -> BR_1(BR_2(r1)).

    The composite map is affine with slope p = s1*s2 < 1, but p may fall far
    below -1. Half-step damping r <- (r + F(r))/2 contracts for p >= -1; for
    p < -1 the inverse composite (slope 1/p, same fixed point) is damped
    instead. Returns ((rho1, rho2), iterations).
    """
    _check_nu(nu1, nu2)
    br1 = lambda r2: best_response(nu1, nu2, r2)
    br2 = lambda r1: best_response(nu2, nu1, r1)
    s1, s2 = best_response_slope(nu1, nu2), best_response_slope(nu2, nu1)
    p = s1 * s2
    if p >= 1:
        raise RuntimeError("best-response composite is not contractible by damping")
    if p >= -1:
        comp = lambda r: br1(br2(r))
    else:
        inv1 = lambda r1: (r1 - br1(0.0)) / s1
        inv2 = lambda r2: (r2 - br2(0.0)) / s2
        comp = lambda r: inv2(inv1(r))
    r = start
    for k in range(1, max_iter + 1):
        nxt = 0.5 * (r + comp(r))
        if abs(nxt - r) <= tol * max(1.0, abs(nxt)):
            return (nxt, br2(nxt)), k
        r = nxt
    raise RuntimeError(f"best-response iteration did not converge in {max_iter} steps")


@dataclass(frozen=True)
class WelfareLine:
    """Coefficients of A*rho_1 + B*rho_2 + C = 0."""

    a: float
    b: float
    c: float

    def residual(self, r1, r2):
        return self.a * r1 + self.b * r2 + self.c

    def distance(self, r1, r2):
        return abs(self.residual(r1, r2)) / math.hypot(self.a, self.b)


def welfare_optimal_line(nu1, nu2):
    return WelfareLine(2 * nu2 * (1 - nu1), 2 * nu1 * (1 - nu2),
                       -nu1 * (1 - nu2) - nu2 * (1 - nu1))


@dataclass(frozen=True)
class TragicnessReport:
    nash: tuple
    line: WelfareLine
    tragicness: float

    def to_dict(self):
        return {"nash": list(self.nash), "line": [self.line.a, self.line.b, self.line.c],
                "tragicness": self.tragicness}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["nash"]), WelfareLine(*d["line"]), d["tragicness"])


def tragicness(nu1, nu2):
    nash = nash_equilibrium(nu1, nu2)
    line = welfare_optimal_line(nu1, nu2)
    return TragicnessReport(nash, line, line.distance(*nash))


# ordinal pattern of player 1's payoffs at (CC, CD, DC, DD), 4 = best
GAME_TYPES = {
    (3, 1, 4, 2): 1,
    (4, 1, 3, 2): 2,
    (3, 2, 4, 1): 3,
    (2, 1, 4, 3): 4,
    (1, 2, 4, 3): 5,
    (2, 3, 4, 1): 6,
    (4, 2, 3, 1): 7,
    (1, 3, 4, 2): 8,
    (1, 2, 3, 4): 9,
}
TRAGIC_TYPES = frozenset({1, 2, 3})
PROFILES = ("CC", "CD", "DC", "DD")


@dataclass
class DiscreteGame:
    rho_L: float
    rho_H: float
    nu_L: float
    nu_H: float
    bimatrix: np.ndarray  # [row, col, player]; index 0 = cooperate (H), 1 = defect (L)
    nash: tuple
    pareto: tuple
    label: str
    tragic: bool
    unstable_profiles: tuple = field(default_factory=tuple)

    def resource_at_nash(self):
        """Steady-state stock at each pure Nash profile."""
        out = {}
        for name in self.nash:
            (r1, n1), (r2, n2) = (self._strategy(name[0]), self._strategy(name[1]))
            params = ModelParams(b=[1.0, 1.0], nu=[n1, n2], rho=[r1, r2], weights=_DYAD_W)
            out[name] = equilibrium_dual(params).x_bar
        return out

    def _strategy(self, letter):
        return (self.rho_H, self.nu_H) if letter == "C" else (self.rho_L, self.nu_L)

    def to_dict(self):
        return {
            "rho_L": self.rho_L, "rho_H": self.rho_H, "nu_L": self.nu_L, "nu_H": self.nu_H,
            "bimatrix": self.bimatrix.tolist(), "nash": list(self.nash),
            "pareto": list(self.pareto), "label": self.label, "tragic": self.tragic,
            "unstable_profiles": list(self.unstable_profiles),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["rho_L"], d["rho_H"], d["nu_L"], d["nu_H"], np.array(d["bimatrix"]),
                   tuple(d["nash"]), tuple(d["pareto"]), d["label"], d["tragic"],
                   tuple(d["unstable_profiles"]))


def _pure_nash(m):
    found = []
    for r, c in product(range(2), repeat=2):
        if m[r, c, 0] >= m[1 - r, c, 0] and m[r, c, 1] >= m[r, 1 - c, 1]:
            found.append(PROFILES[2 * r + c])
    return tuple(found)


def _pareto(m):
    cells = [(PROFILES[2 * r + c], m[r, c]) for r, c in product(range(2), repeat=2)]
    keep = []
    for name, p in cells:
        dominated = any(np.all(q >= p) and np.any(q > p) for _, q in cells)
        if not dominated:
            keep.append(name)
    return tuple(keep)


def _has_tie(values, rtol=TIE_RTOL):
    v = np.sort(np.asarray(values, dtype=float))
    scale = max(np.max(np.abs(v)), 1e-300)
    return bool(np.any(np.diff(v) <= rtol * scale))


def classify_pattern(p1_payoffs, rtol=TIE_RTOL):
    """Map player 1's payoffs at (CC, CD, DC, DD) to a game label."""
    if _has_tie(p1_payoffs, rtol):
        return "degenerate"
    ranks = tuple(int(r) + 1 for r in np.argsort(np.argsort(p1_payoffs)))
    t = GAME_TYPES.get(ranks)
    return f"Type{t}" if t is not None else "unlisted"


def build_discrete_game(rho_L, rho_H, nu_L, nu_H, stability_filter=True):
    if not rho_L < rho_H:
        raise ParameterError("need rho_L < rho_H")
    if not nu_L < nu_H:
        raise ParameterError("need nu_L < nu_H")
    _check_nu(nu_L, nu_H)
    strat = [(rho_H, nu_H), (rho_L, nu_L)]
    m = np.empty((2, 2, 2))
    unstable = []
    for r, c in product(range(2), repeat=2):
        (r1, n1), (r2, n2) = strat[r], strat[c]
        m[r, c] = payoffs(n1, n2, r1, r2)
        if stability_filter and not stability_guaranteed_for_all_ratios(n1, n2):
            unstable.append(PROFILES[2 * r + c])
    nash = _pure_nash(m)
    pareto = _pareto(m)
    if unstable:
        label = "unstable"
    else:
        label = classify_pattern([m[0, 0, 0], m[0, 1, 0], m[1, 0, 0], m[1, 1, 0]])
    tragic = any(n not in pareto for n in nash)
    return DiscreteGame(rho_L, rho_H, nu_L, nu_H, m, nash, pareto, label, tragic, tuple(unstable))


def cournot_fixture(a, b, c):
    """Symmetric Cournot duopoly with inverse demand a - b(q1 + q2) and unit cost c."""
    if not (a > c > 0 and b > 0):
        raise ParameterError("Cournot fixture needs a > c > 0 and b > 0")
    br = lambda q_other: max(0.0, (a - c - b * q_other) / (2 * b))
    closed = (a - c) / (3 * b)
    return {"closed_form": (closed, closed), "best_response": (br, br),
            "profit": lambda q1, q2: q1 * (a - b * (q1 + q2) - c)}


# sweeps

def _continuous_cell(nu1, nu2):
    rep = tragicness(nu1, nu2)
    r1, r2 = rep.nash
    params = ModelParams(b=[1.0, 1.0], nu=[nu1, nu2], rho=[r1, r2], weights=_DYAD_W)
    eq = equilibrium_dual(params)
    return {
        "tragicness": rep.tragicness,
        "rho1": r1, "rho2": r2,
        "x_bar": eq.x_bar,
        "consumption_1": eq.x_bar * eq.y_bar[0],
        "consumption_2": eq.x_bar * eq.y_bar[1],
        "stable": stability_guaranteed_for_all_ratios(nu1, nu2),
    }


CONTINUOUS_COLUMNS = ("nu_avg", "nu_diff", "nu1", "nu2", "tragicness", "rho1", "rho2", "x_bar",
                      "consumption_1", "consumption_2", "stable", "error")
DISCRETE_COLUMNS = ("rho_L", "rho_H", "nu_L", "nu_H", "label", "tragic", "nash", "x_nash", "error")


def sweep_continuous(n_avg=100, n_diff=100, lo=0.01, hi=0.99):
    """Nash-point characteristics over the (average, difference) of nu.

    Cells whose nu pair leaves the open unit square keep an error entry.
    """
    rows = []
    for avg in np.linspace(lo, hi, n_avg):
        for diff in np.linspace(-(hi - lo), hi - lo, n_diff):
            nu1, nu2 = avg + diff / 2, avg - diff / 2
            row = dict.fromkeys(CONTINUOUS_COLUMNS, "")
            row.update(nu_avg=float(avg), nu_diff=float(diff), nu1=float(nu1), nu2=float(nu2))
            try:
                row.update(_continuous_cell(nu1, nu2))
            except (ParameterError, ZeroDivisionError) as exc:
                row["error"] = str(exc)
            rows.append(row)
    return rows


def sweep_discrete(nu_L, nu_H, n_rho=50, lo=0.0, hi=1.0):
    """Label, tragic flag and Nash resource level over the (rho_L, rho_H) triangle."""
    rows = []
    grid = np.linspace(lo, hi, n_rho)
    for rl in grid:
        for rh in grid:
            if not rl < rh:
                continue
            row = dict.fromkeys(DISCRETE_COLUMNS, "")
            row.update(rho_L=float(rl), rho_H=float(rh), nu_L=nu_L, nu_H=nu_H)
            try:
                g = build_discrete_game(float(rl), float(rh), nu_L, nu_H)
                xs = g.resource_at_nash()
                row.update(label=g.label, tragic=g.tragic, nash="|".join(g.nash),
                           x_nash="|".join(repr(float(xs[k])) for k in g.nash))
            except ParameterError as exc:
                row["error"] = str(exc)
            rows.append(row)
    return rows
