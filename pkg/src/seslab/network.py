"""Influence networks, canonical-network recognition and aggregation into block models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.sparse.csgraph import connected_components

from .model import ModelParams, ParameterError, StepControl, SystemState, integrate

DEFAULT_TOL = 1e-9


def net_influence(params: ModelParams):
    """Out-influence minus in-influence for every node."""
    g = params.b * params.nu
    w = params.weights
    return w.T @ g - w.sum(axis=1) * g


def leadership(params: ModelParams, tol=DEFAULT_TOL):
    labels = []
    for v in net_influence(params):
        if abs(v) <= tol:
            labels.append("neutral")
        else:
            labels.append("leader" if v > 0 else "follower")
    return labels


@dataclass(frozen=True)
class InfluenceNetwork:
    gamma: np.ndarray

    def __post_init__(self):
        g = np.array(self.gamma, float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ParameterError("influence matrix must be square")
        if np.any(g < 0) or np.any(np.diag(g) != 0):
            raise ParameterError("influences must be nonnegative with a zero diagonal")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)

    @classmethod
    def from_params(cls, params: ModelParams):
        return cls((params.b * params.nu)[:, None] * params.weights)

    @property
    def in_degree(self):
        return self.gamma.sum(axis=1)

    @property
    def laplacian(self):
        return np.diag(self.in_degree) - self.gamma


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    components: int
    algebraic_connectivity: float
    symmetric: bool


def laplacian_spectrum(net: InfluenceNetwork, tol=1e-10) -> Spectrum:
    """Laplacian eigenvalues sorted ascending (by real part for directed networks).

    Components are counted on the symmetrized support graph.
    """
    lap = net.laplacian
    symmetric = bool(np.allclose(net.gamma, net.gamma.T))
    if symmetric:
        ev = np.linalg.eigvalsh(lap)
    else:
        ev = np.linalg.eigvals(lap)
        ev = ev[np.argsort(ev.real, kind="stable")]
        if np.all(np.abs(ev.imag) <= tol):
            ev = ev.real
    support = (net.gamma + net.gamma.T) > 0
    ncomp, _ = connected_components(support, directed=False)
    lam2 = float(np.real(ev[1])) if ev.size > 1 else 0.0
    return Spectrum(ev, int(ncomp), lam2, symmetric)


@dataclass(frozen=True)
class Partition:
    groups: tuple

    def __post_init__(self):
        groups = tuple(tuple(int(i) for i in g) for g in self.groups)
        if any(len(g) == 0 for g in groups):
            raise ParameterError("every group must be nonempty")
        object.__setattr__(self, "groups", groups)

    @property
    def sizes(self):
        return tuple(len(g) for g in self.groups)

    def check_cover(self, n):
        flat = sorted(i for g in self.groups for i in g)
        if flat != list(range(n)):
            raise ParameterError("partition must be a disjoint cover of all agents")


@dataclass(frozen=True)
class NetworkClass:
    self_directed: bool
    homogeneous: bool
    semi_homogeneous: bool
    symmetric_semi_homogeneous: bool
    strongest: str
    violation: str


def _uniform(values, tol):
    values = np.asarray(values, float)
    scale = max(1.0, float(np.max(np.abs(values))))
    return float(np.ptp(values)) <= tol * scale


def _group_violation(params, groups, tol):
    """First broken condition of the semi-homogeneous definition, or ''."""
    ba = params.b * params.alpha
    bn = params.b * params.nu
    w = params.weights
    for k, g in enumerate(groups):
        g = list(g)
        if not _uniform(ba[g], tol):
            return f"non-uniform b*alpha in group {k}"
        if not _uniform(bn[g], tol):
            return f"non-uniform b*nu in group {k}"
        if not _uniform(params.rho[g], tol):
            return f"non-uniform rho in group {k}"
        sub = w[np.ix_(g, g)]
        inner = sub.T @ bn[g] - sub.sum(axis=1) * bn[g]
        if np.max(np.abs(inner)) > tol:
            prefix = "" if len(groups) == 1 else f" in group {k}"
            return "leaders/followers present" + prefix
    for s, gs in enumerate(groups):
        for r, gr in enumerate(groups):
            if s == r:
                continue
            block = w[np.ix_(list(gs), list(gr))]
            if not _uniform(block.sum(axis=1), tol):
                return f"in-influence from group {r} not uniform over group {s}"
            if not _uniform(block.sum(axis=0), tol):
                return f"out-influence of group {s} not uniform over group {r}"
    return ""


def _cross_degrees(params, groups):
    m = len(groups)
    d_in = np.zeros((m, m))
    d_out = np.zeros((m, m))
    for s, gs in enumerate(groups):
        for r, gr in enumerate(groups):
            block = params.weights[np.ix_(list(gs), list(gr))]
            d_in[s, r] = block.sum(axis=1)[0]
            d_out[s, r] = block.sum(axis=0)[0]
    return d_in, d_out


def classify_network(params: ModelParams, partition: Partition, tol=DEFAULT_TOL) -> NetworkClass:
    partition.check_cover(params.n)
    self_directed = bool(np.max(np.abs(net_influence(params))) <= tol)
    whole = _group_violation(params, (tuple(range(params.n)),), tol)
    homogeneous = whole == ""
    violation = _group_violation(params, partition.groups, tol)
    semi = violation == ""
    symmetric = False
    if semi:
        d_in, d_out = _cross_degrees(params, partition.groups)
        off = ~np.eye(len(partition.groups), dtype=bool)
        symmetric = bool(np.all(np.abs(d_in - d_out)[off] <= tol))
        if not symmetric:
            violation = "cross-group in- and out-influence differ (unequal connected group sizes)"
    if homogeneous:
        strongest = "homogeneous"
    elif symmetric:
        strongest = "symmetric_semi_homogeneous"
    elif semi:
        strongest = "semi_homogeneous"
    elif self_directed:
        strongest = "self_directed"
    else:
        strongest = "none"
    if homogeneous and len(partition.groups) == 1:
        violation = ""
    elif len(partition.groups) == 1 and not homogeneous:
        violation = whole
    return NetworkClass(self_directed, homogeneous, semi, symmetric, strongest, violation)


@dataclass(frozen=True)
class BlockModelParams:
    sizes: tuple
    B: np.ndarray
    A: np.ndarray
    V: np.ndarray
    P: np.ndarray
    W: np.ndarray

    @property
    def m(self):
        return len(self.sizes)

    def to_dict(self):
        return {"sizes": list(self.sizes), "B": self.B.tolist(), "A": self.A.tolist(),
                "V": self.V.tolist(), "P": self.P.tolist(), "W": self.W.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["sizes"]), *(np.array(d[k], float) for k in ("B", "A", "V", "P", "W")))


class ClassificationError(ParameterError):
    pass


def aggregate_exact(params: ModelParams, partition: Partition, tol=DEFAULT_TOL) -> BlockModelParams:
    cls = classify_network(params, partition, tol)
    if not cls.symmetric_semi_homogeneous:
        raise ClassificationError(f"not symmetric semi-homogeneous: {cls.violation}")
    groups = partition.groups
    first = [g[0] for g in groups]
    d_in, _ = _cross_degrees(params, groups)
    W = d_in.copy()
    # bonding weight: the share of attention a member keeps inside its own group
    np.fill_diagonal(W, 0.0)
    np.fill_diagonal(W, 1.0 - W.sum(axis=1))
    return BlockModelParams(sizes=partition.sizes, B=params.b[first].copy(),
                            A=params.alpha[first].copy(), V=params.nu[first].copy(),
                            P=params.rho[first].copy(), W=W)


def block_rhs(block: BlockModelParams, x, Y):
    Y = np.asarray(Y, float)
    n = np.asarray(block.sizes, float)
    coupling = block.W.sum(axis=1) * Y - block.W @ Y
    dY = n * block.B * block.A * (x - block.P) - block.B * block.V * coupling
    return (1.0 - x) * x - x * Y.sum(), dY


def integrate_block(block: BlockModelParams, x0, Y0, t_end, control=StepControl(), t_eval=None):
    """Block-model trajectory as ``(t, x, Y)`` with the stock integrated in log form."""
    def f(t, u):
        with np.errstate(over="ignore", invalid="ignore"):
            x = np.exp(u[0])
            dx, dY = block_rhs(block, x, u[1:])
        return np.concatenate(([dx / x], dY))

    if t_eval is None:
        t_eval = np.linspace(0.0, t_end, 1001)
    sol = solve_ivp(f, (0.0, t_end), np.concatenate(([np.log(x0)], Y0)), method="RK45",
                    rtol=control.rtol, atol=control.atol, t_eval=t_eval)
    return sol.t, np.exp(sol.y[0]), sol.y[1:]


def aggregate_self_directed(params: ModelParams, tol=DEFAULT_TOL):
    """Lumped ``(BA_hat, P_hat)`` that reproduce aggregate effort exactly."""
    ni = net_influence(params)
    worst = int(np.argmax(np.abs(ni)))
    if abs(ni[worst]) > tol:
        raise ClassificationError(f"not self-directed: node {worst} has net influence {ni[worst]!r}")
    ba = params.b * params.alpha
    return float(ba.mean()), float(np.dot(ba, params.rho) / ba.sum())


def _aggregate_2d(n, ba, p, x0, Y0, t_eval, control):
    def f(t, u):
        with np.errstate(over="ignore", invalid="ignore"):
            x = np.exp(u[0])
        return [1.0 - x - u[1], n * ba * (x - p)]

    sol = solve_ivp(f, (t_eval[0], t_eval[-1]), [np.log(x0), Y0], method="RK45",
                    rtol=control.rtol, atol=control.atol, t_eval=t_eval)
    return np.exp(sol.y[0]), sol.y[1]


def aggregate_trajectory(params: ModelParams, init: SystemState, t_end, ba=None, p=None,
                         control=StepControl(), t_eval=None):
    """Integrate the full model and a two-dimensional aggregate side by side.

    Returns ``(t, x_full, Y_full, x_agg, Y_agg)``. Without ``ba``/``p`` the exact lumped
    values are used.
    """
    if ba is None or p is None:
        ba_hat, p_hat = aggregate_self_directed(params)
        ba = ba_hat if ba is None else ba
        p = p_hat if p is None else p
    if t_eval is None:
        t_eval = np.linspace(0.0, t_end, 2001)
    full = integrate(params, init, t_end, control, t_eval=t_eval)
    xa, Ya = _aggregate_2d(params.n, ba, p, init.x, float(init.y.sum()), full.times, control)
    return full.times, full.x, full.y.sum(axis=0), xa, Ya


@dataclass(frozen=True)
class AggregationError:
    transient_sup: float
    steady_e_x: float
    steady_e_Y: float
    times: np.ndarray
    e_x: np.ndarray
    e_Y: np.ndarray


def aggregate_approximate(params: ModelParams, guess, init: SystemState, t_end=2000.0,
                          control=StepControl()) -> AggregationError:
    """Error of a guessed aggregate ``(BA_tilde, P_tilde)`` against the true aggregate.

    The guessed model is a closed two-dimensional system in its own stock.
    """
    aggregate_self_directed(params)
    ba, p = guess
    if not (np.isfinite(ba) and np.isfinite(p)):
        raise ParameterError("guess must be finite")
    t, x, Y, xa, Ya = aggregate_trajectory(params, init, t_end, ba, p, control)
    e_x = x - xa
    e_Y = Y - Ya
    return AggregationError(float(max(np.max(np.abs(e_x)), np.max(np.abs(e_Y)))),
                            float(e_x[-1]), float(e_Y[-1]), t, e_x, e_Y)


def self_directed_instance(n, rng=None):
    """Uniform-weight self-directed population with random relevances and thresholds.

    ``b_i * nu_i`` is held constant (the largest susceptibility equals one), which is
    what uniform weights need for every node to be neutral.
    """
    rng = np.random.default_rng(rng)
    alpha = rng.uniform(0.0, 1.0, n)
    rho = rng.uniform(0.0, 1.0, n)
    nu = 1.0 - alpha
    b = nu.min() / nu
    return ModelParams(b=b, nu=nu, rho=rho)
