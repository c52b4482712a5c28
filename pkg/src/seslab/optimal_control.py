"""Infinite-horizon optimal consumption for a single homogeneous society.

The state is handled in the reciprocal coordinate z = 1/x with current-value
adjoint lambda.  Synthesis works in the scaled pair s = ln z, u = -lambda*z,
where u = 1/y* and the admissible band is 0 < u < 1/delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from .model import IntegrationError, ParameterError

SEED_OFFSET = 1e-6
SINGULAR_TOL = 1e-13


class RegimeError(ValueError):
    """Operation requested in the wrong discount regime."""


class SingularityError(ArithmeticError):
    """The feedback ODE hit the z-nullcline where its denominator vanishes."""


class SynthesisError(RuntimeError):
    def __init__(self, message, z=None):
        super().__init__(message if z is None else f"{message} (at z={z:.6g})")
        self.z = z


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class OcpParams:
    delta: float
    mu: float = 0.0
    beta_el: float = 1.0
    x0: float = 0.5

    def __post_init__(self):
        if not self.delta > 0:
            raise ParameterError("delta must be positive", "delta")
        if not self.mu >= 0:
            raise ParameterError("mu must be nonnegative", "mu")
        if not 0 < self.beta_el <= 1:
            raise ParameterError("beta_el must lie in (0, 1]", "beta_el")
        if not self.x0 > 0:
            raise ParameterError("x0 must be positive", "x0")

    @property
    def regime(self):
        return "sustainable" if self.delta < 1 else "unsustainable"


@dataclass(frozen=True)
class SaddlePoint:
    z_hat: float
    lambda_hat: float
    y_hat: float
    x_hat: float
    eigenvalues: tuple
    stable_direction: tuple


def ham_rhs(z, lam, delta):
    """Right-hand side (z', lambda') of the current-value Hamiltonian system."""
    return -z - 1.0 / lam + 1.0, (delta + 1.0) * lam + 2.0 / z


def ham_jacobian(z, lam, delta):
    return np.array([[-1.0, 1.0 / lam**2], [-2.0 / z**2, delta + 1.0]])


def saddle_point(delta):
    if not 0 < delta < 1:
        raise RegimeError("no equilibrium point in the admissible quadrant for delta >= 1")
    z_hat = 2.0 / (1.0 - delta)
    lam_hat = (delta - 1.0) / (delta + 1.0)
    root = math.sqrt(2.0 - delta**2)
    sig = (delta / 2 - root / 2, delta / 2 + root / 2)
    # stable eigenvector of the linearization, normalised to a unit z-component
    jac = ham_jacobian(z_hat, lam_hat, delta)
    direction = (1.0, (sig[0] - jac[0, 0]) / jac[0, 1])
    return SaddlePoint(z_hat, lam_hat, (1.0 + delta) / 2.0, 1.0 / z_hat, sig, direction)


def lambda_ode_rhs(z, lam, delta):
    """d(lambda)/dz along trajectories of the Hamiltonian system."""
    den = z * (-lam * z - 1.0 + lam)
    if abs(den) <= SINGULAR_TOL * max(1.0, abs(z * lam * z)):
        raise SingularityError(f"z-nullcline crossed at z={z!r}, lambda={lam!r}")
    return lam * ((delta + 1.0) * lam * z + 2.0) / den


def _u_rhs(s, u, delta):
    # d u / d s for u = -lambda z, s = ln z
    return u * (1.0 + (2.0 - (delta + 1.0) * u) / (u - 1.0 - u * np.exp(-s)))


def hotelling_asymptote(s, delta):
    """Leading large-z behaviour of u on the optimal curve when delta >= 1."""
    return 1.0 / delta - np.exp(-s) / delta**2


def current_value_hamiltonian(z, lam, delta):
    if not (z > 0 and -1.0 / (delta * z) < lam < 0):
        raise DomainError("need z > 0 and -1/(delta z) < lambda < 0")
    return -1.0 - math.log(-lam * z) + (1.0 - z) * lam - math.log(z)


def sustainability_check(ocp: OcpParams):
    if ocp.delta < 1:
        return "strongly_sustainable"
    if ocp.mu / ocp.beta_el >= ocp.delta - 1:
        return "sustainable"
    return "unsustainable"


@dataclass
class FeedbackLaw:
    """Tabulated optimal feedback lambda(z), interpolated monotonically in (ln z, u)."""

    delta: float
    z: np.ndarray
    lam: np.ndarray
    regime: str
    z_hat: float | None = None
    spread: float = 0.0
    extrapolate_hotelling: bool = False

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float)
        self.lam = np.asarray(self.lam, dtype=float)
        self._s = np.log(self.z)
        self._interp = PchipInterpolator(self._s, -self.lam * self.z, extrapolate=False)

    @property
    def u(self):
        return -self.lam * self.z

    @property
    def y_star_table(self):
        return 1.0 / self.u

    def u_of_s(self, s):
        s = np.asarray(s, dtype=float)
        out = self._interp(s)
        hi = s > self._s[-1]
        if self.extrapolate_hotelling:
            out = np.where(hi, hotelling_asymptote(s, self.delta), out)
        if np.any(np.isnan(out)):
            bad = float(np.exp(s[np.isnan(out)].ravel()[0]))
            raise DomainError(f"z={bad:.6g} outside the synthesized table "
                              f"[{self.z[0]:.6g}, {self.z[-1]:.6g}]")
        return out

    def lambda_of(self, z):
        z = np.asarray(z, dtype=float)
        return -self.u_of_s(np.log(z)) / z

    def y_star(self, z):
        z = np.asarray(z, dtype=float)
        if self.z_hat is not None:
            at_hat = np.isclose(z, self.z_hat, rtol=1e-14, atol=0)
            return np.where(at_hat, (1.0 + self.delta) / 2.0, 1.0 / self.u_of_s(np.log(z)))
        return 1.0 / self.u_of_s(np.log(z))

    def rows(self):
        return [(float(a), float(b), float(c)) for a, b, c in zip(self.z, self.lam, self.y_star_table)]

    @staticmethod
    def header():
        return ("z", "lambda", "y_star")


def _branch(s0, u0, s1, delta, n):
    sol = solve_ivp(_u_rhs, (s0, s1), [u0], args=(delta,), method="Radau",
                    rtol=1e-10, atol=1e-13, dense_output=True)
    if sol.status != 0:
        raise SynthesisError(f"branch integration failed: {sol.message}", float(np.exp(sol.t[-1])))
    grid = np.linspace(s0, s1, n)
    return grid, sol.sol(grid)[0]


def _check_band(s, u, delta):
    bad = ~((u > 0) & (u < 1.0 / delta))
    if np.any(bad):
        raise SynthesisError("left the admissible band 0 < -lambda z < 1/delta",
                             float(np.exp(s[bad][0])))


def synthesize_feedback(delta, z_range=None, n_grid=400, eps=SEED_OFFSET):
    """Tabulate the optimal feedback law on a log-spaced z grid.

    For delta < 1 the two branches of the saddle's stable manifold are
    integrated outward from z_hat. For delta >= 1 the curve is obtained by
    integrating backward from a large z seeded on the Hotelling asymptote;
    that direction contracts neighbouring solutions onto the optimal one.
    ``spread`` records the gap between two different seeds on the lower half
    of the table as a residual.
    """
    if not delta > 0:
        raise ParameterError("delta must be positive", "delta")
    if delta < 1:
        sp = saddle_point(delta)
        z_lo, z_hi = z_range if z_range is not None else (sp.z_hat / 100, sp.z_hat * 100)
        if not z_lo < sp.z_hat < z_hi:
            raise ParameterError("z_range must straddle z_hat", "z_range")
        slope = sp.stable_direction[1]
        pieces = []
        for sign, end in ((-1.0, z_lo), (1.0, z_hi)):
            z0 = sp.z_hat * (1.0 + sign * eps)
            lam0 = sp.lambda_hat + slope * (z0 - sp.z_hat)
            s, u = _branch(math.log(z0), -lam0 * z0, math.log(end), delta, n_grid)
            _check_band(s, u, delta)
            pieces.append((s, u))
        (sl, ul), (sr, ur) = pieces
        s = np.concatenate([sl[::-1], [math.log(sp.z_hat)], sr])
        u = np.concatenate([ul[::-1], [2.0 / (1.0 + delta)], ur])
        z = np.exp(s)
        return FeedbackLaw(delta, z, -u / z, "sustainable", z_hat=sp.z_hat)

    z_lo, z_hi = z_range if z_range is not None else (1e-2, None)
    if z_hi is None:
        # near delta = 1 the backward problem stiffens like exp(s); stop earlier there
        z_hi = math.exp(14.0 if delta - 1 < 1e-3 else 20.0)
    s_hi = math.log(z_hi)
    seed = hotelling_asymptote(s_hi, delta)
    s, u = _branch(s_hi, seed, math.log(z_lo), delta, n_grid)
    _, u_alt = _branch(s_hi, 0.5 / delta, math.log(z_lo), delta, n_grid)
    _check_band(s, u, delta)
    z = np.exp(s[::-1])
    u = u[::-1]
    # seeds differ near s_hi by construction; judge agreement on the lower half
    settled = s[::-1] <= 0.5 * (s_hi + math.log(z_lo))
    spread = float(np.max(np.abs(u_alt[::-1] - u)[settled]))
    return FeedbackLaw(delta, z, -u / z, "unsustainable", spread=spread,
                       extrapolate_hotelling=True)


@dataclass
class OptimalTrajectory:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    integrand: np.ndarray
    objective: float
    delta: float
    branch: str

    @property
    def z(self):
        return 1.0 / self.x

    @property
    def lam(self):
        return -1.0 / (self.y * self.z)

    def log_slope(self):
        """Instantaneous growth rate x'/x = 1 - x - y."""
        return 1.0 - self.x - self.y

    def rows(self):
        return [(float(a), float(b), float(c), float(d))
                for a, b, c, d in zip(self.t, self.x, self.y, self.integrand)]

    @staticmethod
    def header():
        return ("t", "x", "y", "utility")


def _branch_label(law, x0):
    if law.regime == "unsustainable":
        return "hotelling"
    z0 = 1.0 / x0
    if np.isclose(z0, law.z_hat, rtol=1e-12, atol=0):
        return "stationary"
    return "left_manifold" if z0 < law.z_hat else "right_manifold"


def simulate_optimal(ocp: OcpParams, law: FeedbackLaw, t_end, n_samples=1001):
    """Closed-loop path x' = x(1 - x) - y*(1/x) x, integrated in log x.

    ``objective`` is the discounted integral of ln x + ln y up to ``t_end``
    plus a tail that is exact when ln x + ln y is affine beyond ``t_end``.
    """
    delta = ocp.delta
    if not np.isclose(delta, law.delta, rtol=1e-12):
        raise ParameterError("law was synthesized for a different delta", "delta")
    branch = _branch_label(law, ocp.x0)

    def control(ell):
        if branch == "stationary":
            return (1.0 + delta) / 2.0
        return float(1.0 / law.u_of_s(-ell))

    def rhs(t, v):
        ell = v[0]
        y = control(ell)
        return [1.0 - math.exp(ell) - y, math.exp(-delta * t) * (ell + math.log(y))]

    t_eval = np.linspace(0.0, t_end, n_samples)
    try:
        sol = solve_ivp(rhs, (0.0, t_end), [math.log(ocp.x0), 0.0], t_eval=t_eval,
                        method="RK45", rtol=1e-9, atol=1e-11)
    except DomainError as exc:
        raise IntegrationError(str(exc), None, None) from exc
    if sol.status != 0:
        raise IntegrationError(sol.message, float(sol.t[-1]), sol.y[:, -1])
    ell = sol.y[0]
    x = np.exp(ell)
    y = np.array([control(e) for e in ell])
    g = ell + np.log(y)
    g_end = g[-1]
    g_rate = 1.0 - x[-1] - y[-1]
    if branch != "hotelling":
        g_rate = (g[-1] - g[-2]) / (sol.t[-1] - sol.t[-2])
    tail = math.exp(-delta * t_end) * (g_end / delta + g_rate / delta**2)
    return OptimalTrajectory(sol.t, x, y, np.exp(-delta * sol.t) * g,
                             float(sol.y[1, -1] + tail), delta, branch)


def manifold_residual(law: FeedbackLaw, z0, duration, backward=False, samples=501):
    """Integrate the full Hamiltonian system from (z0, lambda(z0)) and report
    the largest gap |lambda(t) - lambda_law(z(t))| while z stays in the table."""
    delta = law.delta
    lam0 = float(law.lambda_of(z0))
    sign = -1.0 if backward else 1.0

    def rhs(t, v):
        dz, dl = ham_rhs(v[0], v[1], delta)
        return [sign * dz, sign * dl]

    def leaves(t, v):
        return min(v[0] - law.z[0], law.z[-1] - v[0])
    leaves.terminal = True

    sol = solve_ivp(rhs, (0.0, duration), [z0, lam0], method="DOP853", rtol=1e-12,
                    atol=1e-14, t_eval=np.linspace(0.0, duration, samples), events=leaves)
    zs, ls = sol.y
    keep = (zs > law.z[0]) & (zs < law.z[-1])
    gap = np.abs(ls[keep] - law.lambda_of(zs[keep]))
    return float(gap.max()), float(sol.t[-1])
