"""Shooting solver for the terminal trading speed and the implicit trajectory.

The optimal holdings path satisfies the first-order law

    -x'(t) = (v0^(k+1) + r x^2)^(1/(k+1)),   r = lam sigma^2 / (k eta),

with x(T) = 0. The time needed to sell the last ``x`` shares is

    D(x; v0) = (x / v0) 2F1(1/2, 1/(k+1); 3/2; -r x^2 / v0^(k+1)),

so the terminal speed v0 is the root of ``D(X; v0) = T`` and the path is
recovered by inverting ``D(x; v0) = T - t`` in x.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BracketFailureError, DomainError, InversionFailureError, NoRootError
from .model import (
    ModelParams,
    Trajectory,
    TrajectoryPoint,
    beltrami_constant,
    cost_of_trajectory,
)
from .specfun import hyp2f1_value
from .verify import integrate_first_order, max_deviation

log = logging.getLogger(__name__)

ROOT_RTOL = 1e-12  # relative bracket width for the shooting root
ROOT_TOL = 1e-10  # accepted |D(X; v0) - T| / T
INVERSION_XTOL = 1e-12  # relative to X
EXPANSION_LIMIT = 60  # bracket expansion by at most 2**60 either way
DEFAULT_ORACLE_STEPS = 4096


@dataclass(frozen=True)
class ShootingResult:
    v0: float
    residual: float
    iterations: int
    bracket: tuple[float, float]
    # (v0, lhs) pairs in evaluation order, kept for monotonicity diagnostics.
    history: tuple[tuple[float, float], ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class SolveReport:
    params: ModelParams
    shooting: ShootingResult
    trajectory: Trajectory
    cost: float
    checks: dict

    @property
    def v0(self) -> float:
        return self.shooting.v0


def _depletion_time(p: ModelParams, v0: float, x: float) -> float:
    if x == 0:
        return 0.0
    arg = -p.risk_ratio * x * x / v0 ** (p.k + 1)
    return x / v0 * hyp2f1_value(0.5, 1.0 / (p.k + 1), 1.5, arg)


def shooting_lhs(p: ModelParams, v0: float) -> float:
    """Time needed to sell all X shares when the terminal speed is v0."""
    if not v0 > 0:
        raise DomainError(f"terminal speed must be > 0, got {v0}")
    return _depletion_time(p, v0, p.X)


def implicit_time_of_x(p: ModelParams, v0: float, x: float) -> float:
    """Time at which the holdings equal ``x`` on the path with terminal speed v0."""
    if not v0 > 0:
        raise DomainError(f"terminal speed must be > 0, got {v0}")
    if x < 0:
        raise DomainError(f"holdings must be non-negative, got {x}")
    return p.T - _depletion_time(p, v0, x)


def speed_at_x(p: ModelParams, v0: float, x: float) -> float:
    """Trading speed ``-x'`` at holdings ``x``."""
    if x < 0 or v0 < 0:
        raise DomainError(f"need x >= 0 and v0 >= 0, got x={x}, v0={v0}")
    return (v0 ** (p.k + 1) + p.risk_ratio * x * x) ** (1.0 / (p.k + 1))


def zero_speed_depletion_time(p: ModelParams) -> float:
    """Horizon at which the zero-terminal-speed path starts exactly at X (k > 1)."""
    if not zero_speed_admissible(p):
        raise DomainError(f"zero-speed solution requires k > 1, got k={p.k}")
    k = p.k
    return (k + 1) / (k - 1) * p.risk_ratio ** (-1.0 / (k + 1)) * p.X ** ((k - 1) / (k + 1))


def solve_v0(p: ModelParams) -> ShootingResult:
    """Find the terminal speed v0 with ``shooting_lhs(p, v0) == T``.

    The left-hand side decreases strictly in v0, so the root is bracketed by
    doubling/halving from ``X / T`` and then refined by bisection.

    Raises:
        NoRootError: for k > 1 when T is not below the zero-speed depletion
            time, the supremum of the left-hand side.
        BracketFailureError: if no sign change appears within 2**60 of X/T.
    """
    if p.k > 1:
        t_star = zero_speed_depletion_time(p)
        if p.T >= t_star:
            raise NoRootError(
                f"T={p.T} is not below the zero-speed depletion time {t_star:.12g}; "
                "the shooting equation has no positive root",
                boundary_time=t_star,
            )

    history: list[tuple[float, float]] = []

    def residual(v: float) -> float:
        lhs = shooting_lhs(p, v)
        history.append((v, lhs))
        return lhs - p.T

    start = p.X / p.T
    v = start
    f = residual(v)
    if f == 0:
        return ShootingResult(v, 0.0, 0, (v, v), tuple(history))
    step = 2.0 if f > 0 else 0.5
    for _ in range(EXPANSION_LIMIT):
        v_next = v * step
        f_next = residual(v_next)
        if (f_next > 0) != (f > 0) or f_next == 0:
            break
        v, f = v_next, f_next
    else:
        raise BracketFailureError(
            f"no sign change of the shooting residual within 2**{EXPANSION_LIMIT} "
            f"of v0={start:.6g}"
        )
    lo, hi = sorted((v, v_next))
    iterations = len(history)
    if f_next == 0:
        return ShootingResult(v_next, 0.0, iterations, (lo, hi), tuple(history))

    while hi - lo > ROOT_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if residual(mid) > 0:
            lo = mid
        else:
            hi = mid
        iterations += 1

    v0 = 0.5 * (lo + hi)
    res = shooting_lhs(p, v0) - p.T
    if abs(res) > ROOT_TOL * p.T:
        raise BracketFailureError(
            f"bisection ended with residual {res:.3g} above tolerance at v0={v0:.17g}"
        )
    log.debug("solve_v0: v0=%.17g residual=%.3g iterations=%d", v0, res, iterations)
    return ShootingResult(v0, res, iterations, (lo, hi), tuple(history))


def x_at_time(p: ModelParams, v0: float, t: float, max_iter: int = 200) -> float:
    """Holdings at time ``t`` on the path with terminal speed v0.

    Inverts the strictly increasing map ``x -> T - implicit_time_of_x`` by
    Newton steps kept inside a shrinking bisection bracket; the derivative is
    ``1 / speed_at_x``. When v0 is not the shooting root the solution may
    exceed X, in which case the upper bracket is expanded.
    """
    if not v0 > 0:
        raise DomainError(f"terminal speed must be > 0, got {v0}")
    if not 0 <= t <= p.T:
        raise DomainError(f"t={t} outside [0, T={p.T}]")
    if t == p.T:
        return 0.0
    remaining = p.T - t

    def g(x: float) -> float:
        return _depletion_time(p, v0, x) - remaining

    lo, hi = 0.0, p.X
    g_hi = g(hi)
    for _ in range(EXPANSION_LIMIT):
        if g_hi >= 0:
            break
        lo, hi = hi, 2.0 * hi
        g_hi = g(hi)
    else:
        raise InversionFailureError(f"could not bracket holdings at t={t}")
    if g_hi == 0:
        return hi

    xtol = INVERSION_XTOL * p.X
    x = hi
    gx = g_hi
    for _ in range(max_iter):
        step = gx * speed_at_x(p, v0, x)
        candidate = x - step
        if not lo < candidate < hi:
            candidate = 0.5 * (lo + hi)
        x = candidate
        gx = g(x)
        if gx == 0:
            return x
        if gx > 0:
            hi = x
        else:
            lo = x
        if abs(step) <= 0.25 * xtol or hi - lo <= xtol:
            break
    else:
        raise InversionFailureError(
            f"holdings inversion at t={t} did not converge in {max_iter} iterations"
        )
    if abs(gx) > 1e-9 * max(p.T, 1.0):
        raise InversionFailureError(f"inversion residual {gx:.3g} too large at t={t}")
    return x


def closed_form_k1(p: ModelParams, t: float) -> float:
    """Hyperbolic-sine liquidation path of the linear-impact case."""
    if p.k != 1:
        raise DomainError(f"closed form applies only to k = 1, got k={p.k}")
    kappa = math.sqrt(p.lam / p.eta) * p.sigma
    return p.X * math.sinh(kappa * (p.T - t)) / math.sinh(kappa * p.T)


def zero_speed_admissible(p: ModelParams) -> bool:
    return p.k > 1


def zero_speed_x(p: ModelParams, t: float) -> float:
    """Holdings on the zero-terminal-speed path; only defined for k > 1."""
    if not zero_speed_admissible(p):
        raise DomainError(f"zero-speed solution requires k > 1, got k={p.k}")
    k = p.k
    base = (k - 1) * (p.T - t) / (k + 1)
    return base ** ((k + 1) / (k - 1)) * p.risk_ratio ** (1.0 / (k - 1))


def zero_speed_x0(p: ModelParams) -> float:
    """Initial holdings forced by zero terminal speed over horizon T."""
    return zero_speed_x(p, 0.0)


def sample_trajectory(p: ModelParams, v0: float, n_samples: int) -> Trajectory:
    if n_samples < 3:
        raise DomainError(f"n_samples must be >= 3, got {n_samples}")
    c_terminal = p.k * p.eta * v0 ** (p.k + 1)
    points = []
    for t in np.linspace(0.0, p.T, n_samples):
        t = float(t)
        x = x_at_time(p, v0, t)
        v = speed_at_x(p, v0, x)
        points.append(TrajectoryPoint(t, x, v, beltrami_constant(p, x, v) + c_terminal))
    return Trajectory(p, v0, tuple(points))


def solve(
    p: ModelParams, n_samples: int = 201, oracle_steps: int = DEFAULT_ORACLE_STEPS
) -> SolveReport:
    """Shoot for v0, sample the path on a uniform grid and collect checks."""
    shooting = solve_v0(p)
    traj = sample_trajectory(p, shooting.v0, n_samples)
    scale = max(1.0, p.k * p.eta * shooting.v0 ** (p.k + 1))
    ode = integrate_first_order(p, shooting.v0, oracle_steps)
    checks = {
        "beltrami_max_residual": float(np.max(np.abs(traj.beltrami_residual))) / scale,
        "boundary_x0_error": abs(traj.points[0].x - p.X),
        "boundary_xT_error": abs(traj.points[-1].x),
        "oracle_max_deviation": max_deviation(traj, ode),
    }
    return SolveReport(p, shooting, traj, cost_of_trajectory(traj), checks)
