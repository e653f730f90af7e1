"""Independent ODE oracle for the optimal liquidation path.

Nothing here touches the hypergeometric function: the first-order speed law is
integrated backward from the terminal state ``x(T) = 0`` with fixed-step RK4.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import DomainError, InsufficientSamplesError, StepFailureError
from .model import ModelParams, Trajectory

if TYPE_CHECKING:
    from .solver import SolveReport

TINY_V0 = 1e-10


@dataclass(frozen=True)
class OdeSolution:
    t_grid: np.ndarray
    x_values: np.ndarray
    v_values: np.ndarray
    step_count: int


def integrate_first_order(p: ModelParams, v0: float, n_steps: int) -> OdeSolution:
    """RK4 integration of ``x' = -(v0^(k+1) + r x^2)^(1/(k+1))`` from t=T back to 0.

    Runs in reversed time ``s = T - t`` where the equation reads
    ``dx/ds = +(...)``, then returns the samples in forward-time order. For
    k > 1 and v0 below ``TINY_V0`` the first step takes the exact zero-speed
    expansion, since the right-hand side is not smooth at x = 0 there.
    """
    if not v0 > 0:
        raise DomainError(f"terminal speed must be > 0, got {v0}")
    if n_steps < 16:
        raise DomainError(f"n_steps must be >= 16, got {n_steps}")
    k = p.k
    c_v = v0 ** (k + 1)
    r = p.lam * p.sigma**2 / (p.eta * k)
    expo = 1.0 / (k + 1)

    def rhs(x: float) -> float:
        return (c_v + r * x * x) ** expo

    h = p.T / n_steps
    xs = np.empty(n_steps + 1)
    xs[0] = 0.0
    x = 0.0
    start = 0
    if k > 1 and v0 < TINY_V0:
        x = ((k - 1) * h / (k + 1)) ** ((k + 1) / (k - 1)) * r ** (1.0 / (k - 1))
        xs[1] = x
        start = 1
    for i in range(start, n_steps):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h * k2)
        k4 = rhs(x + h * k3)
        x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(x):
            raise StepFailureError(f"RK4 state became non-finite at step {i + 1}")
        xs[i + 1] = x

    s_grid = np.linspace(0.0, p.T, n_steps + 1)
    t_grid = (p.T - s_grid)[::-1]
    t_grid[0] = 0.0
    x_values = xs[::-1].copy()
    v_values = (c_v + r * x_values**2) ** expo
    return OdeSolution(t_grid, x_values, v_values, n_steps)


def _hermite(sol: OdeSolution, t: np.ndarray) -> np.ndarray:
    """Cubic Hermite interpolation of x using the sampled slopes ``-v``."""
    tg, xg, dg = sol.t_grid, sol.x_values, -sol.v_values
    idx = np.clip(np.searchsorted(tg, t, side="right") - 1, 0, len(tg) - 2)
    h = tg[idx + 1] - tg[idx]
    s = (t - tg[idx]) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s**2 * (3 - 2 * s)
    h11 = s**2 * (s - 1)
    return h00 * xg[idx] + h10 * h * dg[idx] + h01 * xg[idx + 1] + h11 * h * dg[idx + 1]


def max_deviation(traj: Trajectory, sol: OdeSolution) -> float:
    """Sup-norm gap between a trajectory's holdings and the interpolated ODE path."""
    return float(np.max(np.abs(traj.x - _hermite(sol, traj.t))))


def reduction_check(p: ModelParams, sol: OdeSolution) -> float:
    """Residual of the order reduction ``x'' = y dy/du`` with ``u = x, y = x'``.

    ``dy/du`` is a finite difference along the sampled solution; ``x''`` is
    taken from the second-order Euler-Lagrange right-hand side
    ``2 lam sigma^2 / (eta k (k+1)) * x * v^(1-k)``.
    """
    if len(sol.x_values) < 5:
        raise InsufficientSamplesError(
            f"reduction check needs at least 5 samples, got {len(sol.x_values)}"
        )
    u = np.asarray(sol.x_values, dtype=float)
    v = np.asarray(sol.v_values, dtype=float)
    y = -v
    dydu = np.gradient(y, u, edge_order=2)
    k = p.k
    coef = 2.0 * p.lam * p.sigma**2 / (p.eta * k * (k + 1))
    with np.errstate(divide="ignore", invalid="ignore"):
        xdd = np.where(u == 0, 0.0, coef * u * v ** (1.0 - k))
    return float(np.max(np.abs(y * dydu - xdd)))


def cross_validate(p: ModelParams, report: "SolveReport", n_steps: int) -> float:
    """Sup-norm deviation between the solver trajectory and the RK4 oracle."""
    sol = integrate_first_order(p, report.shooting.v0, n_steps)
    return max_deviation(report.trajectory, sol)
