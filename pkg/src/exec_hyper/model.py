"""Execution-problem data model, running cost and first-integral diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, InsufficientSamplesError, ValidationError

# Legendre value reported at v = 0 when k < 1, where eta k (k+1) v^(k-1) diverges.
LEGENDRE_SENTINEL = math.inf


@dataclass(frozen=True)
class ModelParams:
    """Constants of the liquidation problem.

    Attributes:
        gamma: permanent-impact coefficient (may be zero).
        eta: temporary-impact coefficient.
        lam: risk aversion.
        sigma: volatility.
        k: temporary-impact exponent.
        X: initial holdings (shares), sold down to zero.
        T: horizon.
    """

    gamma: float = 0.0
    eta: float = 1.0
    lam: float = 1.0
    sigma: float = 1.0
    k: float = 0.5
    X: float = 1.0
    T: float = 1.0

    def __post_init__(self):
        for name in ("gamma", "eta", "lam", "sigma", "k", "X", "T"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValidationError(name, f"must be a finite real number, got {value!r}")
        for name in ("eta", "lam", "sigma", "k", "X", "T"):
            if not getattr(self, name) > 0:
                raise ValidationError(name, f"must be > 0, got {getattr(self, name)}")
        if self.gamma < 0:
            raise ValidationError("gamma", f"must be >= 0, got {self.gamma}")

    @property
    def risk_ratio(self) -> float:
        """``lam sigma^2 / (k eta)``, the coefficient of x^2 in the speed law."""
        return self.lam * self.sigma**2 / (self.k * self.eta)

    def as_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "eta": self.eta,
            "lambda": self.lam,
            "sigma": self.sigma,
            "k": self.k,
            "X": self.X,
            "T": self.T,
        }


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    x: float
    v: float
    beltrami_residual: float


@dataclass(frozen=True)
class Trajectory:
    params: ModelParams
    v0: float
    points: tuple[TrajectoryPoint, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        ts = [pt.t for pt in self.points]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("trajectory times must be strictly increasing")

    @property
    def t(self) -> np.ndarray:
        return np.array([pt.t for pt in self.points])

    @property
    def x(self) -> np.ndarray:
        return np.array([pt.x for pt in self.points])

    @property
    def v(self) -> np.ndarray:
        return np.array([pt.v for pt in self.points])

    @property
    def beltrami_residual(self) -> np.ndarray:
        return np.array([pt.beltrami_residual for pt in self.points])


def impact_integrand(p: ModelParams, x: float, xdot: float) -> float:
    """Running cost ``-gamma x xdot + eta (-xdot)^(k+1) + lam sigma^2 x^2``.

    Only sell programs are modelled, so ``xdot`` must be non-positive.
    """
    if xdot > 0:
        raise DomainError(f"xdot must be <= 0 for a sell program, got {xdot}")
    return -p.gamma * x * xdot + p.eta * (-xdot) ** (p.k + 1) + p.lam * p.sigma**2 * x**2


def beltrami_constant(p: ModelParams, x: float, v: float) -> float:
    """First integral ``lam sigma^2 x^2 - k eta v^(k+1)`` at holdings x, speed v.

    Along an optimal path this stays equal to ``-k eta v0^(k+1)``.
    """
    if v < 0:
        raise DomainError(f"speed must be non-negative, got {v}")
    return p.lam * p.sigma**2 * x**2 - p.k * p.eta * v ** (p.k + 1)


def legendre_check(p: ModelParams, v: float) -> float:
    """Second derivative of the running cost in the velocity slot.

    Returns ``LEGENDRE_SENTINEL`` (infinity) at ``v = 0`` for ``k < 1``.
    """
    if v < 0:
        raise DomainError(f"speed must be non-negative, got {v}")
    if v == 0:
        if p.k < 1:
            return LEGENDRE_SENTINEL
        if p.k > 1:
            return 0.0
        return 2.0 * p.eta
    return p.eta * p.k * (p.k + 1) * v ** (p.k - 1)


def simpson(y: Sequence[float], h: float) -> float:
    """Composite Simpson rule on a uniform grid of spacing ``h``.

    With an even number of samples the last three intervals use the 3/8 rule.
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 3:
        raise InsufficientSamplesError(f"Simpson rule needs at least 3 samples, got {n}")
    if n % 2 == 1:
        return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())
    if n == 4:
        return 3.0 * h / 8.0 * (y[0] + 3.0 * y[1] + 3.0 * y[2] + y[3])
    head = simpson(y[:-3], h)
    return head + 3.0 * h / 8.0 * (y[-4] + 3.0 * y[-3] + 3.0 * y[-2] + y[-1])


def cost_of_trajectory(traj: Trajectory) -> float:
    """Integrate the running cost over the trajectory's own uniform grid."""
    if len(traj.points) < 3:
        raise InsufficientSamplesError(
            f"cost needs at least 3 trajectory samples, got {len(traj.points)}"
        )
    p = traj.params
    t = traj.t
    h = (t[-1] - t[0]) / (len(t) - 1)
    f = [impact_integrand(p, pt.x, -pt.v) for pt in traj.points]
    return float(simpson(f, h))
