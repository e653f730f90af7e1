"""Optimal trade execution under power-law market impact.

The terminal trading speed is found by shooting on a hypergeometric
closed form; the path follows by monotone inversion and is checked against
an RK4 integration of the first-order speed law.
"""

from .errors import (
    BracketFailureError,
    DomainError,
    ExecHyperError,
    InsufficientSamplesError,
    InversionFailureError,
    NoConvergenceError,
    NoRootError,
    StepFailureError,
    ValidationError,
)
from .model import (
    ModelParams,
    Trajectory,
    TrajectoryPoint,
    beltrami_constant,
    cost_of_trajectory,
    impact_integrand,
    legendre_check,
)
from .solver import (
    ShootingResult,
    SolveReport,
    closed_form_k1,
    implicit_time_of_x,
    shooting_lhs,
    solve,
    solve_v0,
    speed_at_x,
    x_at_time,
    zero_speed_admissible,
    zero_speed_depletion_time,
    zero_speed_x,
    zero_speed_x0,
)
from .specfun import Hyp2F1Eval, Hyp2F1Params, gamma_fn, hyp2f1, hyp2f1_quadrature, pochhammer
from .verify import OdeSolution, cross_validate, integrate_first_order, reduction_check

__version__ = "0.1.0"
