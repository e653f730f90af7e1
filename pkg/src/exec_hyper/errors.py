"""Exception hierarchy shared by the solver, oracles and CLI."""

from __future__ import annotations


class ExecHyperError(Exception):
    """Base class. ``kind`` is the short tag used in CLI error payloads."""

    kind = "error"


class DomainError(ExecHyperError, ValueError):
    kind = "domain"


class ValidationError(ExecHyperError, ValueError):
    """Invalid user-supplied parameter. ``field`` names the offending input."""

    kind = "validation"

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class NoConvergenceError(ExecHyperError, ArithmeticError):
    kind = "no-convergence"


class NoRootError(ExecHyperError):
    """The shooting equation has no positive root.

    Raised for k > 1 when the horizon is at least the zero-speed depletion
    time; ``boundary_time`` carries that time.
    """

    kind = "no-root"

    def __init__(self, message: str, boundary_time: float):
        super().__init__(message)
        self.boundary_time = boundary_time


class BracketFailureError(ExecHyperError):
    kind = "bracket-failure"


class InversionFailureError(ExecHyperError):
    kind = "inversion-failure"


class InsufficientSamplesError(ExecHyperError, ValueError):
    kind = "insufficient-samples"


class StepFailureError(ExecHyperError, ArithmeticError):
    kind = "step-failure"
