"""Exception types shared across the package."""

from __future__ import annotations


class CostLabError(Exception):
    """Base class for all library-specific errors."""


class WeightOverflow(CostLabError):
    """A request schedule exceeded the unit Kraft budget."""


class Mismatch(CostLabError):
    """Two approximations expected to share a final set do not."""


class StageSeqExhausted(CostLabError):
    """A look-ahead stage sequence could not be continued within the horizon."""


class CutoffNotFound(CostLabError):
    """No trim cutoff achieves the requested cost bound at this horizon.

    Carries the best residual total that was achievable.
    """

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


class NoWitness(CostLabError):
    """A positivity or domination-failure witness was not found at the horizon."""


class NotErasing(CostLabError):
    """An approximation violates the erasing discipline."""


class NonAdditive(CostLabError):
    """A cost function declared additive fails the telescoping identity."""


class ScheduleInsufficient(CostLabError):
    """The complexity provider lacks the short descriptions a construction needs."""


class BudgetExceeded(CostLabError):
    """A precondition cost budget was exceeded."""


class ParseError(CostLabError):
    """A serialized artifact failed line validation."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
