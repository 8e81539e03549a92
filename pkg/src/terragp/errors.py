"""Exception types raised by terragp."""


class TerragpError(Exception):
    """Base class for all terragp-specific failures."""


class EnvironmentFormatError(TerragpError):
    """Environment file failed to parse or violated a grid invariant."""


class GpSolveError(TerragpError):
    """Gram matrix stayed numerically singular through the jitter ladder."""


class UnreachableGoalError(TerragpError):
    """No path exists from start to goal on the cost map."""


class ReplanBudgetError(TerragpError):
    """Navigation exhausted its replanning budget before reaching the goal.

    Carries the partial episode so callers can still persist the trajectory.
    """

    def __init__(self, message, run=None):
        super().__init__(message)
        self.run = run
