"""Exception types shared across the package."""


class EssprkError(Exception):
    """Base class for all package-specific errors."""


class DomainError(EssprkError, ValueError):
    """A parameter lies outside the range a construction is defined for."""


class TableauParseError(EssprkError, ValueError):
    """A tableau or Shu-Osher document is malformed.

    The message names the offending field.
    """


class OrderConditionsInfeasible(EssprkError, RuntimeError):
    """No point satisfying the order-condition system was found.

    Carries the smallest residual vector seen so the caller can judge
    how far the search got.
    """

    def __init__(self, message, best_residuals=None):
        super().__init__(message)
        self.best_residuals = best_residuals


class NonFiniteState(EssprkError, ArithmeticError):
    """A stage or step update produced inf or nan (blow-up).

    ``stage`` is the index of the stage evaluation that went non-finite,
    ``step`` the time step (when known).
    """

    def __init__(self, message, stage=None, step=None):
        super().__init__(message)
        self.stage = stage
        self.step = step
