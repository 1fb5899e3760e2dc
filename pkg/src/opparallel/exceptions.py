"""Exception types raised across the package."""


class InputError(ValueError):
    """Malformed input: wrong shape, non-finite entries, bad JSON."""


class DomainError(ValueError):
    """Input is well formed but outside the mathematical domain of an operation."""


class NumericError(ArithmeticError):
    """An iterative method failed to meet its contract.

    The attribute ``residual`` carries the last measured residual so callers
    can decide whether the failure is benign.
    """

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = float(residual)
