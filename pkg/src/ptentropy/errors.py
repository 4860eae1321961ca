"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class ConvergenceError(ArithmeticError):
    """A quadrature or transform failed to meet its tolerance.

    The last available estimate is kept on the exception so callers can
    decide whether it is still usable.
    """

    def __init__(self, message, value=None, err_estimate=None):
        super().__init__(message)
        self.value = value
        self.err_estimate = err_estimate
