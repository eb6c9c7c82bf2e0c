"""Exception types shared across the package."""


class HypmaxError(Exception):
    """Base class for all package errors."""


class DomainError(HypmaxError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class QuadratureError(HypmaxError, ArithmeticError):
    """A quadrature failed to converge within its panel budget.

    ``estimate`` carries the last (unconverged) value so callers can still
    inspect it.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class TailBoundError(HypmaxError, ArithmeticError):
    """A truncated spectral integral has a tail above the requested bound."""


class ConfigurationError(HypmaxError, ValueError):
    """A geometric or numerical configuration violates a precondition."""
