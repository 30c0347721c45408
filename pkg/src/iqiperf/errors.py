"""Exception hierarchy shared by all modules."""


class IqiError(Exception):
    """Base class for every error raised by this package."""


class DomainError(IqiError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class InfeasibleParametersError(DomainError):
    """No front-end parameters satisfy the requested constraint."""


class UsageError(IqiError, ValueError):
    """Objects were combined in a way the API does not allow."""


class DegenerateModelError(IqiError, ValueError):
    """The impairment coefficients describe a non-physical link."""


class UnsupportedError(IqiError, NotImplementedError):
    """The requested combination has no implementation (by design)."""


class AccuracyError(IqiError, ArithmeticError):
    """A numerical routine failed to reach its tolerance.

    The best available estimate is kept on ``best_estimate``.
    """

    def __init__(self, message, best_estimate=float("nan")):
        super().__init__(message)
        self.best_estimate = best_estimate


class ConfigError(IqiError, ValueError):
    """A sweep configuration document is malformed or inconsistent."""
