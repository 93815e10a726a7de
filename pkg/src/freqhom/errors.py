"""Exception hierarchy shared by the model, estimator and CLI layers."""


class FreqHomError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FreqHomError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(FreqHomError, ValueError):
    """An experiment configuration is incomplete or violates an invariant."""


class DegenerateInputError(FreqHomError, ValueError):
    """Input data make an estimator formula singular (e.g. a zero rate in a denominator)."""


class UnphysicalDataError(FreqHomError, ValueError):
    """Estimated quantity falls outside its physical range."""


class InconsistentDataError(UnphysicalDataError):
    """Measured rates admit no real solution of the transition quadratic."""


class DegenerateConfigError(FreqHomError, ValueError):
    """A configuration for which the requested observable is undefined."""


class QuadratureError(FreqHomError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class TruncationError(FreqHomError, ArithmeticError):
    """Fock-space truncation discards more probability than allowed."""


class FitError(FreqHomError, RuntimeError):
    """A least-squares fit did not converge; ``best`` holds the best iterate found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
