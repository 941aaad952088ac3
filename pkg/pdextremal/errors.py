"""Exception types raised across the package."""


class PDExtremalError(Exception):
    """Base class for every error raised by pdextremal."""


class DomainError(PDExtremalError, ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class InvalidIntervalError(DomainError):
    """Raised when an interval has `lo >= hi`."""


class InfeasibleParametersError(DomainError):
    """Raised when witness parameters violate one of the inequalities they must satisfy."""

    def __init__(self, inequality: str, detail: str = ""):
        self.inequality = inequality
        message = f"violated inequality: {inequality}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class EvaluationError(PDExtremalError, ArithmeticError):
    """Raised when a sampled function returns a non-finite value."""


class DegenerateDenominatorError(EvaluationError):
    """Raised when the normalising integral over [-1, 1] is numerically zero."""


class NotEvenError(PDExtremalError, ValueError):
    """Raised when a function handed to the Toeplitz test is not even."""


class InfeasibleConcentrationError(PDExtremalError):
    """Raised when no cosine power below the cap reaches the requested concentration."""
