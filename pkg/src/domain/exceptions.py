"""Domain Exceptions - Domain Layer"""
from typing import Optional


class SetrError(Exception):
    """Base class for every error raised by the SETR toolkit"""


class ConfigValidationError(SetrError):
    """Scenario or application configuration failed validation"""

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        self.message = message
        super().__init__(f"{field_path}: {message}" if field_path else message)


class DomainError(SetrError, ValueError):
    """A precondition on a domain quantity was violated"""


class NumericalError(SetrError):
    """Base class for failures of a numerical procedure"""


class NonConvergence(NumericalError):
    """Adaptive refinement ran out of budget before meeting the tolerance"""

    def __init__(self, message: str, evaluations: int = 0, abs_error_estimate: Optional[float] = None):
        self.evaluations = evaluations
        self.abs_error_estimate = abs_error_estimate
        super().__init__(message)


class NonFiniteIntegrand(NumericalError):
    """The integrand returned NaN or infinity inside the domain"""

    def __init__(self, message: str, point: Optional[float] = None):
        self.point = point
        super().__init__(message)


class DivergentExpectation(NumericalError):
    """An expectation required by the calculation is infinite"""


class TailUndefined(NumericalError):
    """Survival probability is too small for a conditional quantity to exist"""

    def __init__(self, message: str, t: Optional[float] = None):
        self.t = t
        super().__init__(message)
