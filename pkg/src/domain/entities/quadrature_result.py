"""Quadrature Result Entity - Domain Layer"""
from dataclasses import dataclass


@dataclass(frozen=True)
class QuadratureResult:
    """Value of a definite integral with its error estimate"""

    value: float
    abs_error_estimate: float
    evaluations: int

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(
            value=self.value + other.value,
            abs_error_estimate=self.abs_error_estimate + other.abs_error_estimate,
            evaluations=self.evaluations + other.evaluations,
        )
