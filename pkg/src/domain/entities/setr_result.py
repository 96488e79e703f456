"""SETR Result Entities - Domain Layer"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Tuple


class SetrMethod(str, Enum):
    """How a SETR figure was obtained"""

    WEAK_CONSTANT = "WeakConstant"
    GEOMETRIC_PREMIUM = "GeometricPremium"
    STRONG_CURVE_POINT = "StrongCurvePoint"
    STRONG_CURVE = "StrongCurve"
    RESIDUAL_CHECK = "ResidualCheck"
    EXPECTED_EARNINGS = "ExpectedEarnings"
    WEAK_CONDITIONAL = "WeakConditional"
    STRONG_RESIDUAL = "StrongResidual"


@dataclass(frozen=True)
class SetrResult:
    """A single SETR value (price units, share normalised to 1 at t0)"""

    value: float
    abs_error_estimate: float
    method: SetrMethod
    evaluations: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'value': self.value,
            'abs_error_estimate': self.abs_error_estimate,
            'method': self.method.value,
            'evaluations': self.evaluations,
        }


@dataclass(frozen=True)
class SkippedPoint:
    """A grid point left out of a strong curve, with the reason"""

    t_prime: float
    reason: str


@dataclass(frozen=True)
class SetrCurve:
    """Strong no-arbitrage SETR evaluated over a time grid"""

    grid: Tuple[float, ...]
    values: Tuple[float, ...]
    skipped: Tuple[SkippedPoint, ...] = field(default_factory=tuple)
    method: SetrMethod = SetrMethod.STRONG_CURVE

    def rows(self) -> List[Tuple[float, float]]:
        """(t_prime_days, phi) pairs in grid order"""
        return list(zip(self.grid, self.values))

    def spread(self) -> float:
        """max - min of the computed values"""
        if not self.values:
            return 0.0
        return max(self.values) - min(self.values)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'method': self.method.value,
            'points': len(self.values),
            'grid_days': list(self.grid),
            'phi': list(self.values),
            'skipped': [{'t_prime_days': p.t_prime, 'reason': p.reason} for p in self.skipped],
        }
