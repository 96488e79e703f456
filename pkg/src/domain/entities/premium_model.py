"""Premium Model Entity - Domain Layer"""
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar, Dict, Union

import numpy as np

from src.domain.exceptions import DomainError

ArrayLike = Union[float, np.ndarray]

# Below this growth rate the geometric premium is evaluated by its linear limit
SMALL_LAMBDA = 1e-14


def _elapsed(model: "PremiumModel", s: ArrayLike) -> np.ndarray:
    x = np.asarray(s, dtype=float) - model.t0
    if np.any(x < 0):
        raise DomainError(f"Premium is only defined from t0={model.t0}; got s={s}")
    return x


def _out(values: np.ndarray, like: ArrayLike) -> ArrayLike:
    if np.ndim(like) == 0:
        return float(values)
    return values


@dataclass(frozen=True, kw_only=True)
class PremiumModel(ABC):
    """Carbon premium rate p(s), an absolute price increment per day on S(t0)=1"""

    t0: float = 0.0

    kind: ClassVar[str] = ""

    @abstractmethod
    def rate_at(self, s: ArrayLike) -> ArrayLike:
        """Premium rate at day s"""

    @abstractmethod
    def cumulative(self, t: ArrayLike) -> ArrayLike:
        """Accumulated premium A(t), the integral of the rate from t0 to t"""

    @abstractmethod
    def growth_rate(self) -> float:
        """Exponential growth rate of p(s)"""

    @abstractmethod
    def parameters(self) -> Dict[str, Any]:
        """Kind-specific parameters for serialization"""

    def log_rate_offset(self) -> float:
        """log p(t0), or -inf for a zero premium"""
        p0 = float(self.rate_at(self.t0))
        return math.log(p0) if p0 > 0 else -math.inf

    def is_zero(self) -> bool:
        return float(self.rate_at(self.t0)) == 0.0

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'kind': self.kind}
        data.update(self.parameters())
        return data


@dataclass(frozen=True, kw_only=True)
class ConstantPremium(PremiumModel):
    """Premium fixed at p per day"""

    p: float

    kind: ClassVar[str] = "constant"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p) and self.p >= 0):
            raise DomainError(f"Premium must be nonnegative, got p={self.p}")

    def rate_at(self, s: ArrayLike) -> ArrayLike:
        x = _elapsed(self, s)
        return _out(np.full(x.shape, self.p), s)

    def cumulative(self, t: ArrayLike) -> ArrayLike:
        return _out(self.p * _elapsed(self, t), t)

    def growth_rate(self) -> float:
        return 0.0

    def parameters(self) -> Dict[str, Any]:
        return {'p_per_day': self.p}


@dataclass(frozen=True, kw_only=True)
class GeometricPremium(PremiumModel):
    """Premium growing as p0 * exp(lambda * (s - t0))"""

    p0: float
    lam: float

    kind: ClassVar[str] = "geometric"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p0) and self.p0 >= 0):
            raise DomainError(f"Initial premium must be nonnegative, got p0={self.p0}")
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise DomainError(f"Growth rate must be nonnegative, got lambda={self.lam}")

    def rate_at(self, s: ArrayLike) -> ArrayLike:
        x = _elapsed(self, s)
        return _out(self.p0 * np.exp(self.lam * x), s)

    def cumulative(self, t: ArrayLike) -> ArrayLike:
        x = _elapsed(self, t)
        if self.lam < SMALL_LAMBDA:
            return _out(self.p0 * x, t)
        return _out(self.p0 * np.expm1(self.lam * x) / self.lam, t)

    def growth_rate(self) -> float:
        return self.lam

    def parameters(self) -> Dict[str, Any]:
        return {'p0_per_day': self.p0, 'lambda_per_day': self.lam}
