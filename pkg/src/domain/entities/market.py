"""Market Simulation Entities - Domain Layer"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from src.domain.exceptions import DomainError

MAX_SEED = 2 ** 64 - 1


class PremiumApplication(str, Enum):
    """How the carbon premium enters the simulated carbon price"""

    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"


@dataclass(frozen=True)
class MarketParams:
    """GBM parameters of the single event market, in days"""

    mu: float
    sigma: float
    horizon: float
    master_seed: int
    s0: float = 1.0
    dt: float = 1.0
    premium_application: PremiumApplication = PremiumApplication.ADDITIVE
    clamp_at_zero: bool = False

    def __post_init__(self) -> None:
        if not math.isfinite(self.mu):
            raise DomainError(f"mu must be finite, got {self.mu}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise DomainError(f"sigma must be nonnegative, got {self.sigma}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise DomainError(f"dt must be positive, got {self.dt}")
        if not (math.isfinite(self.horizon) and self.horizon >= self.dt):
            raise DomainError(f"horizon must be at least dt={self.dt}, got {self.horizon}")
        if not (math.isfinite(self.s0) and self.s0 > 0):
            raise DomainError(f"s0 must be positive, got {self.s0}")
        if not (isinstance(self.master_seed, int) and 0 <= self.master_seed <= MAX_SEED):
            raise DomainError(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed!r}")
        object.__setattr__(self, 'premium_application', PremiumApplication(self.premium_application))

    @property
    def n_steps(self) -> int:
        """Number of dt steps covering the horizon"""
        return int(math.floor(self.horizon / self.dt + 1e-9))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mu_per_day': self.mu,
            'sigma_per_sqrt_day': self.sigma,
            's0': self.s0,
            'dt_days': self.dt,
            'horizon_days': self.horizon,
            'master_seed': self.master_seed,
            'premium_application': self.premium_application.value,
            'clamp_at_zero': self.clamp_at_zero,
        }


@dataclass(frozen=True, eq=False)
class SimulationPath:
    """One paired realisation of the risk-free and carbon-exposed prices"""

    path_index: int
    times: np.ndarray
    riskfree_price: np.ndarray
    carbon_price: np.ndarray
    transition_time: float
    phi_applied: float
    arrival_seed: int
    transition_step: Optional[int] = None
    clamped: bool = False

    def __post_init__(self) -> None:
        n = len(self.times)
        if len(self.riskfree_price) != n or len(self.carbon_price) != n:
            raise DomainError("Path arrays must have equal length")

    @property
    def transitioned_in_horizon(self) -> bool:
        return self.transition_step is not None

    def manifest_entry(self) -> Dict[str, Any]:
        return {
            'path_index': self.path_index,
            'arrival_seed': self.arrival_seed,
            'transition_time_days': self.transition_time,
            'transition_step': self.transition_step,
            'phi_applied': self.phi_applied,
            'clamped': self.clamped,
        }


@dataclass(frozen=True)
class McReport:
    """Monte Carlo estimate of both sides of the weak no-arbitrage identity"""

    n_paths: int
    mean_premium_earned: float
    se_premium: float
    mean_loss: float
    se_loss: float
    residual: float
    fraction_transitioned_in_horizon: float

    @property
    def combined_se(self) -> float:
        return math.hypot(self.se_premium, self.se_loss)

    def passes(self, k: float = 3.0) -> bool:
        """True when the residual lies within k combined standard errors of zero"""
        return abs(self.residual) <= k * self.combined_se

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n_paths': self.n_paths,
            'mean_premium_earned': self.mean_premium_earned,
            'se_premium': self.se_premium,
            'mean_loss': self.mean_loss,
            'se_loss': self.se_loss,
            'residual': self.residual,
            'combined_se': self.combined_se,
            'fraction_transitioned_in_horizon': self.fraction_transitioned_in_horizon,
        }
