"""Scenario Entity - Domain Layer"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

from src.domain.entities.arrival_process import ArrivalProcess
from src.domain.entities.market import MarketParams
from src.domain.entities.numerics_settings import NumericsSettings
from src.domain.entities.premium_model import PremiumModel


class SetrMode(str, Enum):
    """Which SETR calculation a scenario selects"""

    WEAK_CONSTANT = "weak_constant"
    GEOMETRIC = "geometric"
    STRONG_CURVE = "strong_curve"
    RESIDUAL = "residual"
    WEAK_CONDITIONAL = "weak_conditional"


@dataclass(frozen=True)
class Scenario:
    """A validated scenario with its domain objects built"""

    name: str
    arrival: ArrivalProcess
    premium: PremiumModel
    setr_mode: SetrMode
    numerics: NumericsSettings
    output_dir: str
    seed: int = 0
    description: str = ""
    labels: Tuple[str, ...] = field(default_factory=tuple)
    market: Optional[MarketParams] = None
    workers: int = 1
    grid: Tuple[float, ...] = field(default_factory=tuple)
    valuation_day: Optional[float] = None
    phi_override: Optional[float] = None
