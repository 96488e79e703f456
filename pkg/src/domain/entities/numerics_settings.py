"""Numerics Settings Entity - Domain Layer"""
from dataclasses import dataclass

from src.domain.exceptions import DomainError


DEFAULT_REL_TOL = 1e-8
DEFAULT_TAIL_CUTOFF = 1e-12
DEFAULT_HAZARD_FLOOR = 1e-300
DEFAULT_MAX_EVALUATIONS = 1_000_000


@dataclass(frozen=True)
class NumericsSettings:
    """Tolerance and truncation policy shared by every calculation"""

    rel_tol: float = DEFAULT_REL_TOL
    tail_cutoff: float = DEFAULT_TAIL_CUTOFF
    hazard_floor: float = DEFAULT_HAZARD_FLOOR
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS

    def __post_init__(self) -> None:
        if not 0.0 < self.rel_tol < 1.0:
            raise DomainError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if not 0.0 < self.tail_cutoff <= 1e-6:
            raise DomainError(f"tail_cutoff must lie in (0, 1e-6], got {self.tail_cutoff}")
        if not 0.0 <= self.hazard_floor < 1.0:
            raise DomainError(f"hazard_floor must lie in [0, 1), got {self.hazard_floor}")
        if int(self.max_evaluations) < 15:
            raise DomainError(f"max_evaluations must be at least 15, got {self.max_evaluations}")

    def to_dict(self) -> dict:
        """Serialize to a plain dictionary"""
        return {
            'rel_tol': self.rel_tol,
            'tail_cutoff': self.tail_cutoff,
            'hazard_floor': self.hazard_floor,
            'max_evaluations': int(self.max_evaluations),
        }
