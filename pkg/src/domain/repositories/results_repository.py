"""Results Repository Interface - Domain Layer"""
from abc import ABC, abstractmethod
from typing import Any, Dict, List

from src.domain.entities.market import SimulationPath
from src.domain.entities.run_report import RunReport
from src.domain.entities.setr_result import SetrCurve


class ResultsRepository(ABC):
    """Abstract interface for writing command outputs"""

    @abstractmethod
    def export_curve(self, curve: SetrCurve, output_path: str) -> str:
        """Export a strong SETR curve as a t_prime_days, phi table"""
        pass

    @abstractmethod
    def export_paths(self, paths: List[SimulationPath], metadata: Dict[str, Any], output_path: str) -> List[str]:
        """Export one table per path plus a manifest; returns the written files"""
        pass

    @abstractmethod
    def write_report(self, report: RunReport, output_path: str, report_format: str = "json") -> str:
        """Write a run report"""
        pass
