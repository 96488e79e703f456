"""Compute Strong SETR Curve Use Case - Domain Layer"""
import logging
from pathlib import Path
from typing import Optional

from src.domain.entities.run_report import RunReport
from src.domain.entities.scenario import Scenario
from src.domain.exceptions import DomainError, NumericalError
from src.domain.repositories.results_repository import ResultsRepository
from src.domain.services.setr_calculator import SetrCalculator
from src.domain.use_cases.compute_setr_use_case import record_numerical_failure


class ComputeCurveUseCase:
    """Use case for the curve command"""

    def __init__(self, results_repo: ResultsRepository, logger: Optional[logging.Logger] = None):
        self.results_repo = results_repo
        self.logger = logger or logging.getLogger(__name__)

    def execute(self, scenario: Scenario, report: RunReport, report_format: str = "json") -> str:
        """Evaluate the strong curve on the scenario grid, export it and write the report"""
        if not scenario.grid:
            raise DomainError("The curve command needs a non-empty grid_days")

        calculator = SetrCalculator(scenario.numerics, self.logger)
        self.logger.info(f"Computing strong SETR curve on {len(scenario.grid)} grid points")

        try:
            p = calculator.constant_rate(scenario.premium)
            curve = calculator.setr_strong_curve(scenario.arrival, p, scenario.grid)
        except NumericalError as e:
            record_numerical_failure(report, e, self.logger)
        else:
            curve_file = self.results_repo.export_curve(curve, scenario.output_dir)
            self.logger.info(f"Exported strong curve to {curve_file}")
            for point in curve.skipped:
                report.add_warning(f"grid point t'={point.t_prime!r} skipped: {point.reason}")
            report.results = {
                'curve_file': Path(curve_file).name,
                'points': len(curve.values),
                'skipped': len(curve.skipped),
                'spread': curve.spread(),
                'curve': curve.to_dict(),
            }

        return self.results_repo.write_report(report, scenario.output_dir, report_format)
