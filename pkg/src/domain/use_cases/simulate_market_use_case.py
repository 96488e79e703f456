"""Simulate Single Event Market Use Case - Domain Layer"""
import logging
from pathlib import Path
from typing import Optional

from src.domain.entities.market import PremiumApplication
from src.domain.entities.run_report import RunReport
from src.domain.entities.scenario import Scenario
from src.domain.exceptions import DomainError, NumericalError
from src.domain.repositories.results_repository import ResultsRepository
from src.domain.services.market_simulator import MarketSimulator
from src.domain.services.setr_calculator import SetrCalculator
from src.domain.use_cases.compute_setr_use_case import record_numerical_failure, resolve_phi

PREMIUM_LEVEL_NOTE = {
    PremiumApplication.ADDITIVE.value: "premium accumulated A(t) is added to the price level",
    PremiumApplication.MULTIPLICATIVE.value: "premium accumulated A(t) is added to the log price",
}


class SimulateMarketUseCase:
    """Use case for the simulate command"""

    def __init__(self, results_repo: ResultsRepository, logger: Optional[logging.Logger] = None):
        self.results_repo = results_repo
        self.logger = logger or logging.getLogger(__name__)

    def execute(self, scenario: Scenario, n_paths: int, report: RunReport, report_format: str = "json") -> str:
        """Simulate n_paths paired price paths, export them and write the report"""
        if scenario.market is None:
            raise DomainError("The simulate command needs a market section")
        if n_paths < 1:
            raise DomainError(f"n_paths must be at least 1, got {n_paths}")

        calculator = SetrCalculator(scenario.numerics, self.logger)
        simulator = MarketSimulator(workers=scenario.workers, logger=self.logger)
        params = scenario.market

        try:
            phi, phi_source = resolve_phi(calculator, scenario)
        except NumericalError as e:
            record_numerical_failure(report, e, self.logger)
            return self.results_repo.write_report(report, scenario.output_dir, report_format)

        self.logger.info(f"Simulating {n_paths} paths with phi={phi:.6g} ({phi_source})")
        paths = simulator.simulate_paths(params, scenario.premium, phi, scenario.arrival, n_paths)

        metadata = {
            'scenario': scenario.name,
            'phi': phi,
            'phi_source': phi_source,
            'market': params.to_dict(),
            'premium': scenario.premium.to_dict(),
            'arrival': scenario.arrival.to_dict(),
            'premium_level_note': PREMIUM_LEVEL_NOTE[params.premium_application.value],
        }
        files = self.results_repo.export_paths(paths, metadata, scenario.output_dir)
        self.logger.info(f"Exported {len(paths)} paths to {scenario.output_dir}")

        for path in paths:
            if path.clamped:
                report.add_warning(f"path {path.path_index}: carbon price clamped at zero after the shock")

        report.results = {
            'n_paths': n_paths,
            'phi': phi,
            'phi_source': phi_source,
            'files': [Path(f).name for f in files],
            'transition_times_days': [path.transition_time for path in paths],
            'transitioned_in_horizon': sum(1 for path in paths if path.transitioned_in_horizon),
        }
        report.diagnostics['premium_level_note'] = metadata['premium_level_note']
        return self.results_repo.write_report(report, scenario.output_dir, report_format)
