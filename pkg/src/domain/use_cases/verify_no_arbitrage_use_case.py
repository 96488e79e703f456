"""Verify No-Arbitrage Use Case - Domain Layer"""
import logging
from typing import Optional

from src.domain.entities.run_report import RunReport
from src.domain.entities.scenario import Scenario
from src.domain.exceptions import DomainError, NumericalError
from src.domain.repositories.results_repository import ResultsRepository
from src.domain.services.market_simulator import MarketSimulator
from src.domain.services.setr_calculator import SetrCalculator
from src.domain.use_cases.compute_setr_use_case import record_numerical_failure, resolve_phi

SE_MULTIPLE = 3.0


class VerifyNoArbitrageUseCase:
    """Use case for the verify command: analytic phi against a Monte Carlo market"""

    def __init__(self, results_repo: ResultsRepository, logger: Optional[logging.Logger] = None):
        self.results_repo = results_repo
        self.logger = logger or logging.getLogger(__name__)

    def execute(self, scenario: Scenario, n_paths: int, report: RunReport, report_format: str = "json") -> str:
        """Run the Monte Carlo check and write the report"""
        if scenario.market is None:
            raise DomainError("The verify command needs a market section")

        calculator = SetrCalculator(scenario.numerics, self.logger)
        simulator = MarketSimulator(workers=scenario.workers, logger=self.logger)

        try:
            phi, phi_source = resolve_phi(calculator, scenario)
            analytic = calculator.expected_premium_earnings(scenario.arrival, scenario.premium)
        except NumericalError as e:
            record_numerical_failure(report, e, self.logger)
            return self.results_repo.write_report(report, scenario.output_dir, report_format)

        mc = simulator.run_monte_carlo(scenario.market, scenario.premium, phi, scenario.arrival, n_paths)
        passed = mc.passes(SE_MULTIPLE)

        report.results = {
            'phi': phi,
            'phi_source': phi_source,
            'analytic_expected_premium_earnings': analytic.to_dict(),
            'monte_carlo': mc.to_dict(),
            'se_multiple': SE_MULTIPLE,
            'passed': passed,
        }
        if passed:
            self.logger.info(f"No-arbitrage check passed: residual {mc.residual:.3e}")
        else:
            report.fail(
                f"residual {mc.residual!r} exceeds {SE_MULTIPLE:g} combined standard errors "
                f"({mc.combined_se!r})"
            )
            self.logger.warning(f"No-arbitrage check failed: residual {mc.residual:.3e}")

        return self.results_repo.write_report(report, scenario.output_dir, report_format)
