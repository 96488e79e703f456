"""Compute SETR Use Case - Domain Layer"""
import logging
from typing import Any, Dict, Optional, Tuple

from src.domain.entities.premium_model import ConstantPremium, GeometricPremium, PremiumModel
from src.domain.entities.run_report import RunReport
from src.domain.entities.scenario import Scenario, SetrMode
from src.domain.exceptions import DomainError, NumericalError
from src.domain.repositories.results_repository import ResultsRepository
from src.domain.services.setr_calculator import SetrCalculator

GROWTH_ORIGIN_NOTE = (
    "geometric premium growth is measured from t0: p(s) = p0 * exp(lambda * (s - t0))"
)


def geometric_parameters(premium: PremiumModel) -> Tuple[float, float]:
    """(p0, lambda) of a premium, a constant premium being lambda = 0"""
    if isinstance(premium, GeometricPremium):
        return premium.p0, premium.lam
    if isinstance(premium, ConstantPremium):
        return premium.p, 0.0
    raise DomainError(f"Unsupported premium kind: {premium.kind}")


def evaluate_setr(calculator: SetrCalculator, scenario: Scenario, report: RunReport) -> Dict[str, Any]:
    """Run the calculation selected by the scenario's setr_mode"""
    arrival = scenario.arrival
    premium = scenario.premium
    mode = scenario.setr_mode
    results: Dict[str, Any] = {'setr_mode': mode.value}

    if mode is SetrMode.WEAK_CONSTANT:
        p = calculator.constant_rate(premium)
        results['setr'] = calculator.setr_weak_constant(arrival, p).to_dict()

    elif mode is SetrMode.GEOMETRIC:
        p0, lam = geometric_parameters(premium)
        report.add_warning(GROWTH_ORIGIN_NOTE)
        results['setr'] = calculator.setr_geometric(arrival, p0, lam).to_dict()

    elif mode is SetrMode.STRONG_CURVE:
        p = calculator.constant_rate(premium)
        curve = calculator.setr_strong_curve(arrival, p, scenario.grid)
        for point in curve.skipped:
            report.add_warning(f"grid point t'={point.t_prime!r} skipped: {point.reason}")
        results['curve'] = curve.to_dict()
        results['spread'] = curve.spread()

    elif mode is SetrMode.RESIDUAL:
        if scenario.phi_override is None:
            raise DomainError("residual mode needs phi_override")
        residual = calculator.noarb_residual(arrival, premium, scenario.phi_override)
        results['phi'] = scenario.phi_override
        results['residual'] = residual.to_dict()

    elif mode is SetrMode.WEAK_CONDITIONAL:
        if scenario.valuation_day is None:
            raise DomainError("weak_conditional mode needs valuation_day")
        p = calculator.constant_rate(premium)
        results['valuation_day'] = scenario.valuation_day
        results['setr'] = calculator.setr_weak_conditional(arrival, p, scenario.valuation_day).to_dict()

    return results


def resolve_phi(calculator: SetrCalculator, scenario: Scenario) -> Tuple[float, str]:
    """Shock size for simulation: the override if given, else the weak SETR"""
    if scenario.phi_override is not None:
        return scenario.phi_override, "phi_override"
    if scenario.setr_mode is SetrMode.WEAK_CONSTANT:
        p = calculator.constant_rate(scenario.premium)
        return calculator.setr_weak_constant(scenario.arrival, p).value, SetrMode.WEAK_CONSTANT.value
    if scenario.setr_mode is SetrMode.GEOMETRIC:
        p0, lam = geometric_parameters(scenario.premium)
        return calculator.setr_geometric(scenario.arrival, p0, lam).value, SetrMode.GEOMETRIC.value
    raise DomainError(
        f"setr_mode '{scenario.setr_mode.value}' does not give a single shock size; "
        f"set phi_override or use weak_constant or geometric"
    )


def record_numerical_failure(report: RunReport, error: NumericalError, logger: logging.Logger) -> None:
    """Mark the report failed with the error kind and message"""
    kind = type(error).__name__
    logger.error(f"{kind}: {error}")
    report.fail(f"{kind}: {error}")
    report.diagnostics['error'] = {'type': kind, 'message': str(error)}


class ComputeSetrUseCase:
    """Use case for the compute command"""

    def __init__(self, results_repo: ResultsRepository, logger: Optional[logging.Logger] = None):
        self.results_repo = results_repo
        self.logger = logger or logging.getLogger(__name__)

    def execute(self, scenario: Scenario, report: RunReport, report_format: str = "json") -> str:
        """Compute the scenario's SETR and write the report; returns the report path"""
        calculator = SetrCalculator(scenario.numerics, self.logger)
        self.logger.info(f"Computing {scenario.setr_mode.value} SETR for scenario '{scenario.name}'")

        try:
            report.results = evaluate_setr(calculator, scenario, report)
        except NumericalError as e:
            record_numerical_failure(report, e, self.logger)

        return self.results_repo.write_report(report, scenario.output_dir, report_format)
