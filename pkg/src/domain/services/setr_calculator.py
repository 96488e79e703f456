"""SETR Calculator - Domain Services

Turns a carbon premium and an arrival process into the Single Event
Transition Risk under the weak and strong no-arbitrage conditions.
"""
import logging
import math
from typing import Callable, Iterable, List, Optional

import numpy as np

from src.domain.entities.arrival_process import ArrivalProcess
from src.domain.entities.numerics_settings import NumericsSettings
from src.domain.entities.premium_model import ConstantPremium, GeometricPremium, PremiumModel
from src.domain.entities.quadrature_result import QuadratureResult
from src.domain.entities.setr_result import SetrCurve, SetrMethod, SetrResult, SkippedPoint
from src.domain.exceptions import DivergentExpectation, DomainError, TailUndefined
from src.domain.services import quadrature

# Above this exponent the geometric integrand is assembled in log space
_LOG_SPACE_EXPONENT = 600.0


class SetrCalculator:
    """Weak/strong no-arbitrage SETR and the premium-earnings identities"""

    def __init__(self, settings: Optional[NumericsSettings] = None, logger: Optional[logging.Logger] = None):
        self.settings = settings or NumericsSettings()
        self.logger = logger or logging.getLogger(__name__)

    # -- weak no-arbitrage -------------------------------------------------

    def expected_premium_earnings(self, arrival: ArrivalProcess, premium: PremiumModel) -> SetrResult:
        """E(A) = integral of p(s) * survival(s) over [t0, inf).

        Same value as the nested form integral f(t) A(t) dt after swapping the
        order of integration, at the cost of a single quadrature.
        """
        self._check_origin(arrival, premium)
        arrival.finite_mean()

        if premium.is_zero():
            return SetrResult(0.0, 0.0, SetrMethod.EXPECTED_EARNINGS, 0)
        if not arrival.has_density():
            value = float(premium.cumulative(arrival.mean()))
            return SetrResult(value, 0.0, SetrMethod.EXPECTED_EARNINGS, 1)

        self._check_growth_converges(arrival, premium)
        integrand = self._discounted_rate_integrand(arrival, premium)
        result = self._integrate_expectation(integrand, arrival)
        self.logger.debug(
            f"E(A) = {result.value:.12g} +/- {result.abs_error_estimate:.2e} "
            f"({result.evaluations} evaluations)"
        )
        return SetrResult(result.value, result.abs_error_estimate, SetrMethod.EXPECTED_EARNINGS, result.evaluations)

    def expected_premium_earnings_nested(self, arrival: ArrivalProcess, premium: PremiumModel) -> SetrResult:
        """E(A) from the literal double integral, inner premium sum by quadrature.

        Slow; kept as an independent check on expected_premium_earnings.
        """
        self._check_origin(arrival, premium)
        arrival.finite_mean()
        t0 = arrival.t0

        def accumulated(t: float) -> float:
            return quadrature.integrate(premium.rate_at, t0, t, self.settings.rel_tol).value

        if not arrival.has_density():
            return SetrResult(accumulated(arrival.mean()), 0.0, SetrMethod.EXPECTED_EARNINGS, 1)

        self._check_growth_converges(arrival, premium)

        def outer(t: np.ndarray) -> np.ndarray:
            t = np.atleast_1d(np.asarray(t, dtype=float))
            inner = np.array([accumulated(float(ti)) for ti in t])
            return np.asarray(arrival.pdf(t), dtype=float) * inner

        result = self._integrate_expectation(outer, arrival)
        return SetrResult(result.value, result.abs_error_estimate, SetrMethod.EXPECTED_EARNINGS, result.evaluations)

    def setr_weak_constant(self, arrival: ArrivalProcess, p: float) -> SetrResult:
        """Constant SETR phi = p * (E(t) - t0)"""
        self._check_premium(p)
        mean = arrival.finite_mean()
        value = p * (mean - arrival.t0)
        self.logger.debug(f"Weak constant SETR: p={p} E(t)={mean:.12g} -> phi={value:.12g}")
        return SetrResult(value, 0.0, SetrMethod.WEAK_CONSTANT, 0)

    def setr_weak_conditional(self, arrival: ArrivalProcess, p: float, t_prime: float) -> SetrResult:
        """Constant SETR re-evaluated at t' given no transition so far.

        phi(t') = p * (E(t | t > t') - t'), the weak condition restarted at t'.
        """
        self._check_premium(p)
        if t_prime < arrival.t0:
            raise DomainError(f"Valuation day {t_prime} precedes t0={arrival.t0}")
        arrival.finite_mean()
        conditional = arrival.conditional_mean_result(t_prime, self.settings)
        return SetrResult(
            p * (conditional.value - t_prime),
            p * conditional.abs_error_estimate,
            SetrMethod.WEAK_CONDITIONAL,
            conditional.evaluations,
        )

    def setr_geometric(self, arrival: ArrivalProcess, p0: float, lam: float) -> SetrResult:
        """Constant SETR for a premium growing as p0 * exp(lam * (s - t0)).

        Evaluated as the expectation of the accumulated premium
        (p0 / lam) * expm1(lam * (t - t0)) under the arrival density.
        """
        premium = GeometricPremium(p0=p0, lam=lam, t0=arrival.t0)
        arrival.finite_mean()

        if premium.is_zero():
            return SetrResult(0.0, 0.0, SetrMethod.GEOMETRIC_PREMIUM, 0)
        if not arrival.has_density():
            value = float(premium.cumulative(arrival.mean()))
            return SetrResult(value, 0.0, SetrMethod.GEOMETRIC_PREMIUM, 1)

        self._check_growth_converges(arrival, premium)
        t0 = arrival.t0
        log_scale = math.log(p0 / lam) if lam > 0 else 0.0

        def integrand(t: np.ndarray) -> np.ndarray:
            t = np.asarray(t, dtype=float)
            density = np.asarray(arrival.pdf(t), dtype=float)
            exponent = lam * (t - t0)
            large = exponent > _LOG_SPACE_EXPONENT
            accumulated = np.asarray(premium.cumulative(np.where(large, t0, t)), dtype=float)
            if not np.any(large):
                return density * accumulated
            tail = np.exp(np.asarray(arrival.log_pdf(t), dtype=float) + exponent + log_scale)
            return np.where(large, tail, density * accumulated)

        result = self._integrate_expectation(integrand, arrival)
        self.logger.debug(
            f"Geometric SETR p0={p0} lambda={lam}: {result.value:.12g} "
            f"+/- {result.abs_error_estimate:.2e}"
        )
        return SetrResult(result.value, result.abs_error_estimate, SetrMethod.GEOMETRIC_PREMIUM, result.evaluations)

    def noarb_residual(self, arrival: ArrivalProcess, premium: PremiumModel, phi_const: float) -> SetrResult:
        """E(A) - phi: zero exactly when the weak condition holds for a constant SETR"""
        earnings = self.expected_premium_earnings(arrival, premium)
        return SetrResult(
            earnings.value - phi_const,
            earnings.abs_error_estimate,
            SetrMethod.RESIDUAL_CHECK,
            earnings.evaluations,
        )

    # -- strong no-arbitrage -----------------------------------------------

    def setr_strong_curve(self, arrival: ArrivalProcess, p: float, grid: Iterable[float]) -> SetrCurve:
        """phi(t') = p * survival(t') / pdf(t') = p / hazard(t') over a grid.

        Points without a usable density or with an undefined hazard are left
        out and listed in the curve's skipped points.
        """
        self._check_premium(p)
        points = self._validate_grid(arrival, grid)

        grid_out: List[float] = []
        values: List[float] = []
        skipped: List[SkippedPoint] = []

        for t_prime in points:
            try:
                point = self._strong_point(arrival, p, t_prime)
            except (DomainError, TailUndefined) as exc:
                skipped.append(SkippedPoint(t_prime=t_prime, reason=str(exc)))
            else:
                grid_out.append(t_prime)
                values.append(point.value)

        if skipped:
            self.logger.warning(f"Strong curve skipped {len(skipped)} of {len(points)} grid points")
        return SetrCurve(grid=tuple(grid_out), values=tuple(values), skipped=tuple(skipped))

    def setr_strong_point(self, arrival: ArrivalProcess, p: float, t_prime: float) -> SetrResult:
        """Strong SETR at a single transition time"""
        self._check_premium(p)
        self._validate_grid(arrival, [t_prime])
        return self._strong_point(arrival, p, t_prime)

    def _strong_point(self, arrival: ArrivalProcess, p: float, t_prime: float) -> SetrResult:
        reason = self._strong_point_obstacle(arrival, t_prime)
        if reason is not None:
            raise DomainError(reason)
        rate = arrival.hazard(t_prime, self.settings.hazard_floor)
        value = 0.0 if math.isinf(rate) else p / rate
        return SetrResult(value, 0.0, SetrMethod.STRONG_CURVE_POINT, 1)

    def strong_noarb_residual(self, arrival: ArrivalProcess, p: float, t_prime: float) -> SetrResult:
        """Conditional no-arbitrage residual at t' for the strong curve.

        p * (E(t | t > t') - t') minus the conditional expected loss
        (1 / survival(t')) * integral over (t', inf) of phi(t) f(t), where phi
        is the strong curve. Stretches with zero density carry no phi and
        show up as a nonzero residual.
        """
        self._check_premium(p)
        if not arrival.has_density():
            raise DomainError(f"{arrival.kind} arrival has no density; the strong curve does not exist")
        if t_prime < arrival.t0:
            raise DomainError(f"t' = {t_prime} precedes t0={arrival.t0}")

        conditional = arrival.conditional_mean_result(t_prime, self.settings)
        earned = p * (conditional.value - t_prime)

        def loss_density(t: np.ndarray) -> np.ndarray:
            t = np.asarray(t, dtype=float)
            density = np.asarray(arrival.pdf(t), dtype=float)
            return p * np.where(density > 0, np.asarray(arrival.survival(t), dtype=float), 0.0)

        survival = float(arrival.survival(t_prime))
        upper = arrival.truncation_point(max(self.settings.tail_cutoff * survival, 5e-324))
        loss = quadrature.integrate_to_tail(
            loss_density,
            t_prime,
            upper,
            rel_tol=self.settings.rel_tol,
            tail_cutoff=self.settings.tail_cutoff,
            max_evaluations=self.settings.max_evaluations,
            breakpoints=arrival.breakpoints(),
        )
        return SetrResult(
            earned - loss.value / survival,
            p * conditional.abs_error_estimate + loss.abs_error_estimate / survival,
            SetrMethod.STRONG_RESIDUAL,
            conditional.evaluations + loss.evaluations,
        )

    # -- helpers -----------------------------------------------------------

    def _integrate_expectation(self, integrand: Callable[[np.ndarray], np.ndarray], arrival: ArrivalProcess) -> QuadratureResult:
        upper = arrival.truncation_point(self.settings.tail_cutoff)
        return quadrature.integrate_to_tail(
            integrand,
            arrival.t0,
            upper,
            rel_tol=self.settings.rel_tol,
            tail_cutoff=self.settings.tail_cutoff,
            max_evaluations=self.settings.max_evaluations,
            breakpoints=arrival.breakpoints(),
        )

    @staticmethod
    def _discounted_rate_integrand(arrival: ArrivalProcess, premium: PremiumModel) -> Callable[[np.ndarray], np.ndarray]:
        """p(s) * survival(s), built in log space when the premium grows"""
        lam = premium.growth_rate()
        if lam == 0.0:
            return lambda s: np.asarray(premium.rate_at(s), dtype=float) * np.asarray(arrival.survival(s), dtype=float)

        log_p0 = premium.log_rate_offset()
        t0 = premium.t0

        def integrand(s: np.ndarray) -> np.ndarray:
            s = np.asarray(s, dtype=float)
            return np.exp(log_p0 + lam * (s - t0) + np.asarray(arrival.log_survival(s), dtype=float))

        return integrand

    @staticmethod
    def _check_origin(arrival: ArrivalProcess, premium: PremiumModel) -> None:
        if arrival.t0 != premium.t0:
            raise DomainError(
                f"Arrival origin t0={arrival.t0} and premium origin t0={premium.t0} must coincide"
            )

    @staticmethod
    def _check_premium(p: float) -> None:
        if not (math.isfinite(p) and p >= 0):
            raise DomainError(f"Premium must be nonnegative, got p={p}")

    def _check_growth_converges(self, arrival: ArrivalProcess, premium: PremiumModel) -> None:
        """Reject growing premiums that outpace the arrival tail"""
        lam = premium.growth_rate()
        if lam == 0.0:
            return
        decay = arrival.tail_decay_rate()
        if lam >= decay:
            raise DivergentExpectation(
                f"Premium growth rate lambda={lam:g}/day is not below the {arrival.kind} arrival "
                f"tail decay rate {decay:g}/day; expected premium earnings are infinite"
            )

    @staticmethod
    def _validate_grid(arrival: ArrivalProcess, grid: Iterable[float]) -> List[float]:
        points = [float(t) for t in grid]
        if not points:
            raise DomainError("Strong curve grid is empty")
        if any(not math.isfinite(t) for t in points):
            raise DomainError("Strong curve grid points must be finite")
        if any(b <= a for a, b in zip(points[:-1], points[1:])):
            raise DomainError("Strong curve grid must be strictly increasing")
        if points[0] < arrival.t0:
            raise DomainError(f"Strong curve grid starts at {points[0]}, before t0={arrival.t0}")
        return points

    @staticmethod
    def _strong_point_obstacle(arrival: ArrivalProcess, t_prime: float) -> Optional[str]:
        if not arrival.has_density():
            return f"{arrival.kind} arrival has no density"
        if float(arrival.pdf(t_prime)) <= 0.0:
            return f"pdf({t_prime:g}) is zero"
        return None

    def constant_rate(self, premium: PremiumModel) -> float:
        """The constant premium rate, rejecting growing premiums"""
        if isinstance(premium, ConstantPremium):
            return premium.p
        if isinstance(premium, GeometricPremium) and premium.lam == 0.0:
            return premium.p0
        raise DomainError(f"A constant premium is required, got a {premium.kind} premium")
