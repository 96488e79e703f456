"""Tests for the SETR calculator: weak and strong no-arbitrage"""
import math

import numpy as np
import pytest

from src.domain.entities.arrival_process import (
    ExponentialArrival,
    HistogramArrival,
    LogNormalArrival,
    PointMassArrival,
    WeibullArrival,
)
from src.domain.entities.premium_model import ConstantPremium, GeometricPremium
from src.domain.entities.setr_result import SetrMethod
from src.domain.exceptions import DivergentExpectation, DomainError

RIEMANN_DT = 0.01
RIEMANN_SURVIVAL = 1e-10


def _riemann_expected_earnings(arrival, premium):
    """Midpoint sum of f(t) * A(t) on a 0.01 day grid"""
    upper = arrival.truncation_point(RIEMANN_SURVIVAL)
    n = int(math.ceil((upper - arrival.t0) / RIEMANN_DT))
    t = arrival.t0 + (np.arange(n) + 0.5) * RIEMANN_DT
    return float(np.sum(np.asarray(arrival.pdf(t)) * np.asarray(premium.cumulative(t)))) * RIEMANN_DT


def _random_case(rng, i):
    t0 = float(rng.uniform(0.0, 20.0))
    kind = i % 4
    if kind == 0:
        arrival = ExponentialArrival(scale=float(rng.uniform(50.0, 500.0)), t0=t0)
    elif kind == 1:
        arrival = WeibullArrival(shape=float(rng.uniform(1.0, 3.0)), scale=float(rng.uniform(50.0, 500.0)), t0=t0)
    elif kind == 2:
        arrival = LogNormalArrival(log_mean=float(rng.uniform(3.0, 5.0)), log_sd=float(rng.uniform(0.3, 0.8)), t0=t0)
    else:
        widths = rng.uniform(10.0, 300.0, size=int(rng.integers(1, 8)))
        edges = t0 + np.concatenate([[0.0], np.cumsum(widths)])
        masses = rng.dirichlet(np.ones(len(widths)))
        masses[-1] = 1.0 - math.fsum(masses[:-1])
        arrival = HistogramArrival(bin_edges=tuple(edges), masses=tuple(masses), t0=t0)

    p = float(rng.uniform(1e-4, 5e-3))
    if kind == 2 or rng.random() < 0.5:
        return arrival, ConstantPremium(p=p, t0=t0)
    scale = getattr(arrival, 'scale', 500.0)
    return arrival, GeometricPremium(p0=p, lam=float(rng.uniform(0.0, 0.3)) / scale, t0=t0)


# -- expected premium earnings ----------------------------------------------

def test_expected_earnings_exponential_constant(calculator, baseline_arrival, baseline_premium):
    result = calculator.expected_premium_earnings(baseline_arrival, baseline_premium)
    assert result.value == pytest.approx(0.75, rel=1e-8)
    assert result.abs_error_estimate >= 0.0
    assert result.method is SetrMethod.EXPECTED_EARNINGS


def test_expected_earnings_point_mass(calculator):
    result = calculator.expected_premium_earnings(PointMassArrival(event_time=300.0), ConstantPremium(p=0.001))
    assert result.value == pytest.approx(0.30, rel=1e-15)


def test_expected_earnings_geometric_closed_form(calculator, baseline_arrival):
    result = calculator.expected_premium_earnings(baseline_arrival, GeometricPremium(p0=0.001, lam=0.001))
    assert result.value == pytest.approx(3.0, rel=1e-6)


def test_expected_earnings_with_shifted_origin(calculator):
    arrival = ExponentialArrival(scale=750.0, t0=100.0)
    result = calculator.expected_premium_earnings(arrival, ConstantPremium(p=0.001, t0=100.0))
    assert result.value == pytest.approx(0.75, rel=1e-8)


def test_expected_earnings_rejects_mismatched_origins(calculator, baseline_arrival):
    with pytest.raises(DomainError):
        calculator.expected_premium_earnings(baseline_arrival, ConstantPremium(p=0.001, t0=5.0))


def test_expected_earnings_matches_riemann_sum():
    from src.domain.services.setr_calculator import SetrCalculator

    calculator = SetrCalculator()
    rng = np.random.default_rng(2718)
    for i in range(100):
        arrival, premium = _random_case(rng, i)
        value = calculator.expected_premium_earnings(arrival, premium).value
        oracle = _riemann_expected_earnings(arrival, premium)
        assert value == pytest.approx(oracle, rel=1e-4), (arrival, premium)


def test_nested_integral_agrees_with_single_integral(calculator):
    cases = [
        (ExponentialArrival(scale=750.0), ConstantPremium(p=0.001)),
        (WeibullArrival(shape=2.0, scale=500.0), GeometricPremium(p0=0.001, lam=0.0005)),
        (HistogramArrival(bin_edges=(0.0, 100.0, 400.0), masses=(0.4, 0.6)), ConstantPremium(p=0.002)),
        (PointMassArrival(event_time=300.0), GeometricPremium(p0=0.001, lam=0.001)),
    ]
    for arrival, premium in cases:
        single = calculator.expected_premium_earnings(arrival, premium)
        nested = calculator.expected_premium_earnings_nested(arrival, premium)
        assert nested.value == pytest.approx(single.value, rel=1e-7)


# -- weak constant SETR -----------------------------------------------------

def test_weak_constant_baseline(calculator, baseline_arrival):
    result = calculator.setr_weak_constant(baseline_arrival, 0.001)
    assert result.value == pytest.approx(0.75, rel=1e-8)
    assert result.method is SetrMethod.WEAK_CONSTANT


def test_weak_constant_zero_premium(calculator):
    for arrival in (ExponentialArrival(scale=30.0), WeibullArrival(shape=3.0, scale=10.0), PointMassArrival(event_time=4.0)):
        assert calculator.setr_weak_constant(arrival, 0.0).value == 0.0


def test_weak_constant_point_mass(calculator):
    assert calculator.setr_weak_constant(PointMassArrival(event_time=300.0, t0=20.0), 0.001).value == pytest.approx(0.28)


def test_weak_constant_is_linear_in_premium(calculator):
    arrival = WeibullArrival(shape=1.7, scale=640.0, t0=3.0)
    single = calculator.setr_weak_constant(arrival, 0.0013).value
    double = calculator.setr_weak_constant(arrival, 0.0026).value
    assert double == 2.0 * single


def test_weak_constant_agrees_with_expected_earnings():
    from src.domain.services.setr_calculator import SetrCalculator

    calculator = SetrCalculator()
    rng = np.random.default_rng(99)
    for i in range(100):
        arrival, premium = _random_case(rng, i)
        p = float(premium.rate_at(arrival.t0))
        premium = ConstantPremium(p=p, t0=arrival.t0)
        weak = calculator.setr_weak_constant(arrival, p)
        earnings = calculator.expected_premium_earnings(arrival, premium)
        tolerance = 2.0 * (weak.abs_error_estimate + earnings.abs_error_estimate) + 1e-13 * abs(weak.value)
        assert abs(weak.value - earnings.value) <= tolerance, (arrival, p)


def test_weak_constant_rejects_infinite_mean(calculator):
    with pytest.raises(DivergentExpectation):
        calculator.setr_weak_constant(LogNormalArrival(log_mean=708.0, log_sd=2.0), 0.001)


def test_weak_constant_rejects_negative_premium(calculator, baseline_arrival):
    with pytest.raises(DomainError):
        calculator.setr_weak_constant(baseline_arrival, -0.001)


# -- geometric premium ------------------------------------------------------

def test_geometric_small_lambda_reduces_to_constant(calculator, baseline_arrival):
    result = calculator.setr_geometric(baseline_arrival, 0.001, 1e-12)
    assert result.value == pytest.approx(0.75, rel=1e-8)
    assert result.method is SetrMethod.GEOMETRIC_PREMIUM


def test_geometric_closed_form(calculator, baseline_arrival):
    assert calculator.setr_geometric(baseline_arrival, 0.001, 0.001).value == pytest.approx(3.0, rel=1e-6)


def test_geometric_point_mass(calculator):
    value = calculator.setr_geometric(PointMassArrival(event_time=750.0), 0.001, 0.001).value
    assert value == pytest.approx(math.expm1(0.75), rel=1e-14)
    assert value == pytest.approx(1.11700, abs=1e-5)


def test_geometric_continuity_over_random_draws(calculator):
    rng = np.random.default_rng(5)
    for _ in range(50):
        scale = float(rng.uniform(50.0, 3000.0))
        p0 = float(rng.uniform(1e-4, 1e-2))
        arrival = ExponentialArrival(scale=scale)
        geometric = calculator.setr_geometric(arrival, p0, 1e-12).value
        constant = calculator.setr_weak_constant(arrival, p0).value
        assert geometric == pytest.approx(constant, rel=1e-8)


@pytest.mark.parametrize("arrival, lam", [
    (ExponentialArrival(scale=750.0), 0.002),
    (ExponentialArrival(scale=750.0), 1.0 / 750.0),
    (LogNormalArrival(log_mean=6.0, log_sd=0.5), 1e-6),
    (WeibullArrival(shape=0.8, scale=100.0), 1e-4),
])
def test_geometric_divergence_is_detected(calculator, arrival, lam):
    with pytest.raises(DivergentExpectation):
        calculator.setr_geometric(arrival, 0.001, lam)
    with pytest.raises(DivergentExpectation):
        calculator.expected_premium_earnings(arrival, GeometricPremium(p0=0.001, lam=lam, t0=arrival.t0))


def test_geometric_agrees_with_expected_earnings(calculator):
    arrival = WeibullArrival(shape=2.0, scale=500.0)
    premium = GeometricPremium(p0=0.001, lam=0.002)
    geometric = calculator.setr_geometric(arrival, 0.001, 0.002).value
    earnings = calculator.expected_premium_earnings(arrival, premium).value
    assert geometric == pytest.approx(earnings, rel=1e-7)


@pytest.mark.parametrize("growth", [0.985, 0.99])
def test_geometric_near_the_divergence_boundary(calculator, baseline_arrival, growth):
    result = calculator.setr_geometric(baseline_arrival, 0.001, growth / 750.0)
    assert result.value == pytest.approx(0.75 / (1.0 - growth), rel=1e-6)
    premium = GeometricPremium(p0=0.001, lam=growth / 750.0)
    earnings = calculator.expected_premium_earnings(baseline_arrival, premium).value
    assert result.value == pytest.approx(earnings, rel=1e-6)


# -- residual ---------------------------------------------------------------

def test_residual_examples(calculator, baseline_arrival, baseline_premium):
    assert calculator.noarb_residual(baseline_arrival, baseline_premium, 0.75).value == pytest.approx(0.0, abs=1e-8)
    assert calculator.noarb_residual(baseline_arrival, baseline_premium, 1.0).value == pytest.approx(-0.25, abs=1e-8)
    zero = calculator.noarb_residual(baseline_arrival, ConstantPremium(p=0.0), 0.0)
    assert zero.value == 0.0
    assert zero.method is SetrMethod.RESIDUAL_CHECK


# -- strong curve -----------------------------------------------------------

def test_strong_curve_is_flat_for_exponential(calculator, baseline_arrival):
    grid = np.linspace(0.0, 5000.0, 101)
    curve = calculator.setr_strong_curve(baseline_arrival, 0.001, grid)
    weak = calculator.setr_weak_constant(baseline_arrival, 0.001).value
    assert len(curve.values) == 101
    assert curve.spread() <= 1e-10
    for value in curve.values:
        assert value == pytest.approx(weak, rel=1e-8)


def test_strong_curve_weibull_point(calculator):
    curve = calculator.setr_strong_curve(WeibullArrival(shape=2.0, scale=500.0), 0.001, [500.0])
    assert curve.values[0] == pytest.approx(0.25, rel=1e-14)


def test_strong_curve_zero_premium(calculator):
    curve = calculator.setr_strong_curve(WeibullArrival(shape=2.0, scale=500.0), 0.0, [10.0, 100.0, 1000.0])
    assert curve.values == (0.0, 0.0, 0.0)


def test_strong_curve_follows_hazard_monotonicity(calculator):
    grid = np.linspace(10.0, 1000.0, 100)
    increasing_hazard = calculator.setr_strong_curve(WeibullArrival(shape=2.0, scale=500.0), 0.001, grid)
    decreasing_hazard = calculator.setr_strong_curve(WeibullArrival(shape=0.5, scale=500.0), 0.001, grid)
    assert np.all(np.diff(increasing_hazard.values) < 0.0)
    assert np.all(np.diff(decreasing_hazard.values) > 0.0)


def test_strong_curve_skips_points_without_density(calculator):
    curve = calculator.setr_strong_curve(PointMassArrival(event_time=300.0), 0.001, [100.0, 200.0])
    assert curve.values == ()
    assert [p.t_prime for p in curve.skipped] == [100.0, 200.0]

    histogram = HistogramArrival(bin_edges=(0.0, 100.0, 200.0), masses=(0.5, 0.5))
    curve = calculator.setr_strong_curve(histogram, 0.001, [50.0, 150.0, 250.0])
    assert curve.grid == (50.0, 150.0)
    assert curve.values[0] == pytest.approx(0.001 * 0.75 / 0.005)
    assert [p.t_prime for p in curve.skipped] == [250.0]


def test_strong_curve_skips_the_far_tail(calculator):
    curve = calculator.setr_strong_curve(ExponentialArrival(scale=1.0), 0.001, [1.0, 800.0])
    assert curve.grid == (1.0,)
    assert len(curve.skipped) == 1


def test_strong_point_matches_the_curve(calculator):
    arrival = WeibullArrival(shape=2.0, scale=500.0)
    point = calculator.setr_strong_point(arrival, 0.001, 500.0)
    assert point.method is SetrMethod.STRONG_CURVE_POINT
    assert point.value == calculator.setr_strong_curve(arrival, 0.001, [500.0]).values[0]

    with pytest.raises(DomainError):
        calculator.setr_strong_point(PointMassArrival(event_time=300.0), 0.001, 100.0)


@pytest.mark.parametrize("grid", [[], [10.0, 10.0], [20.0, 10.0], [-5.0, 10.0]])
def test_strong_curve_rejects_bad_grids(calculator, baseline_arrival, grid):
    with pytest.raises(DomainError):
        calculator.setr_strong_curve(baseline_arrival, 0.001, grid)


# -- supplementary conditional forms ---------------------------------------

def test_weak_conditional_is_memoryless_for_exponential(calculator, baseline_arrival):
    for t_prime in (0.0, 400.0, 3000.0):
        result = calculator.setr_weak_conditional(baseline_arrival, 0.001, t_prime)
        assert result.value == pytest.approx(0.75, rel=1e-10)
        assert result.method is SetrMethod.WEAK_CONDITIONAL


def test_weak_conditional_at_origin_equals_weak_constant(calculator):
    arrival = WeibullArrival(shape=2.0, scale=500.0, t0=10.0)
    conditional = calculator.setr_weak_conditional(arrival, 0.001, 10.0).value
    assert conditional == pytest.approx(calculator.setr_weak_constant(arrival, 0.001).value, rel=1e-8)


def test_weak_conditional_point_mass(calculator):
    result = calculator.setr_weak_conditional(PointMassArrival(event_time=300.0), 0.001, 100.0)
    assert result.value == pytest.approx(0.2, rel=1e-14)


def test_weak_conditional_rejects_early_valuation_day(calculator):
    with pytest.raises(DomainError):
        calculator.setr_weak_conditional(ExponentialArrival(scale=750.0, t0=50.0), 0.001, 10.0)


@pytest.mark.parametrize("arrival", [
    ExponentialArrival(scale=750.0),
    WeibullArrival(shape=2.0, scale=500.0),
    LogNormalArrival(log_mean=6.0, log_sd=0.5),
], ids=lambda a: a.kind)
def test_strong_residual_vanishes(calculator, arrival):
    for t_prime in (0.0, 200.0, 700.0):
        result = calculator.strong_noarb_residual(arrival, 0.001, t_prime)
        assert result.value == pytest.approx(0.0, abs=1e-7)
        assert result.method is SetrMethod.STRONG_RESIDUAL


def test_strong_residual_needs_a_density(calculator):
    with pytest.raises(DomainError):
        calculator.strong_noarb_residual(PointMassArrival(event_time=300.0), 0.001, 10.0)
