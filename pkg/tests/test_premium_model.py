"""Tests for the carbon premium models"""
import math

import numpy as np
import pytest

from src.domain.entities.premium_model import ConstantPremium, GeometricPremium
from src.domain.exceptions import DomainError


def test_constant_rate_and_cumulative():
    premium = ConstantPremium(p=0.001)
    assert premium.rate_at(12345.0) == 0.001
    assert premium.cumulative(750.0) == pytest.approx(0.75, rel=1e-15)
    assert premium.cumulative(0.0) == 0.0


def test_geometric_rate():
    assert GeometricPremium(p0=0.002, lam=0.0).rate_at(900.0) == 0.002
    doubled = GeometricPremium(p0=0.001, lam=0.001, t0=5.0).rate_at(5.0 + 693.147)
    assert doubled == pytest.approx(0.002, rel=1e-6)
    assert GeometricPremium(p0=0.001, lam=0.001).rate_at(1000.0 * math.log(2.0)) == pytest.approx(0.002, rel=1e-9)


def test_geometric_cumulative():
    assert GeometricPremium(p0=0.001, lam=1e-12).cumulative(750.0) == pytest.approx(0.75, rel=1e-9)
    assert GeometricPremium(p0=0.001, lam=0.001).cumulative(750.0) == pytest.approx(math.expm1(0.75), rel=1e-14)
    assert GeometricPremium(p0=0.001, lam=0.001).cumulative(750.0) == pytest.approx(1.11700, abs=1e-5)


def test_small_lambda_matches_constant():
    t = np.linspace(0.0, 150.0, 101)
    constant = ConstantPremium(p=0.003)
    for lam in (1e-10, 1e-13, 1e-15, 0.0):
        geometric = GeometricPremium(p0=0.003, lam=lam)
        np.testing.assert_allclose(geometric.cumulative(t), constant.cumulative(t), rtol=1e-8, atol=0)


def test_cumulative_derivative_is_the_rate():
    rng = np.random.default_rng(11)
    h = 1e-3
    for _ in range(100):
        premium = GeometricPremium(p0=float(rng.uniform(1e-4, 1e-2)), lam=float(rng.uniform(0.0, 2e-3)))
        s = float(rng.uniform(1.0, 2000.0))
        derivative = (premium.cumulative(s + h) - premium.cumulative(s - h)) / (2.0 * h)
        assert derivative == pytest.approx(premium.rate_at(s), rel=1e-6)


def test_cumulative_is_nondecreasing_from_zero():
    rng = np.random.default_rng(12)
    t = np.linspace(10.0, 3000.0, 300)
    for _ in range(50):
        t0 = float(rng.uniform(0.0, 10.0))
        premium = GeometricPremium(p0=float(rng.uniform(0.0, 1e-2)), lam=float(rng.uniform(0.0, 1e-3)), t0=t0)
        values = premium.cumulative(t)
        assert premium.cumulative(t0) == 0.0
        assert np.all(np.diff(values) >= 0.0)


def test_before_origin_is_rejected():
    with pytest.raises(DomainError):
        ConstantPremium(p=0.001, t0=10.0).rate_at(9.0)
    with pytest.raises(DomainError):
        GeometricPremium(p0=0.001, lam=0.001, t0=10.0).cumulative(np.array([11.0, 9.0]))


@pytest.mark.parametrize("build", [
    lambda: ConstantPremium(p=-0.001),
    lambda: GeometricPremium(p0=-1.0, lam=0.0),
    lambda: GeometricPremium(p0=0.001, lam=-0.1),
    lambda: ConstantPremium(p=math.nan),
])
def test_negative_premium_is_rejected(build):
    with pytest.raises(DomainError):
        build()


def test_scalar_in_scalar_out():
    premium = ConstantPremium(p=0.001)
    assert isinstance(premium.cumulative(10.0), float)
    assert premium.cumulative(np.array([10.0, 20.0])).shape == (2,)


def test_to_dict():
    assert GeometricPremium(p0=0.001, lam=0.002).to_dict() == {
        'kind': 'geometric', 'p0_per_day': 0.001, 'lambda_per_day': 0.002,
    }
