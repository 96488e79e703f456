"""Shared fixtures for the SETR test suite"""
import json
from pathlib import Path

import pytest

from src.application.dto.config_dto import AppConfigDTO
from src.domain.entities.arrival_process import ExponentialArrival
from src.domain.entities.market import MarketParams
from src.domain.entities.numerics_settings import NumericsSettings
from src.domain.entities.premium_model import ConstantPremium
from src.domain.services.setr_calculator import SetrCalculator

BASELINE_SEED = 20240501


@pytest.fixture
def baseline_arrival():
    """Exponential arrival with a 750 day scale"""
    return ExponentialArrival(scale=750.0)


@pytest.fixture
def baseline_premium():
    """Constant premium of 0.001 per day"""
    return ConstantPremium(p=0.001)


@pytest.fixture
def baseline_market():
    return MarketParams(mu=0.0015, sigma=0.01, horizon=1500.0, master_seed=BASELINE_SEED)


@pytest.fixture
def calculator():
    return SetrCalculator(NumericsSettings())


@pytest.fixture
def app_config(tmp_path):
    return AppConfigDTO(
        log_level="INFO",
        output_directory=str(tmp_path / "output"),
        workers=1,
        numerics=NumericsSettings().to_dict(),
    )


@pytest.fixture
def baseline_scenario_data(tmp_path):
    return {
        "name": "baseline",
        "description": "exponential 750, constant premium",
        "labels": ["carbon-allowance"],
        "arrival": {"kind": "exponential", "scale_days": 750, "t0_days": 0},
        "premium": {"kind": "constant", "p_per_day": 0.001},
        "market": {"mu_per_day": 0.0015, "sigma_per_sqrt_day": 0.01, "horizon_days": 1500},
        "setr_mode": "weak_constant",
        "grid_days": {"start": 0, "stop": 1500, "points": 16},
        "seed": BASELINE_SEED,
        "output": str(tmp_path / "out"),
    }


@pytest.fixture
def write_scenario(tmp_path):
    """Write a scenario mapping to a JSON file and return its path"""

    def _write(data, filename="scenario.json"):
        path = Path(tmp_path) / filename
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    return _write
