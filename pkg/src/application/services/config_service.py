"""Configuration Service - Application Layer"""
import json
import logging
import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.application.dto.config_dto import AppConfigDTO, ScenarioConfig
from src.domain.entities.arrival_process import (
    ArrivalProcess,
    ExponentialArrival,
    HistogramArrival,
    LogNormalArrival,
    PointMassArrival,
    WeibullArrival,
)
from src.domain.entities.market import MAX_SEED, MarketParams, PremiumApplication
from src.domain.entities.numerics_settings import NumericsSettings
from src.domain.entities.premium_model import ConstantPremium, GeometricPremium, PremiumModel
from src.domain.entities.scenario import Scenario, SetrMode
from src.domain.exceptions import ConfigValidationError, DomainError
from src.domain.repositories.histogram_source_repository import HistogramSourceRepository

SCENARIO_KEYS = (
    'name', 'description', 'labels', 'arrival', 'premium', 'market', 'setr_mode',
    'grid_days', 'valuation_day', 'phi_override', 'output', 'seed', 'numerics',
)
ARRIVAL_FIELDS = {
    'exponential': ('scale_days',),
    'weibull': ('shape', 'scale_days'),
    'lognormal': ('log_mean', 'log_sd'),
    'point_mass': ('event_time_days',),
    'histogram': (),
}
HISTOGRAM_INLINE = ('bin_edges_days', 'masses')
PREMIUM_FIELDS = {
    'constant': ('p_per_day',),
    'geometric': ('p0_per_day', 'lambda_per_day'),
}
MARKET_REQUIRED = ('mu_per_day', 'sigma_per_sqrt_day', 'horizon_days')
MARKET_OPTIONAL = ('s0', 'dt_days', 'premium_application', 'clamp_at_zero', 'workers')
GRID_RANGE_KEYS = ('start', 'stop', 'points')
NUMERICS_KEYS = ('rel_tol', 'tail_cutoff', 'hazard_floor', 'max_evaluations')
APP_CONFIG_KEYS = ('log_level', 'log_file', 'output_directory', 'workers', 'numerics')
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')

_MISSING = object()


def _field(parent: str, key: str) -> str:
    return f"{parent}.{key}" if parent else key


def _reject_unknown(data: Dict[str, Any], allowed: Tuple[str, ...], parent: str = "") -> None:
    for key in data:
        if key not in allowed:
            raise ConfigValidationError(_field(parent, key), f"unknown key (allowed: {', '.join(allowed)})")


def _table(data: Dict[str, Any], key: str, parent: str = "", required: bool = True) -> Optional[Dict[str, Any]]:
    if key not in data or data[key] is None:
        if required:
            raise ConfigValidationError(_field(parent, key), "required section is missing")
        return None
    value = data[key]
    if not isinstance(value, dict):
        raise ConfigValidationError(_field(parent, key), f"must be an object, got {type(value).__name__}")
    return value


def _as_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigValidationError(path, f"must be a number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigValidationError(path, "must be finite")
    return value


def _number(data: Dict[str, Any], key: str, parent: str = "", default: Any = _MISSING) -> Any:
    if key not in data or data[key] is None:
        if default is _MISSING:
            raise ConfigValidationError(_field(parent, key), "required field is missing")
        return default
    return _as_number(data[key], _field(parent, key))


def _integer(data: Dict[str, Any], key: str, parent: str = "", default: Any = _MISSING,
             minimum: int = 0, maximum: Optional[int] = None) -> Any:
    path = _field(parent, key)
    if key not in data or data[key] is None:
        if default is _MISSING:
            raise ConfigValidationError(path, "required field is missing")
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigValidationError(path, f"must be an integer, got {type(value).__name__}")
    if value < minimum or (maximum is not None and value > maximum):
        upper = f" and at most {maximum}" if maximum is not None else ""
        raise ConfigValidationError(path, f"must be at least {minimum}{upper}, got {value}")
    return value


def _string(data: Dict[str, Any], key: str, parent: str = "", default: Any = _MISSING) -> Any:
    path = _field(parent, key)
    if key not in data or data[key] is None:
        if default is _MISSING:
            raise ConfigValidationError(path, "required field is missing")
        return default
    value = data[key]
    if not isinstance(value, str):
        raise ConfigValidationError(path, f"must be a string, got {type(value).__name__}")
    return value


def _number_list(data: Dict[str, Any], key: str, parent: str = "") -> List[float]:
    path = _field(parent, key)
    value = data.get(key)
    if not isinstance(value, list):
        raise ConfigValidationError(path, "must be a list of numbers")
    return [_as_number(item, f"{path}.{i}") for i, item in enumerate(value)]


class ConfigService:
    """Service for application defaults and scenario files"""

    def __init__(
        self,
        config_dir: str = "config",
        logger: Optional[logging.Logger] = None,
        histogram_source: Optional[HistogramSourceRepository] = None,
    ):
        self.config_dir = Path(config_dir)
        self.logger = logger or logging.getLogger(__name__)
        self.histogram_source = histogram_source

    # -- application defaults ----------------------------------------------

    def load_app_config(self) -> AppConfigDTO:
        """Load application configuration, recreating a missing file"""
        config_file = self.config_dir / "app_config.json"

        if not config_file.exists():
            self.logger.warning("app_config.json not found, creating default")
            self._create_default_app_config()

        try:
            with open(config_file, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            self.logger.error(f"Error loading app config: {str(e)}")
            data = self._get_default_app_config()

        if not isinstance(data, dict):
            raise ConfigValidationError("app_config", "must be a JSON object")
        _reject_unknown(data, APP_CONFIG_KEYS, "app_config")
        defaults = self._get_default_app_config()

        log_level = _string(data, 'log_level', 'app_config', defaults['log_level']).upper()
        if log_level not in LOG_LEVELS:
            raise ConfigValidationError("app_config.log_level", f"must be one of {', '.join(LOG_LEVELS)}")

        app_config = AppConfigDTO(
            log_level=log_level,
            log_file=_string(data, 'log_file', 'app_config', None),
            output_directory=_string(data, 'output_directory', 'app_config', defaults['output_directory']),
            workers=_integer(data, 'workers', 'app_config', defaults['workers'], minimum=1),
            numerics=self._parse_numerics(
                _table(data, 'numerics', 'app_config', required=False) or {},
                defaults['numerics'],
                'app_config.numerics',
            ),
        )
        self.logger.debug("Loaded application configuration")
        return app_config

    def _create_default_app_config(self) -> None:
        """Create default application configuration"""
        self.config_dir.mkdir(parents=True, exist_ok=True)
        config_file = self.config_dir / "app_config.json"
        with open(config_file, 'w', encoding='utf-8') as f:
            json.dump(self._get_default_app_config(), f, indent=2, ensure_ascii=False)
            f.write("\n")

    def _get_default_app_config(self) -> dict:
        """Get default application configuration"""
        return {
            "log_level": "INFO",
            "log_file": None,
            "output_directory": "output",
            "workers": 1,
            "numerics": NumericsSettings().to_dict(),
        }

    # -- scenarios -----------------------------------------------------------

    def load_scenario(
        self,
        scenario_path: str,
        app_config: AppConfigDTO,
        output: Optional[str] = None,
        seed: Optional[int] = None,
    ) -> ScenarioConfig:
        """Read, validate and normalise a JSON or TOML scenario file.

        output and seed replace the file's values before the hash is taken.
        """
        path = Path(scenario_path)
        if not path.exists():
            raise ConfigValidationError("config", f"scenario file not found: {path}")

        try:
            if path.suffix.lower() == ".toml":
                with open(path, 'rb') as f:
                    data = tomllib.load(f)
            else:
                with open(path, 'r', encoding='utf-8') as f:
                    data = json.load(f)
        except (json.JSONDecodeError, tomllib.TOMLDecodeError, UnicodeDecodeError) as e:
            raise ConfigValidationError("config", f"could not parse {path.name}: {e}") from e
        except OSError as e:
            raise ConfigValidationError("config", f"could not read {path.name}: {e}") from e

        if not isinstance(data, dict):
            raise ConfigValidationError("config", "scenario must be an object")
        if output is not None:
            data['output'] = output
        if seed is not None:
            data['seed'] = seed

        config = self.parse_scenario(data, app_config, base_dir=path.parent)
        self.logger.info(f"Loaded scenario '{config.name}' from {path.name} (hash {config.config_hash[:12]})")
        return config

    def parse_scenario(
        self,
        data: Any,
        app_config: AppConfigDTO,
        base_dir: Optional[Path] = None,
    ) -> ScenarioConfig:
        """Validate a scenario mapping and fill in every default"""
        if not isinstance(data, dict):
            raise ConfigValidationError("config", "scenario must be an object")
        if 'grid' in data:
            if 'grid_days' in data:
                raise ConfigValidationError("grid", "give either grid or grid_days, not both")
            data = {('grid_days' if key == 'grid' else key): value for key, value in data.items()}
        _reject_unknown(data, SCENARIO_KEYS)

        name = _string(data, 'name').strip()
        if not name:
            raise ConfigValidationError("name", "must not be empty")

        labels = data.get('labels', [])
        if not isinstance(labels, list) or not all(isinstance(label, str) for label in labels):
            raise ConfigValidationError("labels", "must be a list of strings")

        mode_name = _string(data, 'setr_mode')
        try:
            mode = SetrMode(mode_name)
        except ValueError:
            allowed = ', '.join(m.value for m in SetrMode)
            raise ConfigValidationError("setr_mode", f"unknown mode '{mode_name}' (allowed: {allowed})")

        arrival = self._parse_arrival(_table(data, 'arrival'), base_dir)
        premium = self._parse_premium(_table(data, 'premium'))
        market_data = _table(data, 'market', required=False)
        market = self._parse_market(market_data) if market_data is not None else None
        grid = self._parse_grid(data) if data.get('grid_days') is not None else None

        valuation_day = _number(data, 'valuation_day', default=None)
        phi_override = _number(data, 'phi_override', default=None)
        if phi_override is not None and phi_override < 0:
            raise ConfigValidationError("phi_override", f"must be nonnegative, got {phi_override}")

        if mode is SetrMode.STRONG_CURVE and grid is None:
            raise ConfigValidationError("grid_days", "required for setr_mode 'strong_curve'")
        if mode is SetrMode.RESIDUAL and phi_override is None:
            raise ConfigValidationError("phi_override", "required for setr_mode 'residual'")
        if mode is SetrMode.WEAK_CONDITIONAL and valuation_day is None:
            raise ConfigValidationError("valuation_day", "required for setr_mode 'weak_conditional'")

        return ScenarioConfig(
            name=name,
            description=_string(data, 'description', default=""),
            labels=list(labels),
            arrival=arrival,
            premium=premium,
            setr_mode=mode.value,
            market=market,
            grid_days=grid,
            valuation_day=valuation_day,
            phi_override=phi_override,
            output=_string(data, 'output', default=None),
            seed=_integer(data, 'seed', default=0, maximum=MAX_SEED),
            numerics=self._parse_numerics(
                _table(data, 'numerics', required=False) or {}, app_config.numerics, 'numerics'
            ),
        )

    def save_scenario(self, config: ScenarioConfig, scenario_path: str) -> str:
        """Write the normalised scenario as JSON"""
        path = Path(scenario_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(config.to_dict(), f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write("\n")
        return str(path)

    def _parse_arrival(self, data: Dict[str, Any], base_dir: Optional[Path]) -> Dict[str, Any]:
        kind = _string(data, 'kind', 'arrival')
        if kind not in ARRIVAL_FIELDS:
            raise ConfigValidationError("arrival.kind", f"unknown kind '{kind}' (allowed: {', '.join(ARRIVAL_FIELDS)})")

        if kind == 'histogram':
            _reject_unknown(data, ('kind', 't0_days', 'source_csv') + HISTOGRAM_INLINE, 'arrival')
            edges, masses = self._parse_histogram(data, base_dir)
            normalized: Dict[str, Any] = {'kind': kind, 'bin_edges_days': edges, 'masses': masses}
        else:
            fields = ARRIVAL_FIELDS[kind]
            _reject_unknown(data, ('kind', 't0_days') + fields, 'arrival')
            normalized = {'kind': kind}
            normalized.update({key: _number(data, key, 'arrival') for key in fields})

        normalized['t0_days'] = _number(data, 't0_days', 'arrival', 0.0)
        return normalized

    def _parse_histogram(self, data: Dict[str, Any], base_dir: Optional[Path]) -> Tuple[List[float], List[float]]:
        inline = [key for key in HISTOGRAM_INLINE if key in data]
        if 'source_csv' in data:
            if inline:
                raise ConfigValidationError("arrival.source_csv", "give either source_csv or inline bins, not both")
            if self.histogram_source is None:
                raise ConfigValidationError("arrival.source_csv", "no histogram reader is available")
            source = Path(_string(data, 'source_csv', 'arrival'))
            if not source.is_absolute() and base_dir is not None:
                source = base_dir / source
            try:
                return self.histogram_source.load_histogram(str(source))
            except DomainError as e:
                raise ConfigValidationError("arrival.source_csv", str(e)) from e
        return _number_list(data, 'bin_edges_days', 'arrival'), _number_list(data, 'masses', 'arrival')

    def _parse_premium(self, data: Dict[str, Any]) -> Dict[str, Any]:
        kind = _string(data, 'kind', 'premium')
        if kind not in PREMIUM_FIELDS:
            raise ConfigValidationError("premium.kind", f"unknown kind '{kind}' (allowed: {', '.join(PREMIUM_FIELDS)})")
        fields = PREMIUM_FIELDS[kind]
        _reject_unknown(data, ('kind',) + fields, 'premium')
        normalized: Dict[str, Any] = {'kind': kind}
        normalized.update({key: _number(data, key, 'premium') for key in fields})
        return normalized

    def _parse_market(self, data: Dict[str, Any]) -> Dict[str, Any]:
        _reject_unknown(data, MARKET_REQUIRED + MARKET_OPTIONAL, 'market')
        normalized: Dict[str, Any] = {key: _number(data, key, 'market') for key in MARKET_REQUIRED}
        normalized['s0'] = _number(data, 's0', 'market', 1.0)
        normalized['dt_days'] = _number(data, 'dt_days', 'market', 1.0)

        application = _string(data, 'premium_application', 'market', PremiumApplication.ADDITIVE.value)
        if application not in {p.value for p in PremiumApplication}:
            raise ConfigValidationError(
                "market.premium_application", f"must be 'additive' or 'multiplicative', got '{application}'"
            )
        normalized['premium_application'] = application

        clamp = data.get('clamp_at_zero', False)
        if not isinstance(clamp, bool):
            raise ConfigValidationError("market.clamp_at_zero", "must be true or false")
        normalized['clamp_at_zero'] = clamp

        workers = _integer(data, 'workers', 'market', None, minimum=1)
        if workers is not None:
            normalized['workers'] = workers
        return normalized

    def _parse_grid(self, data: Dict[str, Any]) -> List[float]:
        value = data['grid_days']
        if isinstance(value, dict):
            _reject_unknown(value, GRID_RANGE_KEYS, 'grid_days')
            start = _number(value, 'start', 'grid_days')
            stop = _number(value, 'stop', 'grid_days')
            points = _integer(value, 'points', 'grid_days', minimum=1)
            if points > 1 and stop <= start:
                raise ConfigValidationError("grid_days.stop", f"must exceed start={start}, got {stop}")
            grid = [float(t) for t in np.linspace(start, stop, points)]
        else:
            grid = _number_list(data, 'grid_days')

        if not grid:
            raise ConfigValidationError("grid_days", "must not be empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigValidationError("grid_days", "must be strictly increasing")
        return grid

    def _parse_numerics(self, data: Dict[str, Any], defaults: Dict[str, Any], parent: str) -> Dict[str, Any]:
        _reject_unknown(data, NUMERICS_KEYS, parent)
        merged = {
            'rel_tol': _number(data, 'rel_tol', parent, defaults['rel_tol']),
            'tail_cutoff': _number(data, 'tail_cutoff', parent, defaults['tail_cutoff']),
            'hazard_floor': _number(data, 'hazard_floor', parent, defaults['hazard_floor']),
            'max_evaluations': _integer(data, 'max_evaluations', parent, defaults['max_evaluations'], minimum=1),
        }
        try:
            NumericsSettings(**merged)
        except DomainError as e:
            raise ConfigValidationError(parent, str(e)) from e
        return merged

    # -- entities ------------------------------------------------------------

    def build_scenario(self, config: ScenarioConfig, app_config: AppConfigDTO) -> Scenario:
        """Turn a normalised scenario into domain objects"""
        numerics = NumericsSettings(**config.numerics)
        arrival = self._build_arrival(config.arrival)
        premium = self._build_premium(config.premium, arrival.t0)

        market = None
        workers = app_config.workers
        if config.market is not None:
            try:
                market = MarketParams(
                    mu=config.market['mu_per_day'],
                    sigma=config.market['sigma_per_sqrt_day'],
                    horizon=config.market['horizon_days'],
                    master_seed=config.seed,
                    s0=config.market['s0'],
                    dt=config.market['dt_days'],
                    premium_application=PremiumApplication(config.market['premium_application']),
                    clamp_at_zero=config.market['clamp_at_zero'],
                )
            except DomainError as e:
                raise ConfigValidationError("market", str(e)) from e
            workers = config.market.get('workers', workers)

        if config.valuation_day is not None and config.valuation_day < arrival.t0:
            raise ConfigValidationError("valuation_day", f"precedes t0_days={arrival.t0}")
        if config.grid_days and config.grid_days[0] < arrival.t0:
            raise ConfigValidationError("grid_days", f"starts before t0_days={arrival.t0}")

        return Scenario(
            name=config.name,
            description=config.description,
            labels=tuple(config.labels),
            arrival=arrival,
            premium=premium,
            setr_mode=SetrMode(config.setr_mode),
            numerics=numerics,
            output_dir=config.output or str(Path(app_config.output_directory) / config.name),
            seed=config.seed,
            market=market,
            workers=workers,
            grid=tuple(config.grid_days or ()),
            valuation_day=config.valuation_day,
            phi_override=config.phi_override,
        )

    def _build_arrival(self, spec: Dict[str, Any]) -> ArrivalProcess:
        kind = spec['kind']
        t0 = spec['t0_days']
        try:
            if kind == 'exponential':
                return ExponentialArrival(scale=spec['scale_days'], t0=t0)
            if kind == 'weibull':
                return WeibullArrival(shape=spec['shape'], scale=spec['scale_days'], t0=t0)
            if kind == 'lognormal':
                return LogNormalArrival(log_mean=spec['log_mean'], log_sd=spec['log_sd'], t0=t0)
            if kind == 'point_mass':
                return PointMassArrival(event_time=spec['event_time_days'], t0=t0)
            return HistogramArrival(bin_edges=tuple(spec['bin_edges_days']), masses=tuple(spec['masses']), t0=t0)
        except DomainError as e:
            raise ConfigValidationError("arrival", str(e)) from e

    def _build_premium(self, spec: Dict[str, Any], t0: float) -> PremiumModel:
        try:
            if spec['kind'] == 'constant':
                return ConstantPremium(p=spec['p_per_day'], t0=t0)
            return GeometricPremium(p0=spec['p0_per_day'], lam=spec['lambda_per_day'], t0=t0)
        except DomainError as e:
            raise ConfigValidationError("premium", str(e)) from e
