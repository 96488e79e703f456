"""Configuration Data Transfer Objects - Application Layer"""
import copy
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

# Keys that never change a result and are left out of the config hash
UNHASHED_MARKET_KEYS = ('workers',)


@dataclass
class AppConfigDTO:
    """DTO for application configuration"""

    log_level: str
    output_directory: str
    workers: int
    numerics: Dict[str, Any]
    log_file: Optional[str] = None


@dataclass
class ScenarioConfig:
    """DTO for a validated, normalised scenario file

    Every optional field holds its effective value, so serializing and
    parsing again gives the same object and the same hash.
    """

    name: str
    arrival: Dict[str, Any]
    premium: Dict[str, Any]
    setr_mode: str
    numerics: Dict[str, Any]
    seed: int = 0
    description: str = ""
    labels: List[str] = field(default_factory=list)
    market: Optional[Dict[str, Any]] = None
    grid_days: Optional[List[float]] = None
    valuation_day: Optional[float] = None
    phi_override: Optional[float] = None
    output: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            'name': self.name,
            'description': self.description,
            'labels': list(self.labels),
            'arrival': copy.deepcopy(self.arrival),
            'premium': copy.deepcopy(self.premium),
            'setr_mode': self.setr_mode,
            'seed': self.seed,
            'numerics': dict(self.numerics),
        }
        optional = {
            'market': copy.deepcopy(self.market),
            'grid_days': list(self.grid_days) if self.grid_days is not None else None,
            'valuation_day': self.valuation_day,
            'phi_override': self.phi_override,
            'output': self.output,
        }
        data.update({k: v for k, v in optional.items() if v is not None})
        return data

    @property
    def config_hash(self) -> str:
        """sha256 of the canonical JSON form; independent of key order"""
        data = self.to_dict()
        market = data.get('market')
        if market:
            for key in UNHASHED_MARKET_KEYS:
                market.pop(key, None)
        canonical = json.dumps(data, sort_keys=True, separators=(',', ':'), ensure_ascii=False)
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()
