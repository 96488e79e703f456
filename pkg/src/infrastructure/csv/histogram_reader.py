"""Histogram Table Reader - Infrastructure Layer"""
import logging
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from src.domain.exceptions import DomainError
from src.domain.repositories.histogram_source_repository import HistogramSourceRepository

REQUIRED_COLUMNS = ['lower_days', 'upper_days', 'mass']


class PandasHistogramReader(HistogramSourceRepository):
    """Reads contiguous histogram bins from a CSV table with pandas"""

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger or logging.getLogger(__name__)

    def load_histogram(self, source_path: str) -> Tuple[List[float], List[float]]:
        path = Path(source_path)
        if not path.exists():
            raise DomainError(f"Histogram file not found: {path}")

        df = pd.read_csv(path)
        df.columns = [str(c).strip().lower() for c in df.columns]

        missing = [c for c in REQUIRED_COLUMNS if c not in df.columns]
        if missing:
            raise DomainError(f"Histogram file {path.name} is missing columns: {', '.join(missing)}")
        if df.empty:
            raise DomainError(f"Histogram file {path.name} has no rows")

        try:
            df = df[REQUIRED_COLUMNS].astype(float).sort_values('lower_days', kind='stable')
        except ValueError as e:
            raise DomainError(f"Histogram file {path.name} has non-numeric values: {e}") from e

        lower = df['lower_days'].to_numpy()
        upper = df['upper_days'].to_numpy()
        if not np.array_equal(lower[1:], upper[:-1]):
            raise DomainError(f"Histogram bins in {path.name} must be contiguous")

        edges = [float(x) for x in lower] + [float(upper[-1])]
        masses = [float(x) for x in df['mass'].to_numpy()]
        self.logger.info(f"Loaded {len(masses)} histogram bins from {path.name}")
        return edges, masses
