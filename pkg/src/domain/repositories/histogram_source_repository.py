"""Histogram Source Repository Interface - Domain Layer"""
from abc import ABC, abstractmethod
from typing import List, Tuple


class HistogramSourceRepository(ABC):
    """Abstract interface for loading an empirical arrival histogram"""

    @abstractmethod
    def load_histogram(self, source_path: str) -> Tuple[List[float], List[float]]:
        """Return (bin_edges, masses) read from a table of contiguous bins"""
        pass
