"""Version Reader - Infrastructure Layer"""
import logging
from pathlib import Path
from typing import Optional

from packaging import version

DEFAULT_VERSION_FILE = Path(__file__).resolve().parents[3] / "version.txt"
FALLBACK_VERSION = "0.0.0"


class VersionReader:
    """Reads the tool version recorded in every run report"""

    def __init__(self, version_file: Optional[str] = None, logger: Optional[logging.Logger] = None):
        self.version_file = Path(version_file) if version_file else DEFAULT_VERSION_FILE
        self.logger = logger or logging.getLogger(__name__)

    def get_current_version(self) -> str:
        """Version from version.txt without its 'v' prefix, normalised by packaging"""
        if not self.version_file.exists():
            self.logger.warning(f"{self.version_file.name} not found, reporting {FALLBACK_VERSION}")
            return FALLBACK_VERSION
        text = self.version_file.read_text(encoding='utf-8').strip().lstrip('v')
        try:
            return str(version.Version(text))
        except version.InvalidVersion:
            self.logger.warning(f"Invalid version '{text}' in {self.version_file.name}, reporting {FALLBACK_VERSION}")
            return FALLBACK_VERSION
