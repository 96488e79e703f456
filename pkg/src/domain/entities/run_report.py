"""Run Report Entity - Domain Layer"""
from dataclasses import dataclass, field
from typing import Any, Dict, List

STATUS_OK = "ok"
STATUS_FAILED = "failed"


@dataclass
class RunReport:
    """Represents the machine-readable outcome of one CLI command"""

    scenario: str
    tool_version: str
    config_hash: str
    command: str
    status: str = STATUS_OK
    description: str = ""
    labels: List[str] = field(default_factory=list)
    results: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.status == STATUS_OK

    def add_warning(self, message: str) -> None:
        """Add a warning message"""
        self.warnings.append(message)

    def fail(self, message: str) -> None:
        """Record a failure; the report is still written"""
        self.warnings.append(message)
        self.status = STATUS_FAILED

    def to_dict(self) -> Dict[str, Any]:
        return {
            'scenario': self.scenario,
            'tool_version': self.tool_version,
            'config_hash': self.config_hash,
            'command': self.command,
            'status': self.status,
            'description': self.description,
            'labels': list(self.labels),
            'results': self.results,
            'warnings': list(self.warnings),
            'diagnostics': self.diagnostics,
        }
