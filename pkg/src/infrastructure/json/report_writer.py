"""JSON Report Writer - Infrastructure Layer"""
import json
from pathlib import Path
from typing import Any, Dict

from src.domain.entities.run_report import RunReport


def dump_json(data: Dict[str, Any], filepath: Path) -> str:
    """Write data as sorted, indented JSON with a trailing newline"""
    filepath.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)
    with open(filepath, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text + "\n")
    return str(filepath)


class JsonReportWriter:
    """Writes run reports, manifests and timestamp sidecars as JSON"""

    def write_report(self, report: RunReport, output_path: str) -> str:
        filepath = Path(output_path) / f"{report.command}_report.json"
        try:
            return dump_json(report.to_dict(), filepath)
        except OSError as e:
            raise OSError(f"Could not write report {filepath}: {e}") from e

    def write_manifest(self, manifest: Dict[str, Any], output_path: str) -> str:
        filepath = Path(output_path) / "manifest.json"
        try:
            return dump_json(manifest, filepath)
        except OSError as e:
            raise OSError(f"Could not write manifest {filepath}: {e}") from e

    def write_sidecar(self, report_path: str, metadata: Dict[str, Any]) -> str:
        """Wall-clock metadata next to a report, kept out of the report itself"""
        report_file = Path(report_path)
        return dump_json(metadata, report_file.with_name(f"{report_file.stem}.meta.json"))
