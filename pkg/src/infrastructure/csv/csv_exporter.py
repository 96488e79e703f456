"""CSV Exporter Implementation - Infrastructure Layer"""
import csv
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple

from src.domain.entities.market import SimulationPath
from src.domain.entities.run_report import RunReport
from src.domain.entities.setr_result import SetrCurve
from src.domain.repositories.results_repository import ResultsRepository
from src.infrastructure.json.report_writer import JsonReportWriter

CURVE_FILENAME = "strong_curve.csv"
CURVE_HEADERS = ['t_prime_days', 'phi']
PATH_HEADERS = ['t_days', 'riskfree', 'carbon']


def path_filename(path_index: int) -> str:
    return f"path_{path_index:05d}.csv"


def _format_float(value: float) -> str:
    # repr round-trips exactly and does not depend on locale
    return repr(float(value))


def _flatten(data: Any, prefix: str = "") -> Iterator[Tuple[str, Any]]:
    if isinstance(data, dict):
        for key in sorted(data):
            yield from _flatten(data[key], f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(data, (list, tuple)):
        for i, item in enumerate(data):
            yield from _flatten(item, f"{prefix}.{i}")
    else:
        yield prefix, data


class CSVExporter(ResultsRepository):
    """CSV export implementation; reports go to JSON unless csv is requested"""

    def __init__(self, report_writer: Optional[JsonReportWriter] = None):
        self.report_writer = report_writer or JsonReportWriter()

    def export_curve(self, curve: SetrCurve, output_path: str) -> str:
        """Export a strong SETR curve to CSV"""
        output_dir = Path(output_path)
        output_dir.mkdir(parents=True, exist_ok=True)
        filepath = output_dir / CURVE_FILENAME

        with open(filepath, 'w', newline='', encoding='utf-8') as csvfile:
            writer = csv.writer(csvfile, lineterminator='\n')
            writer.writerow(CURVE_HEADERS)
            for t_prime, phi in curve.rows():
                writer.writerow([_format_float(t_prime), _format_float(phi)])

        return str(filepath)

    def export_paths(self, paths: List[SimulationPath], metadata: Dict[str, Any], output_path: str) -> List[str]:
        """Export one CSV per path and a manifest listing seeds and transition times"""
        output_dir = Path(output_path)
        output_dir.mkdir(parents=True, exist_ok=True)
        written = []

        for path in paths:
            filepath = output_dir / path_filename(path.path_index)
            try:
                with open(filepath, 'w', newline='', encoding='utf-8') as csvfile:
                    writer = csv.writer(csvfile, lineterminator='\n')
                    writer.writerow(PATH_HEADERS)
                    for t, riskfree, carbon in zip(path.times, path.riskfree_price, path.carbon_price):
                        writer.writerow([_format_float(t), _format_float(riskfree), _format_float(carbon)])
            except OSError as e:
                raise OSError(f"Could not write path {path.path_index} to {filepath}: {e}") from e
            written.append(str(filepath))

        manifest = dict(metadata)
        manifest['columns'] = list(PATH_HEADERS)
        manifest['paths'] = [
            dict(path.manifest_entry(), file=path_filename(path.path_index)) for path in paths
        ]
        written.append(self.report_writer.write_manifest(manifest, output_path))
        return written

    def write_report(self, report: RunReport, output_path: str, report_format: str = "json") -> str:
        """Write the report as JSON, or as a flat key,value CSV"""
        if report_format == "json":
            return self.report_writer.write_report(report, output_path)
        if report_format != "csv":
            raise ValueError(f"Unknown report format: {report_format}")

        output_dir = Path(output_path)
        output_dir.mkdir(parents=True, exist_ok=True)
        filepath = output_dir / f"{report.command}_report.csv"

        with open(filepath, 'w', newline='', encoding='utf-8') as csvfile:
            writer = csv.writer(csvfile, lineterminator='\n')
            writer.writerow(['key', 'value'])
            for key, value in _flatten(report.to_dict()):
                writer.writerow([key, _format_float(value) if isinstance(value, float) else value])

        return str(filepath)
