"""Command-Line Interface - Presentation Layer"""
import argparse
import logging
import os
import sys
from datetime import datetime
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

from src.application.services.config_service import ConfigService
from src.domain.entities.run_report import RunReport
from src.domain.exceptions import ConfigValidationError, DomainError
from src.domain.use_cases.compute_curve_use_case import ComputeCurveUseCase
from src.domain.use_cases.compute_setr_use_case import ComputeSetrUseCase
from src.domain.use_cases.simulate_market_use_case import SimulateMarketUseCase
from src.domain.use_cases.verify_no_arbitrage_use_case import VerifyNoArbitrageUseCase
from src.infrastructure.csv.csv_exporter import CSVExporter
from src.infrastructure.csv.histogram_reader import PandasHistogramReader
from src.infrastructure.json.report_writer import JsonReportWriter
from src.infrastructure.version.version_reader import VersionReader

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

DEFAULT_SIMULATE_PATHS = 4
DEFAULT_VERIFY_PATHS = 100_000


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="setr",
        description="Single Event Transition Risk: SETR values, strong curves and market simulation",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def add_command(name: str, help_text: str, with_paths: bool = False) -> None:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("--config", required=True, help="Scenario file (JSON, or TOML)")
        sub.add_argument("--out", help="Output directory; overrides the scenario's output")
        sub.add_argument("--seed", type=int, help="Master seed (unsigned 64-bit); overrides the scenario's seed")
        sub.add_argument("--format", dest="report_format", choices=("json", "csv"), default="json",
                         help="Report format (default: json)")
        sub.add_argument("--sidecar", action="store_true",
                         help="Also write wall-clock timing next to the report")
        if with_paths:
            default = DEFAULT_SIMULATE_PATHS if name == "simulate" else DEFAULT_VERIFY_PATHS
            sub.add_argument("--paths", type=int, default=default, help=f"Number of paths (default: {default})")

    add_command("compute", "Compute the SETR selected by setr_mode")
    add_command("curve", "Strong no-arbitrage SETR curve over grid_days")
    add_command("simulate", "Simulate paired price paths of the single event market", with_paths=True)
    add_command("verify", "Check the analytic SETR against a Monte Carlo market", with_paths=True)
    return parser


def _init_logging(level: str, log_file: Optional[str] = None) -> logging.Logger:
    """Initialize logging configuration; nothing is logged to stdout"""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
    return logging.getLogger("setr")


def _exit_code(report: RunReport) -> int:
    if report.success:
        return EXIT_OK
    if 'error' in report.diagnostics:
        return EXIT_NUMERICAL
    return EXIT_CHECK_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    """Run one CLI command and return its exit code"""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    load_dotenv()
    config_dir = os.getenv('SETR_CONFIG_DIR', 'config')

    try:
        config_service = ConfigService(config_dir, histogram_source=PandasHistogramReader())
        app_config = config_service.load_app_config()
    except ConfigValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION

    logger = _init_logging(os.getenv('SETR_LOG_LEVEL') or app_config.log_level, app_config.log_file)
    config_service.logger = logging.getLogger("setr.config")

    results_repo = CSVExporter(JsonReportWriter())
    started = datetime.now()

    try:
        config = config_service.load_scenario(args.config, app_config, output=args.out, seed=args.seed)
        scenario = config_service.build_scenario(config, app_config)

        report = RunReport(
            scenario=config.name,
            tool_version=VersionReader(logger=logger).get_current_version(),
            config_hash=config.config_hash,
            command=args.command,
            description=config.description,
            labels=list(config.labels),
            diagnostics={'normalized_config': config.to_dict()},
        )

        if args.command == "compute":
            use_case = ComputeSetrUseCase(results_repo, logger)
            report_path = use_case.execute(scenario, report, args.report_format)
        elif args.command == "curve":
            use_case = ComputeCurveUseCase(results_repo, logger)
            report_path = use_case.execute(scenario, report, args.report_format)
        elif args.command == "simulate":
            use_case = SimulateMarketUseCase(results_repo, logger)
            report_path = use_case.execute(scenario, args.paths, report, args.report_format)
        else:
            use_case = VerifyNoArbitrageUseCase(results_repo, logger)
            report_path = use_case.execute(scenario, args.paths, report, args.report_format)

    except (ConfigValidationError, DomainError) as e:
        logger.error(f"Validation failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        logger.error(f"Output failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED

    if args.sidecar:
        finished = datetime.now()
        results_repo.report_writer.write_sidecar(report_path, {
            'command': args.command,
            'config_hash': report.config_hash,
            'started_at': started.isoformat(),
            'finished_at': finished.isoformat(),
            'elapsed_seconds': (finished - started).total_seconds(),
        })

    logger.info(f"Report written to {report_path} (status {report.status})")
    print(report_path)
    return _exit_code(report)
