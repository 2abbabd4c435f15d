#!/usr/bin/env python
"""
polykin command-line entry point

    polykin <verify|spectrum|relax|decay> --config FILE [--seed N] [--out DIR] [--emit-plot-data]

Exit codes: 0 when every check passes, 1 when a numeric check fails,
2 when the configuration is invalid.
"""

import argparse
import sys
from typing import List, Optional

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

from config.run_config import SUITES, RunConfig
from config.settings import AppConfig
from suites import COMMANDS
from utils.errors import (
    CapacityError,
    ConfigurationError,
    DomainError,
    NumericError,
    PolykinError,
    PreconditionError,
    UsageError,
)
from utils.logger import setup_logger
from utils.report_writer import ReportWriter

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


def exit_code_for(error: PolykinError) -> int:
    """Map an error to the CLI exit code"""
    if isinstance(error, (ConfigurationError, UsageError, DomainError, CapacityError)):
        return EXIT_CONFIG
    if isinstance(error, (NumericError, PreconditionError)):
        return EXIT_FAIL
    return EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polykin",
        description="Numerical verification suites for the polyatomic Boltzmann equation",
    )
    parser.add_argument("suite", choices=SUITES, help="Suite to run")
    parser.add_argument("--config", required=True, help="YAML run configuration")
    parser.add_argument("--seed", type=int, default=None, help="Base seed of every random stream")
    parser.add_argument("--out", default=None, help="Output directory")
    parser.add_argument("--emit-plot-data", action="store_true",
                        help="Also write (x, y) series under plot_data/")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main application function"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on usage errors already
        return int(e.code or 0)

    app_config = AppConfig()
    logging_config = app_config.get_logging_config()
    logger = setup_logger(None, logging_config["log_level"], logging_config["log_dir"])
    logger.info(f"Starting {app_config}")

    try:
        config = RunConfig.from_yaml(args.config, suite=args.suite, seed=args.seed, out_dir=args.out,
                                     app_config=app_config)
        writer = ReportWriter(config.out_dir, emit_plot_data=args.emit_plot_data)
        status = COMMANDS[config.suite](config, writer)
    except PolykinError as e:
        code = exit_code_for(e)
        logger.error(f"{type(e).__name__}: {e}")
        print(f"polykin: {e}", file=sys.stderr)
        return code

    logger.info(f"{args.suite} finished with exit code {status}; reports in {config.out_dir}")
    return status


if __name__ == "__main__":
    sys.exit(main())
