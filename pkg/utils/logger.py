"""
Logging Configuration

Sets up logging for polykin runs: a rotating run log, an error log and the
console, with records tagged by suite and configuration fingerprint.
"""

import functools
import logging
import logging.handlers
import time
from datetime import datetime
from pathlib import Path
from typing import Optional

DETAILED_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s'
CONSOLE_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

# calls slower than this are reported at INFO instead of DEBUG
SLOW_CALL_SECONDS = 30.0


def setup_logger(name: Optional[str] = None, log_level: str = "INFO",
                 log_dir: Optional[Path] = None) -> logging.Logger:
    """
    Set up logger with file and console handlers

    numpy/scipy RuntimeWarnings (overflow, invalid value) are routed through
    the py.warnings logger so they land in the run log next to the step that
    raised them.

    Args:
        name: Logger name (configures the root logger if None so every
              module logger reports through it)
        log_level: Console level; the files always record DEBUG
        log_dir: Directory for log files (defaults to ./logs)

    Returns:
        Configured logger
    """
    logger = logging.getLogger(name)
    if logger.handlers:
        return logger

    logger.setLevel(logging.DEBUG)
    log_dir = Path(log_dir) if log_dir is not None else Path("logs")
    log_dir.mkdir(parents=True, exist_ok=True)
    stamp = datetime.now().strftime('%Y%m%d')

    run_handler = logging.handlers.RotatingFileHandler(
        log_dir / f"polykin_{stamp}.log",
        maxBytes=10*1024*1024,  # 10MB
        backupCount=5
    )
    run_handler.setLevel(logging.DEBUG)
    run_handler.setFormatter(logging.Formatter(DETAILED_FORMAT))

    console_handler = logging.StreamHandler()
    console_handler.setLevel(getattr(logging, log_level.upper(), logging.INFO))
    console_handler.setFormatter(logging.Formatter(CONSOLE_FORMAT))

    error_handler = logging.FileHandler(log_dir / f"polykin_errors_{stamp}.log")
    error_handler.setLevel(logging.ERROR)
    error_handler.setFormatter(logging.Formatter(DETAILED_FORMAT))

    for handler in (run_handler, console_handler, error_handler):
        logger.addHandler(handler)
    logging.captureWarnings(True)
    return logger


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger with the standard configuration

    Args:
        name: Logger name

    Returns:
        Logger instance
    """
    return logging.getLogger(name)


class ContextFilter(logging.Filter):
    """Tag log records with the suite and the run fingerprint"""

    def __init__(self, run_id: Optional[str] = None, suite: Optional[str] = None):
        super().__init__()
        self.run_id = run_id
        self.suite = suite

    def filter(self, record):
        record.run_id = self.run_id or "no-run"
        record.suite = self.suite or "-"
        return True


def add_run_context(logger: logging.Logger, run_id: str, suite: Optional[str] = None):
    """
    Add run context to every handler of a logger

    Args:
        logger: Logger whose handlers get the context
        run_id: Run identifier (config fingerprint prefix)
        suite: Suite name
    """
    context_filter = ContextFilter(run_id, suite)
    for handler in logger.handlers:
        for previous in [f for f in handler.filters if isinstance(f, ContextFilter)]:
            handler.removeFilter(previous)
        handler.addFilter(context_filter)
        if isinstance(handler.formatter, logging.Formatter):
            format_str = handler.formatter._fmt
            if "run_id" not in format_str:
                handler.setFormatter(logging.Formatter(
                    format_str.replace("%(levelname)s", "%(levelname)s - [%(suite)s:%(run_id)s]")
                ))


def log_performance(func):
    """Decorator to log wall time of expensive numerical routines"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        logger = logging.getLogger(func.__module__)
        start_time = time.perf_counter()
        try:
            result = func(*args, **kwargs)
        except Exception as e:
            logger.error(f"{func.__qualname__} failed after {time.perf_counter() - start_time:.3f}s: {e}")
            raise
        duration = time.perf_counter() - start_time
        level = logging.INFO if duration > SLOW_CALL_SECONDS else logging.DEBUG
        logger.log(level, f"{func.__qualname__} completed in {duration:.3f}s")
        return result

    return wrapper
