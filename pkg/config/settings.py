"""
Application Configuration Settings

Manages environment variables, paths and process-wide settings for polykin runs.
"""

import logging
import os
from pathlib import Path
from typing import Optional

logger = logging.getLogger(__name__)


class AppConfig:
    """Application configuration manager"""

    def __init__(self):
        """Initialize configuration from environment variables"""

        # Base paths
        self.BASE_DIR = Path(__file__).parent.parent
        self.LOGS_DIR = Path(os.getenv("POLYKIN_LOGS_DIR", str(self.BASE_DIR / "logs")))
        self.DEFAULT_CONFIG_PATH = self.BASE_DIR / "polykin_defaults.yaml"

        # Overrides for batch runs (take precedence over the run file)
        self.SEED_OVERRIDE = self._optional_int("POLYKIN_SEED")
        self.OUT_DIR_OVERRIDE = os.getenv("POLYKIN_OUT_DIR") or None

        # Resource limits
        self.MAX_BASIS_SIZE = int(os.getenv("POLYKIN_MAX_BASIS_SIZE", "4000"))

        # Application Settings
        self.APP_NAME = "polykin"
        self.VERSION = "1.0.0"
        self.DEBUG = os.getenv("DEBUG", "False").lower() == "true"

        # Logging Configuration
        self.LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
        self.LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

        self._validate_settings()

    @staticmethod
    def _optional_int(name: str) -> Optional[int]:
        raw = os.getenv(name)
        if raw is None or raw.strip() == "":
            return None
        try:
            return int(raw)
        except ValueError:
            logger.warning(f"Ignoring non-integer {name}={raw!r}")
            return None

    def _validate_settings(self) -> None:
        """Validate critical configuration settings"""

        if self.MAX_BASIS_SIZE < 5:
            logger.warning("POLYKIN_MAX_BASIS_SIZE below 5 cannot hold the collision invariants; using 5")
            self.MAX_BASIS_SIZE = 5

        if self.LOG_LEVEL.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            logger.warning(f"Unknown LOG_LEVEL {self.LOG_LEVEL!r}; using INFO")
            self.LOG_LEVEL = "INFO"

    def get_logging_config(self) -> dict:
        """Get logging configuration"""
        return {
            "log_level": self.LOG_LEVEL,
            "log_dir": self.LOGS_DIR,
        }

    def get_override_config(self) -> dict:
        """Get environment overrides for the run configuration"""
        return {
            "seed": self.SEED_OVERRIDE,
            "out_dir": self.OUT_DIR_OVERRIDE,
        }

    def is_debug_mode(self) -> bool:
        """Check if application is in debug mode"""
        return self.DEBUG

    def __str__(self) -> str:
        """String representation of configuration"""
        return f"{self.APP_NAME} v{self.VERSION} - Debug: {self.DEBUG}"
