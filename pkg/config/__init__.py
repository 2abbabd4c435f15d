"""
Configuration Module

Environment settings and the YAML run configuration of the suites.
"""

from .run_config import (
    SUITES,
    VERIFY_CHECKS,
    BasisSection,
    DecaySection,
    GridSection,
    RelaxSection,
    RunConfig,
    Thresholds,
    VerifySection,
)
from .settings import AppConfig

__all__ = ['AppConfig', 'RunConfig', 'BasisSection', 'GridSection', 'Thresholds', 'RelaxSection',
           'DecaySection', 'VerifySection', 'SUITES', 'VERIFY_CHECKS']
