"""
Utilities Module

Logging setup, the error hierarchy and the report writer.
"""

from .errors import (
    CapacityError,
    ConfigurationError,
    ConsistencyError,
    DomainError,
    ModelError,
    NumericError,
    PolykinError,
    PositivityError,
    PreconditionError,
    SingularInputError,
    StiffnessError,
    UsageError,
)
from .logger import add_run_context, get_logger, log_performance, setup_logger
from .report_writer import ReportWriter

__all__ = [
    'setup_logger', 'get_logger', 'add_run_context', 'log_performance', 'ReportWriter',
    'PolykinError', 'DomainError', 'UsageError', 'ConfigurationError', 'CapacityError',
    'PreconditionError', 'NumericError', 'ModelError', 'SingularInputError', 'ConsistencyError',
    'StiffnessError', 'PositivityError',
]
