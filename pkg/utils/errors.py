"""
Error Types

Exception hierarchy shared by the numerical packages and the command-line suites.
"""

from typing import Any, Dict, Optional


class PolykinError(Exception):
    """Base class for every error raised by polykin"""


class DomainError(PolykinError, ValueError):
    """Argument lies outside the mathematical domain of the operation"""


class UsageError(PolykinError, ValueError):
    """Operation called with inconsistent or unsupported arguments"""


class ConfigurationError(PolykinError):
    """Run configuration is invalid (CLI exit code 2)"""


class CapacityError(PolykinError):
    """Requested discretization exceeds the configured resource limits"""


class PreconditionError(PolykinError):
    """Input violates a documented precondition of the operation"""


class NumericError(PolykinError):
    """
    Numerical check or computation failed (CLI exit code 1)

    Args:
        message: Human readable description
        diagnostics: Quantities that explain the failure
    """

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        details = ", ".join(f"{key}={value}" for key, value in sorted(self.diagnostics.items()))
        return f"{base} ({details})"


class ModelError(NumericError):
    """Discretized model lost a structural property (e.g. kernel dimension)"""


class SingularInputError(NumericError):
    """Kernel evaluated on its singular set"""


class ConsistencyError(NumericError):
    """Iterate violated an invariant that the scheme must preserve"""


class StiffnessError(NumericError):
    """Time step too large for the collision frequency"""


class PositivityError(NumericError):
    """Discrete distribution went negative beyond resolution noise"""
