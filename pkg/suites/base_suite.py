"""
Base Suite Class

Common bookkeeping for the command-line suites: run metadata, per-check
PASS/FAIL records and the JSON summary.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional

from config.run_config import RunConfig
from gas_model.quadrature import QuadratureSpec
from linearized.basis import SpectralBasis, build_basis
from linearized.operator import OperatorMatrix, assemble_L
from utils.errors import NumericError, PreconditionError
from utils.logger import add_run_context, log_performance
from utils.report_writer import ReportWriter


@dataclass
class CheckResult:
    """Outcome of one check"""

    name: str
    passed: bool
    measured_constant: Optional[float]
    tolerance: Optional[float]
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> Dict[str, Any]:
        def clean(x):
            if x is None or (isinstance(x, float) and not math.isfinite(x)):
                return None
            return float(x)
        return {
            "lemma": self.name,
            "status": self.status,
            "measured_constant": clean(self.measured_constant),
            "tolerance": clean(self.tolerance),
            "details": self.details,
        }


class BaseSuite(ABC):
    """Base class for all suites"""

    name = "base"

    def __init__(self, config: RunConfig, writer: ReportWriter):
        """
        Initialize base suite

        Args:
            config: Resolved run configuration
            writer: Report writer for the output directory
        """
        self.config = config
        self.writer = writer
        self.params = config.model
        self.quad = config.quad
        self.thresholds = config.thresholds
        self.logger = logging.getLogger(self.__class__.__name__)
        self.results: List[CheckResult] = []

    @cached_property
    def basis(self) -> SpectralBasis:
        section = self.config.basis
        return build_basis(section.n_v, section.n_i, self.params, section.total_degree)

    @cached_property
    def weak_form_quad(self) -> QuadratureSpec:
        """Quadrature with the sample count of the weak-form assembly"""
        return replace(self.quad, mc_samples=self.config.basis.weak_form_samples)

    @cached_property
    def L(self) -> OperatorMatrix:
        return assemble_L(self.basis, self.weak_form_quad)

    @abstractmethod
    def run_checks(self) -> None:
        """Run the suite's checks, calling record/check for each"""
        pass

    def record(self, result: CheckResult) -> CheckResult:
        self.results.append(result)
        level = logging.INFO if result.passed else logging.WARNING
        self.logger.log(level, f"{result.name}: {result.status} (measured={result.measured_constant}, "
                               f"tolerance={result.tolerance})")
        return result

    def check(self, name: str, fn: Callable[[], CheckResult]) -> CheckResult:
        """
        Run one check; numeric failures become a FAIL record and the suite continues

        Args:
            name: Check name used in the summary
            fn: Callable returning the CheckResult

        Returns:
            CheckResult
        """
        try:
            result = fn()
        except (NumericError, PreconditionError) as e:
            diagnostics = getattr(e, "diagnostics", {})
            self.logger.error(f"{name} failed: {e}")
            result = CheckResult(name, False, None, None, {"error": str(e), "diagnostics": diagnostics})
        return self.record(result)

    def metadata(self) -> Dict[str, Any]:
        return {
            "suite": self.name,
            "fingerprint": self.config.fingerprint(),
            "seed": self.config.seed,
            "config": self.config.to_dict(),
        }

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @log_performance
    def run(self) -> int:
        """
        Run the suite and write run_metadata.json and summary.json

        Returns:
            int: 0 when every check passed, 1 otherwise
        """
        add_run_context(logging.getLogger(), self.config.fingerprint()[:12], self.name)
        self.writer.write_json("run_metadata.json", self.metadata())
        self.run_checks()
        summary = {
            "suite": self.name,
            "fingerprint": self.config.fingerprint(),
            "passed": self.passed,
            "checks": [result.to_dict() for result in self.results],
        }
        self.writer.write_json("summary.json", summary)
        self.logger.info(f"{self.name} finished: {sum(r.passed for r in self.results)}/{len(self.results)} checks passed")
        return 0 if self.passed else 1
