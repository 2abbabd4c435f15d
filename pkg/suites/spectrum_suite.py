"""
Spectrum Suite

Eigenvalues of the mode generators G(k) = −(i k·v + L) for every
canonical wave vector with |k| ≤ k_max, and the spectral gap of each mode.
"""

import itertools
import math
from typing import List, Tuple

import numpy as np
import pandas as pd

from config.run_config import RunConfig
from linearized.basis import KERNEL_DIMENSION
from linearized.operator import kernel_dimension, mode_generator
from solver.modes import relevant_abscissa
from utils.report_writer import ReportWriter

from .base_suite import BaseSuite, CheckResult


def canonical_wavevectors(k_max: int) -> List[Tuple[int, int, int]]:
    """
    Integer wave vectors with k₁ ≥ k₂ ≥ k₃ ≥ 0 and |k| ≤ k_max

    The spectrum of G(k) is invariant under permutations and sign changes
    of k, so these represent every mode up to symmetry.
    """
    vectors = [k for k in itertools.product(range(k_max + 1), repeat=3)
               if k[0] >= k[1] >= k[2] and math.sqrt(sum(c * c for c in k)) <= k_max + 1e-12]
    return sorted(vectors, key=lambda k: (sum(c * c for c in k), k))


class SpectrumSuite(BaseSuite):
    """Mode spectra and gaps"""

    name = "spectrum"

    def run_checks(self) -> None:
        self.check("spectrum", self.check_spectrum)

    def check_spectrum(self) -> CheckResult:
        L = self.L
        spectrum_rows, gap_rows = [], []
        kernel_count = kernel_dimension(L)
        min_gap = math.inf
        for k in canonical_wavevectors(self.config.grids.k_max):
            G = mode_generator(k, self.basis, L)
            values = G.eigenvalues()
            magnitude = math.sqrt(sum(c * c for c in k))
            for index, value in enumerate(values):
                spectrum_rows.append({"k1": k[0], "k2": k[1], "k3": k[2], "k_norm": magnitude,
                                      "index": index, "re": float(value.real), "im": float(value.imag)})
            gap = -relevant_abscissa(G, L)
            gap_rows.append({"k1": k[0], "k2": k[1], "k3": k[2], "k_norm": magnitude, "gap": gap})
            if any(k):
                min_gap = min(min_gap, gap)
            self.logger.info(f"k={k}: gap={gap:.6g}")

        self.writer.write_records("spectrum.csv", spectrum_rows)
        frame = pd.DataFrame(gap_rows)
        self.writer.write_csv("spectral_gaps.csv", frame)
        self.writer.write_series("spectral_gap_vs_k", frame["k_norm"], frame["gap"])

        zero_gap = float(frame["gap"].iloc[0])
        passed = kernel_count == KERNEL_DIMENSION and zero_gap > 0
        if len(frame) > 1:
            passed = passed and min_gap > 0
        measured = min_gap if math.isfinite(min_gap) else zero_gap
        return CheckResult("spectrum", bool(passed), measured, 0.0,
                           {"kernel_dimension": kernel_count, "lambda0": zero_gap,
                            "modes": len(frame), "basis_size": self.basis.size,
                            "max_abs_eigenvalue": float(np.max(np.abs(L.eigenvalues())))})


def cmd_spectrum(config: RunConfig, writer: ReportWriter) -> int:
    """
    Run the spectrum suite

    Returns:
        int: 0 when the kernel has dimension 5 and every gap is positive, 1 otherwise
    """
    return SpectrumSuite(config.with_suite("spectrum"), writer).run()
