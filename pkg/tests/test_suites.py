"""
Tests for the PASS predicates of the verify and decay suites
"""

import numpy as np
import pytest

from config.run_config import Thresholds
from solver.modes import ModeDecayRecord
from suites.decay_suite import mode_summary
from suites.verify_suite import energy_decay_fit, energy_decay_passes


@pytest.fixture
def thresholds():
    return Thresholds()


def test_energy_decay_fit_of_power_law():
    energies = np.geomspace(20.0, 200.0, 5)
    slope, stderr = energy_decay_fit(energies, 3.0 * energies ** -0.25)
    assert slope == pytest.approx(-0.25, abs=1e-12)
    assert stderr == pytest.approx(0.0, abs=1e-10)


def test_energy_decay_fit_of_two_points():
    slope, stderr = energy_decay_fit([10.0, 100.0], [1.0, 0.1])
    assert slope == pytest.approx(-1.0)
    assert stderr == 0.0


def test_energy_decay_gate_uses_the_required_slope(thresholds):
    assert thresholds.kw_slope_max == -0.125
    energies = np.geomspace(20.0, 200.0, 5)
    fast = energy_decay_fit(energies, energies ** -0.25)
    slow = energy_decay_fit(energies, energies ** -0.1)
    assert energy_decay_passes(*fast, thresholds.kw_slope_max, thresholds.n_sigma)
    assert not energy_decay_passes(*slow, thresholds.kw_slope_max, thresholds.n_sigma)


def test_energy_decay_gate_widens_by_standard_error(thresholds):
    assert energy_decay_passes(-0.1, 0.01, thresholds.kw_slope_max, 3.0)
    assert not energy_decay_passes(-0.1, 0.005, thresholds.kw_slope_max, 3.0)
    assert not energy_decay_passes(float("nan"), 0.0, thresholds.kw_slope_max, 3.0)


def mode_record(k, norms, lambda_fit=1.0, abscissa=-1.0):
    times = np.linspace(0.0, 10.0, len(norms))
    return ModeDecayRecord(k=k, times=times, norms=np.asarray(norms, dtype=float),
                           energies=np.exp(-2.0 * times), lambda_fit=lambda_fit,
                           spectral_abscissa=abscissa, eps=0.0, certified_rate=None)


def test_mode_summary_passes_monotone_mode(thresholds):
    norms = np.exp(-np.linspace(0.0, 10.0, 11))
    summary = mode_summary(mode_record((1, 0, 0), norms), 2.0, thresholds)
    assert summary["transient"] == pytest.approx(2.5)
    assert summary["norm_monotone_after_transient"]
    assert summary["passed"]


def test_mode_summary_fails_on_late_norm_growth(thresholds):
    norms = np.exp(-np.linspace(0.0, 10.0, 11))
    norms[7] = norms[6] * 1.01
    summary = mode_summary(mode_record((1, 0, 0), norms), 2.0, thresholds)
    assert not summary["norm_monotone_after_transient"]
    assert not summary["passed"]


def test_mode_summary_transient_scales_with_gap(thresholds):
    norms = np.exp(-np.linspace(0.0, 10.0, 11))
    norms[2] = norms[1] * 1.01
    # t = 2 lies inside 5/λ₀ = 2.5 and outside 5/λ₀ = 0.5
    assert mode_summary(mode_record((1, 1, 0), norms), 2.0, thresholds)["passed"]
    assert not mode_summary(mode_record((1, 1, 0), norms), 10.0, thresholds)["passed"]


def test_mode_summary_fails_on_rate_error(thresholds):
    norms = np.exp(-np.linspace(0.0, 10.0, 11))
    summary = mode_summary(mode_record((1, 0, 0), norms, lambda_fit=1.5), 2.0, thresholds)
    assert summary["relative_rate_error"] == pytest.approx(0.5)
    assert not summary["passed"]


def test_mode_summary_at_zero_wavevector(thresholds):
    norms = np.exp(-np.linspace(0.0, 10.0, 11))
    assert mode_summary(mode_record((0, 0, 0), norms), 1.0, thresholds)["passed"]
    assert not mode_summary(mode_record((0, 0, 0), norms), 2.0, thresholds)["passed"]
