"""
Tests for the Picard sequence, homogeneous relaxation and the torus stepper
"""

import math

import numpy as np
import pytest

from gas_model.grid import DistributionGrid, GridQuantity, defect_moments
from gas_model.params import ModelParams
from gas_model.quadrature import QuadratureSpec
from linearized.basis import build_basis
from solver.modes import fitted_decay_rate
from solver.picard import PicardSolver, picard_iterate, t1_horizon, time_integration
from solver.relaxation import (
    HomogeneousRelaxation,
    bimodal_initial_grid,
    bimodal_initial_state,
    equilibrium_initial_state,
    homogeneous_relax,
)
from solver.torus import MAX_CELLS, TorusMildStepper, periodic_shift, small_data_initial_state, torus_mild_step
from utils.errors import DomainError, PositivityError, PreconditionError, StiffnessError, UsageError


@pytest.fixture
def coarse_quad():
    return QuadratureSpec(n_hermite=3, n_laguerre=2, n_radial=24, mc_samples=2000, mc_block=1024,
                          time_panels=2, time_nodes=3)


def test_t1_horizon_value():
    assert t1_horizon(0.01, 1.0) == pytest.approx(1 / (8 * 1.01))
    assert t1_horizon(0.0, 2.0) == pytest.approx(1 / 16)


@pytest.mark.parametrize("f0_norm,c1", [(0.1, 0.0), (-1.0, 1.0), (float("inf"), 1.0)])
def test_t1_horizon_rejects_bad_input(f0_norm, c1):
    with pytest.raises(UsageError):
        t1_horizon(f0_norm, c1)


def test_time_integration_is_exact_for_polynomials():
    times, S = time_integration(0.3, panels=3, nodes=4)
    assert np.all(np.diff(times) > 0)
    np.testing.assert_allclose(S @ np.ones_like(times), times, atol=1e-14)
    np.testing.assert_allclose(S @ times, times ** 2 / 2, atol=1e-14)


def test_picard_at_equilibrium_stays_put(params, coarse_quad):
    F0 = DistributionGrid.from_quadrature(params, coarse_quad)
    reports = PicardSolver(F0, params, coarse_quad, samples_per_node=32).run(t1_horizon(0.0, 1.0), 3)
    assert [r.n for r in reports] == [0, 1, 2]
    assert reports[0].ratio is None
    for report in reports:
        assert report.sup_norm == 0.0
        assert report.diff_norm == 0.0
    assert reports[1].ratio == 0.0


def test_picard_small_data_contracts(params, coarse_quad):
    h0 = DistributionGrid.from_quadrature(
        params, coarse_quad, fn=lambda v, i: 0.01 * np.cos(v[:, 0]) * np.exp(-0.1 * i),
        quantity=GridQuantity.WEIGHTED_PERTURBATION,
    )
    f0_norm = h0.sup_norm()
    reports = PicardSolver(h0, params, coarse_quad, samples_per_node=64).run(t1_horizon(f0_norm, 1.0), 4)
    assert reports[0].sup_norm == pytest.approx(f0_norm)
    assert max(r.sup_norm for r in reports) <= 2 * f0_norm
    assert all(r.ratio < 1 for r in reports[1:])


def test_picard_rejects_long_horizon(params, coarse_quad):
    F0 = DistributionGrid.from_quadrature(params, coarse_quad)
    with pytest.raises(PreconditionError):
        PicardSolver(F0, params, coarse_quad, samples_per_node=8).run(1.0, 2)


def test_picard_needs_homogeneous_grid(params, coarse_quad):
    lattice = DistributionGrid.from_quadrature(params, coarse_quad, n_cells=2)
    with pytest.raises(UsageError):
        PicardSolver(lattice, params, coarse_quad)


def test_bimodal_state_is_normalised(params, small_quad):
    grid = bimodal_initial_grid(params, small_quad, gamma=0.55)
    moments = defect_moments(grid, params)
    assert moments.max_abs() == pytest.approx(0.0, abs=1e-12)
    assert np.all(grid.distribution() > 0)


def test_bimodal_state_is_bimodal_in_v1(params):
    h = bimodal_initial_state(params, gamma=0.65)
    v = np.zeros((3, 3))
    v[:, 0] = [0.0, 1.0, 2.0]
    i = np.ones(3)
    values = h(v, i)
    assert values[1] > values[0]
    assert values[2] > values[1]


@pytest.mark.parametrize("gamma", [2.0, 0.0, -0.5])
def test_bimodal_state_infeasible_gamma(params, gamma):
    with pytest.raises(DomainError):
        bimodal_initial_state(params, gamma=gamma)


def test_bimodal_feasibility_edge_at_delta_two(params):
    # γ < 1/√2 at δ = 2
    bimodal_initial_state(params, gamma=0.70)
    with pytest.raises(DomainError):
        bimodal_initial_state(params, gamma=0.71)
    bimodal_initial_state(ModelParams(delta=6.0), gamma=5.0)


def test_relaxation_from_equilibrium_is_stationary(params, small_quad, small_basis):
    relax = HomogeneousRelaxation(params, small_quad, small_basis, n_samples=2000)
    trajectory = relax.run(equilibrium_initial_state(params, small_quad), dt=0.01, n_steps=3)
    frame = trajectory.to_frame()
    assert len(frame) == 4
    np.testing.assert_allclose(frame["l2_distance"], 0.0, atol=1e-12)
    np.testing.assert_allclose(frame["mass_defect"], 0.0, atol=1e-12)
    assert frame["entropy"].max() - frame["entropy"].min() <= 1e-12
    assert trajectory.entropy_violations() == []


def test_relaxation_conserves_and_dissipates(params, small_quad):
    basis = build_basis(4, 2, params)
    relax = HomogeneousRelaxation(params, small_quad, basis, n_samples=4000)
    trajectory = relax.run(bimodal_initial_grid(params, small_quad), dt=0.02, n_steps=4)
    drift = trajectory.conservation_drift()
    assert max(drift.values()) <= 1e-10
    assert trajectory.entropy_violations() == []
    assert len(trajectory.negative_masses) == 5
    assert trajectory.negative_masses[0] == 0.0
    assert max(trajectory.negative_masses) <= relax.negative_mass_tol
    frame = trajectory.to_frame()
    assert frame["l2_distance"].iloc[-1] < frame["l2_distance"].iloc[0]


def test_truncated_bimodal_state_loses_positivity(params, small_quad, small_basis):
    # n_i = 1 keeps only the linear part of the internal profile, negative at large I
    relax = HomogeneousRelaxation(params, small_quad, small_basis, n_samples=500)
    with pytest.raises(PositivityError) as info:
        relax.run(bimodal_initial_grid(params, small_quad), dt=0.01, n_steps=1)
    diagnostics = info.value.diagnostics
    assert diagnostics["t"] == 0.0
    assert diagnostics["negative_mass"] > diagnostics["negative_mass_tol"] == 1e-3
    assert diagnostics["nonpositive_nodes"] > 0
    assert diagnostics["min_value"] < 0


def test_small_negative_mass_is_dropped_from_entropy(params, small_quad, small_basis):
    relax = HomogeneousRelaxation(params, small_quad, small_basis, n_samples=500, negative_mass_tol=1.0)
    trajectory = relax.run(bimodal_initial_grid(params, small_quad), dt=0.01, n_steps=1)
    assert trajectory.negative_masses[0] > 1e-3
    assert np.all(np.isfinite(trajectory.to_frame()["entropy"]))
    assert trajectory.tolerances[0] > 0


def test_relaxation_rejects_stiff_step(params, small_quad, small_basis):
    relax = HomogeneousRelaxation(params, small_quad, small_basis, n_samples=500)
    with pytest.raises(StiffnessError) as info:
        relax.run(equilibrium_initial_state(params, small_quad), dt=1.0, n_steps=1)
    assert info.value.diagnostics["dt"] == 1.0


def test_relaxation_rejects_foreign_basis(params, small_quad):
    with pytest.raises(UsageError):
        HomogeneousRelaxation(params, small_quad, build_basis(2, 1, ModelParams(delta=3.0)))


def test_periodic_shift():
    field = np.arange(4.0).reshape(4, 1, 1)
    np.testing.assert_array_equal(periodic_shift(field, 1.0, 0), np.roll(field, 1, axis=0))
    np.testing.assert_array_equal(periodic_shift(field, 4.0, 0), field)
    half = periodic_shift(field, 0.5, 0)
    np.testing.assert_allclose(half.ravel(), [1.5, 0.5, 1.5, 2.5])


def test_small_data_state_has_zero_defects(params, coarse_quad):
    h0 = small_data_initial_state(params, coarse_quad, n_cells=2, amplitude=1e-2)
    assert h0.sup_norm() == pytest.approx(1e-2)
    assert defect_moments(h0, params).max_abs() == pytest.approx(0.0, abs=1e-12)


def test_small_data_state_cell_limit(params, coarse_quad):
    with pytest.raises(UsageError):
        small_data_initial_state(params, coarse_quad, n_cells=MAX_CELLS + 1)


def test_torus_zero_state_stays_zero(params, coarse_quad):
    stepper = TorusMildStepper(params, coarse_quad, n_samples=1000)
    h0 = DistributionGrid.from_quadrature(params, coarse_quad, n_cells=2,
                                          quantity=GridQuantity.WEIGHTED_PERTURBATION)
    trajectory = stepper.run(h0, dt=0.1, n_steps=2)
    np.testing.assert_array_equal(trajectory.sup_norms, 0.0)
    assert trajectory.efolds == 0.0


def test_torus_run_is_reproducible(params, coarse_quad):
    h0 = small_data_initial_state(params, coarse_quad, n_cells=2)
    first = TorusMildStepper(params, coarse_quad, n_samples=1000).run(h0, dt=0.1, n_steps=3)
    again = TorusMildStepper(params, coarse_quad, n_samples=1000).run(h0, dt=0.1, n_steps=3)
    np.testing.assert_array_equal(first.sup_norms, again.sup_norms)
    assert np.all(np.isfinite(first.sup_norms))
    assert first.final.time == pytest.approx(0.3)


def test_torus_rejects_foreign_grid(params, coarse_quad, small_quad):
    stepper = TorusMildStepper(params, coarse_quad, n_samples=500)
    with pytest.raises(UsageError):
        stepper.step(small_data_initial_state(params, small_quad, n_cells=2), 0.1)


def test_fitted_decay_rate_of_exponential():
    times = np.linspace(0.0, 3.0, 31)
    assert fitted_decay_rate(times, np.exp(-2.0 * times)) == pytest.approx(2.0)
    assert math.isinf(fitted_decay_rate(times, np.zeros_like(times)))


def test_picard_iterate_matches_solver(params, coarse_quad):
    F0 = DistributionGrid.from_quadrature(params, coarse_quad)
    reports = picard_iterate(F0, t1_horizon(0.0, 1.0), 2, params, coarse_quad, samples_per_node=16)
    assert [r.n for r in reports] == [0, 1]
    assert reports[1].diff_norm == 0.0


def test_homogeneous_relax_wrapper(params, small_quad, small_basis):
    trajectory = homogeneous_relax(equilibrium_initial_state(params, small_quad), 0.01, 2, params, small_quad,
                                   basis=small_basis, n_samples=1000)
    assert len(trajectory.to_frame()) == 3
    assert len(trajectory.tolerances) == 2


def test_torus_mild_step_of_zero_state(params, coarse_quad):
    h0 = DistributionGrid.from_quadrature(params, coarse_quad, n_cells=2,
                                          quantity=GridQuantity.WEIGHTED_PERTURBATION)
    step = torus_mild_step(h0, 0.1, params, coarse_quad)
    assert step.sup_norm == 0.0
    assert step.mass_leak >= 0.0
    assert step.grid.values.shape == h0.values.shape
