"""
Tests for model parameters, equilibrium, quadrature rules and grids
"""

import math

import numpy as np
import pytest

from gas_model.equilibrium import (
    entropy_maxwellian,
    gamma_fn,
    maxwellian,
    maxwellian_values,
    moment_identity,
    weight,
)
from gas_model.grid import DistributionGrid, GridQuantity, defect_moments, leaked_mass
from gas_model.params import ModelParams, PhasePoint
from gas_model.quadrature import QuadratureSpec, gauss_laguerre_gamma, phase_rule, sphere_directions
from utils.errors import ConfigurationError, DomainError, UsageError


@pytest.mark.parametrize("kwargs", [
    {"delta": 1.5},
    {"alpha": -0.1},
    {"alpha": 3.0},
    {"c_sigma": 0.0},
    {"beta": 5.0},
    {"delta": float("nan")},
])
def test_model_params_rejects_out_of_range(kwargs):
    with pytest.raises(DomainError):
        ModelParams(**kwargs)


def test_model_params_derived_constants(params):
    assert params.laguerre_parameter == 0.0
    assert params.kinetic_exponent == 0.5
    # Z(2) = 4π B(3/2, 2) B(1, 1) = 16π/15
    assert params.measure_mass == pytest.approx(16 * math.pi / 15, rel=1e-12)
    assert params.collision_constant == pytest.approx(16 * math.pi / 15, rel=1e-12)


def test_phase_point_validation():
    with pytest.raises(DomainError):
        PhasePoint(v=(0.0, 0.0, 0.0), i=-1.0)
    with pytest.raises(DomainError):
        PhasePoint(v=(0.0, 0.0), i=1.0)
    with pytest.raises(DomainError):
        PhasePoint(v=(float("inf"), 0.0, 0.0), i=1.0)

    boundary = PhasePoint(v=(0.0, 0.0, 0.0), i=0.0)
    assert not boundary.is_interior
    assert PhasePoint(v=(3.0, 0.0, 4.0), i=1.0).speed == pytest.approx(5.0)


def test_gamma_fn_half():
    assert gamma_fn(0.5) ** 2 == pytest.approx(math.pi, rel=1e-14)
    assert gamma_fn(5) == pytest.approx(24.0)


def test_maxwellian_at_origin_delta_two(params):
    # δ = 2: M(0, I) = e^{−I} / (2π)^{3/2}
    value = maxwellian(PhasePoint(v=(0.0, 0.0, 0.0), i=1.0), params)
    assert value == pytest.approx(math.exp(-1) / (2 * math.pi) ** 1.5, rel=1e-13)


def test_maxwellian_requires_positive_energy(params):
    with pytest.raises(DomainError):
        maxwellian(PhasePoint(v=(0.0, 0.0, 0.0), i=0.0), params)


def test_weight_value(params):
    # (1 + 5 + 2)^6
    assert weight(PhasePoint(v=(3.0, 0.0, 4.0), i=4.0), params) == pytest.approx(8.0 ** 6)


@pytest.mark.parametrize("delta", [2.0, 3.0, 5.5])
def test_maxwellian_has_unit_mass_and_energy(delta):
    params = ModelParams(delta=delta)
    rule = phase_rule(6, 6, params)
    assert np.sum(rule.weights) == pytest.approx(1.0, rel=1e-12)
    energy = np.sum(rule.weights * (np.sum(rule.v ** 2, axis=1) + 2 * rule.i))
    assert energy == pytest.approx(3 + delta, rel=1e-12)


def test_moment_identity_values(params):
    assert moment_identity("|v|^4") == 15.0
    assert moment_identity("|v|^2 v_j^2") == 5.0
    # E[I^{δ/2}] / Γ(δ/2) normalisation: Γ(δ/2 + 1) / Γ(δ/2) = δ/2
    assert moment_identity("I^(d/2)", params) == pytest.approx(params.delta / 2)


def test_moment_identity_errors():
    with pytest.raises(UsageError):
        moment_identity("I^(d/2)")
    with pytest.raises(UsageError):
        moment_identity("v^7")


def test_gauss_laguerre_gamma_moments():
    nodes, weights = gauss_laguerre_gamma(5, 2.5)
    assert np.sum(weights) == pytest.approx(1.0, rel=1e-12)
    assert np.sum(weights * nodes) == pytest.approx(2.5, rel=1e-12)


def test_sphere_directions_cover_the_sphere():
    directions, weights = sphere_directions(6, 8)
    assert np.sum(weights) == pytest.approx(4 * math.pi, rel=1e-12)
    np.testing.assert_allclose(np.linalg.norm(directions, axis=1), 1.0, rtol=1e-12)


def test_quadrature_spec_validation():
    with pytest.raises(ConfigurationError):
        QuadratureSpec(n_hermite=0)
    with pytest.raises(ConfigurationError):
        QuadratureSpec(r_min=20.0, outer_radius=12.0)
    with pytest.raises(ConfigurationError):
        QuadratureSpec(seed=-1)


def test_refined_doubles_deterministic_counts_only():
    quad = QuadratureSpec()
    refined = quad.refined()
    assert refined.n_radial == 2 * quad.n_radial
    assert refined.n_outer_polar == 2 * quad.n_outer_polar
    assert refined.mc_samples == quad.mc_samples
    assert refined.n_hermite == quad.n_hermite
    assert refined.seed == quad.seed


def test_equilibrium_grid_has_zero_defects(params, small_quad):
    grid = DistributionGrid.from_quadrature(params, small_quad)
    moments = defect_moments(grid, params)
    assert moments.max_abs() == pytest.approx(0.0, abs=1e-14)
    assert grid.sup_norm() == pytest.approx(0.0, abs=1e-14)


def test_weighted_perturbation_round_trip(params, small_quad):
    grid = DistributionGrid.from_quadrature(
        params, small_quad, fn=lambda v, i: 0.01 * np.cos(v[:, 0]) * np.exp(-i),
        quantity=GridQuantity.WEIGHTED_PERTURBATION,
    )
    as_distribution = grid.with_values(grid.distribution(), quantity=GridQuantity.DISTRIBUTION)
    np.testing.assert_allclose(as_distribution.weighted_perturbation(), grid.values, atol=1e-12)


def test_lattice_grid_integrates_over_the_torus(params, small_quad):
    grid = DistributionGrid.from_quadrature(params, small_quad, n_cells=2)
    assert grid.values.shape == (2, 2, 2, grid.n_nodes)
    assert grid.integrate(grid.distribution()) == pytest.approx((2 * math.pi) ** 3, rel=1e-12)


def test_grid_rejects_mismatched_values(params, small_quad):
    grid = DistributionGrid.from_quadrature(params, small_quad)
    with pytest.raises(UsageError):
        grid.with_values(np.zeros(grid.n_nodes + 1))


def test_leaked_mass_is_zero_inside_radius(params, small_quad):
    grid = DistributionGrid.from_quadrature(
        params, small_quad, fn=lambda v, i: 1.1 * maxwellian_values(v, i, params))
    # four Hermite nodes per axis all lie well inside R_v = 8
    assert leaked_mass(grid) == 0.0


def test_entropy_maxwellian_closed_form(params):
    expected = -1.5 * math.log(2 * math.pi) - math.lgamma(1.0) - 2.5
    assert entropy_maxwellian(params) == pytest.approx(expected, rel=1e-14)
