"""
Tests for the collision map, sampled collision integrals, weak form and entropy
"""

import numpy as np
import pytest

from collision.distributions import MaxwellianDistribution, MaxwellianProductDistribution
from collision.entropy import entropy_h
from collision.operator import (
    CollisionPair,
    CollisionParams,
    cross_section_b,
    gamma_apply,
    post_collision,
    q_apply,
    sweep_q,
    total_energy_phi,
)
from collision.sampling import stream
from collision.weak_form import collision_coefficients, draw_weak_form_samples, linearized_form_matrix
from gas_model.equilibrium import entropy_maxwellian
from gas_model.grid import DistributionGrid
from gas_model.params import ModelParams, PhasePoint
from utils.errors import DomainError, UsageError


@pytest.fixture
def pair():
    return CollisionPair(p=PhasePoint(v=(1.0, 0.0, 0.0), i=1.0),
                         p_star=PhasePoint(v=(-0.5, 2.0, 0.0), i=0.3))


def test_total_energy_phi():
    pair = CollisionPair(p=PhasePoint(v=(2.0, 0.0, 0.0), i=1.0),
                         p_star=PhasePoint(v=(0.0, 0.0, 0.0), i=0.5))
    assert total_energy_phi(pair) == pytest.approx(2.5)


def test_cross_section_b(pair, params):
    assert cross_section_b(pair, params) == pytest.approx(total_energy_phi(pair) ** 0.5)


@pytest.mark.parametrize("r_frac,r_split", [(0.3, 0.6), (0.0, 0.5), (1.0, 0.0)])
def test_post_collision_conserves_momentum_and_energy(pair, r_frac, r_split):
    omega = np.array([1.0, 2.0, 2.0]) / 3.0
    state = post_collision(pair, CollisionParams(omega=tuple(omega), r_frac=r_frac, r_split=r_split))

    before = pair.p.velocity + pair.p_star.velocity
    after = state.p_prime.velocity + state.p_star_prime.velocity
    np.testing.assert_allclose(after, before, atol=1e-14)

    def energy(p):
        return 0.5 * p.velocity @ p.velocity + p.i

    assert energy(state.p_prime) + energy(state.p_star_prime) == pytest.approx(
        energy(pair.p) + energy(pair.p_star), rel=1e-14)


def test_collision_params_validation():
    with pytest.raises(DomainError):
        CollisionParams(omega=(1.0, 1.0, 0.0), r_frac=0.5, r_split=0.5)
    with pytest.raises(DomainError):
        CollisionParams(omega=(0.0, 0.0, 1.0), r_frac=1.5, r_split=0.5)


def test_streams_are_reproducible():
    first = stream(11, 1, 2).random(5)
    again = stream(11, 1, 2).random(5)
    other = stream(11, 1, 3).random(5)
    np.testing.assert_array_equal(first, again)
    assert not np.array_equal(first, other)


@pytest.mark.parametrize("delta", [2.0, 3.0])
def test_q_of_equilibrium_vanishes(delta, small_quad):
    params = ModelParams(delta=delta)
    M = MaxwellianDistribution(params)
    points = [PhasePoint(v=(0.0, 0.0, 0.0), i=0.5), PhasePoint(v=(1.5, -0.5, 2.0), i=3.0)]
    for estimate in sweep_q(M, M, points, params, small_quad):
        assert abs(estimate.value) <= estimate.tolerance(3.0)
        assert estimate.loss > 0


def test_q_rejects_plain_callables(params, small_quad):
    with pytest.raises(UsageError):
        q_apply(lambda v, i: np.ones(len(i)), MaxwellianDistribution(params),
                PhasePoint(v=(0.0, 0.0, 0.0), i=1.0), params, small_quad)


def test_q_rejects_foreign_parameters(params, small_quad):
    other = MaxwellianDistribution(ModelParams(delta=4.0))
    with pytest.raises(UsageError):
        q_apply(other, other, PhasePoint(v=(0.0, 0.0, 0.0), i=1.0), params, small_quad)


def test_gamma_of_zero_perturbation(params, small_quad):
    estimate = gamma_apply(lambda v, i: np.zeros(len(i)), lambda v, i: np.ones(len(i)),
                           PhasePoint(v=(0.5, 0.0, 0.0), i=1.0), params, small_quad)
    assert estimate.value == 0.0
    assert estimate.gain == 0.0


def test_q_same_stream_is_deterministic(params, small_quad):
    F = MaxwellianProductDistribution(params, lambda v, i: 1 + 0.1 * v[..., 0] ** 2)
    p = PhasePoint(v=(0.3, 0.1, -0.2), i=0.7)
    first = q_apply(F, F, p, params, small_quad, stream_index=4)
    again = q_apply(F, F, p, params, small_quad, stream_index=4)
    assert first.value == again.value


@pytest.fixture
def weak_samples(params):
    return draw_weak_form_samples(params, 6000, seed=7, block=2048)


def test_linearized_form_is_symmetric_psd_with_invariant_kernel(small_basis, weak_samples):
    matrix = linearized_form_matrix(small_basis, weak_samples)
    np.testing.assert_array_equal(matrix, matrix.T)
    values = np.linalg.eigvalsh(matrix)
    scale = np.max(np.abs(values))
    assert values[0] >= -1e-12 * scale
    residual = matrix @ small_basis.kernel_vectors().T
    assert np.max(np.abs(residual)) <= 1e-10 * scale


def test_collision_coefficients_vanish_at_equilibrium(small_basis, weak_samples):
    coefficients = np.zeros(small_basis.size)
    coefficients[0] = 1.0
    projection = collision_coefficients(coefficients, small_basis, weak_samples)
    np.testing.assert_array_equal(projection.values, 0.0)


def test_collision_coefficients_are_orthogonal_to_invariants(small_basis, weak_samples):
    rng = np.random.default_rng(3)
    coefficients = rng.standard_normal(small_basis.size)
    values = collision_coefficients(coefficients, small_basis, weak_samples).values
    moments = small_basis.kernel_vectors() @ values
    assert np.max(np.abs(moments)) <= 1e-10 * np.linalg.norm(values)


def test_central_difference_recovers_linearized_form(small_basis, weak_samples):
    # quadratic terms cancel exactly on a shared sample set
    matrix = linearized_form_matrix(small_basis, weak_samples)
    direction = np.random.default_rng(5).standard_normal(small_basis.size)
    base = np.zeros(small_basis.size)
    base[0] = 1.0
    eps = 1e-3
    plus = collision_coefficients(base + eps * direction, small_basis, weak_samples).values
    minus = collision_coefficients(base - eps * direction, small_basis, weak_samples).values
    np.testing.assert_allclose((plus - minus) / (2 * eps), -matrix @ direction,
                               atol=1e-8 * np.linalg.norm(matrix))


def test_collision_coefficients_batch_matches_single(small_basis, weak_samples):
    rng = np.random.default_rng(9)
    batch = rng.standard_normal((3, small_basis.size))
    stacked = collision_coefficients(batch, small_basis, weak_samples).values
    for row, coefficients in zip(stacked, batch):
        single = collision_coefficients(coefficients, small_basis, weak_samples).values
        np.testing.assert_allclose(row, single, rtol=1e-12, atol=1e-14)


def test_direction_error_is_reported(small_basis, weak_samples):
    coefficients = np.zeros(small_basis.size)
    coefficients[0] = 1.0
    coefficients[3] = 0.2
    projection = collision_coefficients(coefficients, small_basis, weak_samples, direction=coefficients)
    assert projection.direction_error is not None
    assert projection.direction_error >= 0.0


def test_entropy_of_equilibrium_grid(params, small_quad):
    grid = DistributionGrid.from_quadrature(params, small_quad)
    assert entropy_h(grid, params) == pytest.approx(entropy_maxwellian(params), rel=1e-12)


def test_entropy_requires_positive_distribution(params, small_quad):
    grid = DistributionGrid.from_quadrature(params, small_quad, fn=lambda v, i: np.zeros(len(i)))
    with pytest.raises(DomainError):
        entropy_h(grid, params)


def test_entropy_rejects_foreign_parameters(small_quad):
    grid = DistributionGrid.from_quadrature(ModelParams(delta=3.0), small_quad)
    with pytest.raises(UsageError):
        entropy_h(grid, ModelParams())
