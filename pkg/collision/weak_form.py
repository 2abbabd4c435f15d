"""
Weak-Form Collision Sampling

Symmetrized weak form of the collision operator for F = M·h:

    ∫ Q(Mh, Mh) ψ dv dI = −(C Z / 4) E[Φ^{1−α/2} (h′h′* − hh*)(ψ′ + ψ′* − ψ − ψ*)]

with (v, I), (v*, I*) drawn from M and (ω, R, r) from the normalized
collision measure. Every sample annihilates the collision invariants, so
mass, momentum and energy are conserved to rounding, and the quadratic
form's linearization at h = 1 is exactly symmetric and nonnegative.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Protocol, Sequence, Tuple

import numpy as np

from collision.operator import post_collision_arrays
from collision.sampling import draw_collision_parameters, draw_maxwellian_states, sample_blocks
from gas_model.params import ModelParams

logger = logging.getLogger(__name__)

WEAK_FORM_STREAM = 11


class PolynomialBasis(Protocol):
    """Anything that evaluates a family of polynomials P_j(v, I)"""

    size: int

    def evaluate(self, v: np.ndarray, i: np.ndarray) -> np.ndarray:
        ...


@dataclass(frozen=True)
class WeakFormSamples:
    """Pre- and post-collision sample states with their kinetic factors"""

    v: np.ndarray
    i: np.ndarray
    v_star: np.ndarray
    i_star: np.ndarray
    v_post: np.ndarray
    i_post: np.ndarray
    v_star_post: np.ndarray
    i_star_post: np.ndarray
    kinetic: np.ndarray
    prefactor: float

    @property
    def size(self) -> int:
        return len(self.i)

    def chunks(self, chunk: int) -> Iterator[slice]:
        for start in range(0, self.size, chunk):
            yield slice(start, min(start + chunk, self.size))


def draw_weak_form_samples(params: ModelParams, n_samples: int, seed: int, block: int = 4096,
                           stream_key: Tuple[int, ...] = (WEAK_FORM_STREAM,)) -> WeakFormSamples:
    """
    Draw the sample set of the symmetrized weak form

    Args:
        params: Model parameters
        n_samples: Number of collisions
        seed: Base seed
        block: Samples per RNG block
        stream_key: Key path of the stream (distinct per time step in relaxation)

    Returns:
        WeakFormSamples
    """
    parts = []
    for rng, count in sample_blocks(seed, stream_key, n_samples, block):
        v, i = draw_maxwellian_states(rng, count, params)
        v_star, i_star = draw_maxwellian_states(rng, count, params)
        omega, r_frac, r_split = draw_collision_parameters(rng, count, params)
        parts.append((v, i, v_star, i_star, omega, r_frac, r_split))
    v, i, v_star, i_star, omega, r_frac, r_split = [np.concatenate(column) for column in zip(*parts)]
    v_p, i_p, v_sp, i_sp, phi = post_collision_arrays(v, i, v_star, i_star, omega, r_frac, r_split)
    logger.debug(f"Drew {len(i)} weak-form samples on stream {stream_key}")
    return WeakFormSamples(
        v=v, i=i, v_star=v_star, i_star=i_star,
        v_post=v_p, i_post=i_p, v_star_post=v_sp, i_star_post=i_sp,
        kinetic=phi ** params.kinetic_exponent,
        prefactor=params.collision_constant / 4,
    )


def _basis_at_states(basis: PolynomialBasis, samples: WeakFormSamples, part: slice):
    return (
        basis.evaluate(samples.v[part], samples.i[part]),
        basis.evaluate(samples.v_star[part], samples.i_star[part]),
        basis.evaluate(samples.v_post[part], samples.i_post[part]),
        basis.evaluate(samples.v_star_post[part], samples.i_star_post[part]),
    )


def linearized_form_matrix(basis: PolynomialBasis, samples: WeakFormSamples, chunk: int = 2048) -> np.ndarray:
    """
    ⟨e_i, L e_j⟩ = (C Z / 4) E[Φ^{1−α/2} ΔP_i ΔP_j] for e_j = P_j √M

    Returns:
        np.ndarray: symmetric (size, size) matrix
    """
    matrix = np.zeros((basis.size, basis.size))
    for part in samples.chunks(chunk):
        p0, p1, p2, p3 = _basis_at_states(basis, samples, part)
        delta = p2 + p3 - p0 - p1
        matrix += (delta * samples.kinetic[part]) @ delta.T
    matrix *= samples.prefactor / samples.size
    return 0.5 * (matrix + matrix.T)


def linearized_form_errors(basis: PolynomialBasis, samples: WeakFormSamples,
                            entries: Sequence[Tuple[int, int]], chunk: int = 2048) -> np.ndarray:
    """Monte Carlo standard errors of selected entries of linearized_form_matrix"""
    rows = np.array([i for i, _ in entries], dtype=int)
    cols = np.array([j for _, j in entries], dtype=int)
    first = np.zeros(len(rows))
    second = np.zeros(len(rows))
    for part in samples.chunks(chunk):
        p0, p1, p2, p3 = _basis_at_states(basis, samples, part)
        delta = p2 + p3 - p0 - p1
        per_sample = samples.kinetic[part] * delta[rows] * delta[cols]
        first += per_sample.sum(axis=1)
        second += (per_sample ** 2).sum(axis=1)
    n = samples.size
    mean = first / n
    variance = np.maximum(second / n - mean ** 2, 0.0) * n / max(n - 1, 1)
    return samples.prefactor * np.sqrt(variance / n)


@dataclass(frozen=True)
class WeakFormProjection:
    """Projections ∫ Q(Mh, Mh) P_i and the standard error along a direction"""

    values: np.ndarray
    direction_error: Optional[np.ndarray] = None


def collision_coefficients(coefficients: np.ndarray, basis: PolynomialBasis, samples: WeakFormSamples,
                           direction: Optional[np.ndarray] = None, chunk: int = 2048) -> WeakFormProjection:
    """
    Galerkin projection of the quadratic collision operator

    Args:
        coefficients: Expansion coefficients of h, shape (size,) or (m, size)
        basis: Polynomial basis P_j
        samples: Weak-form sample set
        direction: Optional weights g (same shape as coefficients); the
            standard error of Σ_i g_i ∫Q P_i is reported for it
        chunk: Samples processed at once

    Returns:
        WeakFormProjection: values with the shape of coefficients
    """
    coeffs = np.atleast_2d(np.asarray(coefficients, dtype=float))
    total = np.zeros_like(coeffs)
    track = direction is not None
    if track:
        direction = np.atleast_2d(np.asarray(direction, dtype=float))
        first = np.zeros(coeffs.shape[0])
        second = np.zeros(coeffs.shape[0])

    for part in samples.chunks(chunk):
        p0, p1, p2, p3 = _basis_at_states(basis, samples, part)
        delta = p2 + p3 - p0 - p1
        h0, h1, h2, h3 = coeffs @ p0, coeffs @ p1, coeffs @ p2, coeffs @ p3
        defect = samples.kinetic[part] * (h2 * h3 - h0 * h1)
        total += defect @ delta.T
        if track:
            per_sample = defect * (direction @ delta)
            first += per_sample.sum(axis=1)
            second += (per_sample ** 2).sum(axis=1)

    n = samples.size
    values = -samples.prefactor * total / n
    error = None
    if track:
        mean = first / n
        variance = np.maximum(second / n - mean ** 2, 0.0) * n / max(n - 1, 1)
        error = samples.prefactor * np.sqrt(variance / n)
    if np.ndim(coefficients) == 1:
        values = values[0]
        error = None if error is None else error[0]
    return WeakFormProjection(values=values, direction_error=error)

