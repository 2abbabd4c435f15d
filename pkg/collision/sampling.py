"""
Monte Carlo Streams

Random streams keyed by (seed, stream, index, block) so any partition of the
work reproduces the serial result, plus the importance-sampling draws of the
collision measure.
"""

import math
from enum import Enum
from typing import Iterator, Tuple

import numpy as np
from scipy import special

from gas_model.params import ModelParams


class PartnerProposal(str, Enum):
    """Proposal density for the collision partner (v*, I*)"""

    MAXWELLIAN = "maxwellian"
    ROOT_MAXWELLIAN = "root_maxwellian"


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the given key path"""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))


def sample_blocks(seed: int, key: Tuple[int, ...], n_samples: int, block: int) -> Iterator[Tuple[np.random.Generator, int]]:
    """Yield (generator, count) per block of at most `block` samples"""
    n_blocks = (n_samples + block - 1) // block
    for b in range(n_blocks):
        count = min(block, n_samples - b * block)
        yield stream(seed, *key, b), count


def uniform_sphere(rng: np.random.Generator, n: int) -> np.ndarray:
    """n unit vectors uniform on S²"""
    x = rng.standard_normal((n, 3))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def draw_collision_parameters(rng: np.random.Generator, n: int,
                              params: ModelParams) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    ω uniform on S², R ~ Beta(3/2, δ), r ~ Beta(δ/2, δ/2)

    These are the normalized densities of R^{1/2}(1−R)^{δ−1} and
    (r(1−r))^{δ/2−1}; the measure's total mass is params.measure_mass.
    """
    omega = uniform_sphere(rng, n)
    r_frac = rng.beta(1.5, params.delta, n)
    r_split = rng.beta(params.delta / 2, params.delta / 2, n)
    return omega, r_frac, r_split


def draw_maxwellian_states(rng: np.random.Generator, n: int, params: ModelParams) -> Tuple[np.ndarray, np.ndarray]:
    """(v, I) distributed as M"""
    v = rng.standard_normal((n, 3))
    i = rng.gamma(params.delta / 2, 1.0, n)
    return v, i


def draw_partners(rng: np.random.Generator, n: int, params: ModelParams,
                  proposal: PartnerProposal) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Partner states and their log proposal density

    Returns:
        Tuple of v* (n, 3), I* (n,), log q(v*, I*) (n,)
    """
    a = params.laguerre_parameter
    if proposal is PartnerProposal.MAXWELLIAN:
        v, i = draw_maxwellian_states(rng, n, params)
        log_q = (-1.5 * math.log(2 * math.pi) - 0.5 * np.sum(v * v, axis=1)
                 - i - special.gammaln(params.delta / 2))
        if a != 0:
            log_q = log_q + a * np.log(i)
        return v, i, log_q

    # √M-shaped proposal: v ~ N(0, 2), I ~ Gamma(a/2 + 1, scale 2)
    shape = a / 2 + 1
    v = math.sqrt(2.0) * rng.standard_normal((n, 3))
    i = rng.gamma(shape, 2.0, n)
    log_q = (-1.5 * math.log(4 * math.pi) - 0.25 * np.sum(v * v, axis=1)
             - 0.5 * i - special.gammaln(shape) - shape * math.log(2.0))
    if a != 0:
        log_q = log_q + (a / 2) * np.log(i)
    return v, i, log_q


def root_maxwellian_mass(params: ModelParams) -> float:
    """∫ √M dv dI"""
    a = params.laguerre_parameter
    shape = a / 2 + 1
    return math.exp(0.5 * params.log_maxwellian_constant + 1.5 * math.log(4 * math.pi)
                    + special.gammaln(shape) + shape * math.log(2.0))
