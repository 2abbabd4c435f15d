"""
Collision Frequency

ν(v, I) = C Z ∫ Φ^{1−α/2} M(v*, I*) dv* dI*, reduced to a radial integral in
|v − v*| (the angular integral is done in closed form) and a Gamma-weighted
integral in I*. The inner (I′, I′*) integral of the defining formula is a
Dirichlet integral and is folded into the constant Z.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict

import numpy as np

from collision.sampling import sample_blocks
from gas_model.params import ModelParams, PhasePoint
from gas_model.quadrature import QuadratureSpec, gauss_laguerre_gamma, gauss_legendre

logger = logging.getLogger(__name__)

NU_STREAM = 21

_SMALL_PRODUCT = 1e-8


@dataclass(frozen=True)
class MonteCarloValue:
    """Sample mean and its standard error"""

    value: float
    std_error: float
    n_samples: int

    def agrees_with(self, reference: float, n_sigma: float = 3.0) -> bool:
        return abs(self.value - reference) <= n_sigma * self.std_error + 1e-12 * abs(reference)

    def to_dict(self) -> Dict[str, float]:
        return {"value": self.value, "std_error": self.std_error, "n_samples": self.n_samples}


def monte_carlo_value(samples: np.ndarray) -> MonteCarloValue:
    n = len(samples)
    error = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else float("inf")
    return MonteCarloValue(value=float(np.mean(samples)), std_error=error, n_samples=n)


def shell_average(speed: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """
    ∫_{S²} e^{−|v − ρω|²/2} dω for |v| = speed

    Equals (2π/(sρ)) e^{−(s−ρ)²/2}(1 − e^{−2sρ}), with the limit
    4π e^{−(s²+ρ²)/2} as sρ → 0.
    """
    product = speed * rho
    safe = np.where(product > _SMALL_PRODUCT, product, 1.0)
    general = 2 * math.pi / safe * np.exp(-0.5 * (speed - rho) ** 2) * -np.expm1(-2 * safe)
    limit = 4 * math.pi * np.exp(-0.5 * (speed ** 2 + rho ** 2))
    return np.where(product > _SMALL_PRODUCT, general, limit)


def nu_values(v: np.ndarray, i: np.ndarray, params: ModelParams, quad: QuadratureSpec) -> np.ndarray:
    """
    Vectorised ν over velocities (N, 3) and energies (N,)

    Args:
        v: Velocities
        i: Internal energies
        params: Model parameters
        quad: Quadrature specification (n_radial, radial_window, n_laguerre)

    Returns:
        np.ndarray: ν at every point, shape (N,)
    """
    v = np.atleast_2d(np.asarray(v, dtype=float))
    i = np.atleast_1d(np.asarray(i, dtype=float))
    speed = np.linalg.norm(v, axis=1)
    rho, w_rho = gauss_legendre(quad.n_radial, np.maximum(0.0, speed - quad.radial_window),
                                speed + quad.radial_window)
    radial = (2 * math.pi) ** -1.5 * w_rho * rho ** 2 * shell_average(speed[:, None], rho)

    kin = params.kinetic_exponent
    if kin == 0:
        return params.collision_constant * radial.sum(axis=1)

    i_star, w_star = gauss_laguerre_gamma(quad.n_laguerre, params.delta / 2)
    phi = 0.25 * rho[:, :, None] ** 2 + i[:, None, None] + i_star[None, None, :]
    energy_avg = (phi ** kin) @ w_star
    return params.collision_constant * np.sum(radial * energy_avg, axis=1)


def nu(p: PhasePoint, params: ModelParams, quad: QuadratureSpec) -> float:
    """
    Collision frequency ν(v, I)

    Args:
        p: Phase point
        params: Model parameters
        quad: Quadrature specification

    Returns:
        float: ν(v, I) > 0
    """
    return float(nu_values(p.velocity[None, :], np.asarray([p.i]), params, quad)[0])


def nu_monte_carlo(p: PhasePoint, params: ModelParams, quad: QuadratureSpec, stream_index: int = 0) -> MonteCarloValue:
    """
    Brute-force estimate of the unreduced frequency integral

    ν = 4πC ∫ M* (I′I′*)^{δ/2−1} √(Φ − I′ − I′*) Φ^{−δ−(α−1)/2} χ{I′+I′* < Φ}

    over (v*, I*, I′, I′*), with (v*, I*) drawn from M and I′ = Φx,
    I′* = Φy for (x, y) uniform on the unit square.

    Returns:
        MonteCarloValue
    """
    a = params.laguerre_parameter
    power = params.delta + (params.alpha - 1) / 2
    chunks = []
    for rng, count in sample_blocks(quad.seed, (NU_STREAM, stream_index), quad.mc_samples, quad.mc_block):
        v_star = rng.standard_normal((count, 3))
        i_star = rng.gamma(params.delta / 2, 1.0, count)
        x = rng.random(count)
        y = rng.random(count)
        u = p.velocity - v_star
        phi = 0.25 * np.sum(u * u, axis=1) + p.i + i_star
        inside = x + y < 1
        slack = np.sqrt(np.where(inside, 1.0 - x - y, 0.0) * phi)
        energies = (phi * phi * x * y) ** a if a != 0 else 1.0
        chunks.append(4 * math.pi * params.c_sigma * phi ** 2 * energies * slack * phi ** -power * inside)
    return monte_carlo_value(np.concatenate(chunks))


def nu_bound_ratio(p: PhasePoint, params: ModelParams, quad: QuadratureSpec) -> float:
    """ν(v, I) / (1 + |v| + √I)^{2−α}"""
    return nu(p, params, quad) / (1 + p.speed + math.sqrt(p.i)) ** (2 - params.alpha)


def nu_bound_ratios(v: np.ndarray, i: np.ndarray, params: ModelParams, quad: QuadratureSpec) -> np.ndarray:
    """Vectorised nu_bound_ratio"""
    v = np.atleast_2d(np.asarray(v, dtype=float))
    i = np.atleast_1d(np.asarray(i, dtype=float))
    scale = (1 + np.linalg.norm(v, axis=1) + np.sqrt(i)) ** (2 - params.alpha)
    return nu_values(v, i, params, quad) / scale
