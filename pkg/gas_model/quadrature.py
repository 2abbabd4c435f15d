"""
Quadrature Engine

QuadratureSpec collects every node count, truncation radius, Monte Carlo
sample count and seed. The Gauss rules below are normalized so that their
weights integrate against probability measures (standard normal, Gamma),
matching the normalized-measure convention of the moment table.
"""

import math
from dataclasses import asdict, dataclass, replace
from functools import lru_cache
from typing import Any, Dict, NamedTuple, Tuple

import numpy as np
from numpy.polynomial import hermite_e, legendre
from scipy import special

from gas_model.params import ModelParams
from utils.errors import ConfigurationError


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Numerical resolution of every integral in the package

    Args:
        n_hermite: Gauss-Hermite nodes per velocity axis (phase grids)
        n_laguerre: Gauss-Laguerre nodes in I (phase grids, ν's I* integral)
        n_radial: Gauss-Legendre nodes of ν's radial integral
        radial_window: Half width of the radial windows around Gaussian centres
        n_energy: Generalized Laguerre nodes in I′ (k₂)
        n_jacobi: Gauss-Jacobi nodes in ζ (k₂)
        n_eta: Gauss-Legendre nodes in |η| (k₂)
        n_outer_radial: Radial nodes in |v − v*| (K and k_w integrals)
        n_outer_polar: Polar nodes of the spherical (v*) grid
        n_outer_azimuth: Azimuthal nodes of the spherical (v*) grid
        n_outer_energy: Laguerre nodes in I* of the outer integrals
        outer_radius: Truncation of |v − v*| in the outer integrals
        r_min: Radius of the ball around v* = v excluded from k₂ integrals
        v_radius: Velocity truncation radius R_v of phase grids
        mc_samples: Monte Carlo samples per estimate
        mc_block: Samples per RNG block (streams are split by block index)
        seed: Base seed of every Monte Carlo stream
        time_panels: Composite Gauss-Legendre panels per Picard horizon
        time_nodes: Gauss-Legendre nodes per time panel
    """

    n_hermite: int = 8
    n_laguerre: int = 8
    n_radial: int = 48
    radial_window: float = 10.0
    n_energy: int = 16
    n_jacobi: int = 16
    n_eta: int = 32
    n_outer_radial: int = 24
    n_outer_polar: int = 12
    n_outer_azimuth: int = 8
    n_outer_energy: int = 12
    outer_radius: float = 12.0
    r_min: float = 1e-3
    v_radius: float = 8.0
    mc_samples: int = 100_000
    mc_block: int = 4096
    seed: int = 20240601
    time_panels: int = 8
    time_nodes: int = 4

    def __post_init__(self):
        counts = ("n_hermite", "n_laguerre", "n_radial", "n_energy", "n_jacobi", "n_eta",
                  "n_outer_radial", "n_outer_polar", "n_outer_azimuth", "n_outer_energy",
                  "mc_samples", "mc_block", "time_panels", "time_nodes")
        for name in counts:
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigurationError(f"quadrature.{name} must be a positive integer, got {value!r}")
        for name in ("radial_window", "outer_radius", "r_min", "v_radius"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                raise ConfigurationError(f"quadrature.{name} must be a positive number, got {value!r}")
        if self.r_min >= self.outer_radius:
            raise ConfigurationError("quadrature.r_min must be smaller than quadrature.outer_radius")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError(f"quadrature.seed must be a 64-bit unsigned integer, got {self.seed!r}")

    def refined(self, factor: int = 2) -> "QuadratureSpec":
        """Same spec with every deterministic node count multiplied by factor"""
        return replace(
            self,
            n_radial=self.n_radial * factor,
            n_energy=self.n_energy * factor,
            n_jacobi=self.n_jacobi * factor,
            n_eta=self.n_eta * factor,
            n_outer_radial=self.n_outer_radial * factor,
            n_outer_polar=self.n_outer_polar * factor,
            n_outer_azimuth=self.n_outer_azimuth * factor,
            n_outer_energy=self.n_outer_energy * factor,
        )

    def with_seed(self, seed: int) -> "QuadratureSpec":
        return replace(self, seed=seed)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class PhaseRule(NamedTuple):
    """Tensor rule for ∫ g M dv dI: velocities (N, 3), energies (N,), weights (N,) summing to 1"""

    v: np.ndarray
    i: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=64)
def _hermite_normal(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = hermite_e.hermegauss(n)
    weights = weights / math.sqrt(2 * math.pi)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_hermite_normal(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss rule for the standard normal density"""
    return _hermite_normal(int(n))


@lru_cache(maxsize=128)
def _laguerre_gamma(n: int, shape: float) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = special.roots_genlaguerre(n, shape - 1)
    weights = weights / special.gamma(shape)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_laguerre_gamma(n: int, shape: float) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss rule for the Gamma(shape, 1) density x^{shape−1} e^{−x} / Γ(shape)"""
    return _laguerre_gamma(int(n), float(shape))


@lru_cache(maxsize=128)
def _laguerre_raw(n: int, power: float) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = special.roots_genlaguerre(n, power)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_laguerre_raw(n: int, power: float) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss rule for the unnormalized weight x^{power} e^{−x} on (0, ∞)"""
    return _laguerre_raw(int(n), float(power))


@lru_cache(maxsize=64)
def _legendre_reference(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(n: int, lo, hi) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Legendre rule on [lo, hi]; lo and hi may be arrays, giving
    rules of shape (*lo.shape, n)
    """
    x, w = _legendre_reference(int(n))
    lo = np.asarray(lo, dtype=float)[..., None]
    hi = np.asarray(hi, dtype=float)[..., None]
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


@lru_cache(maxsize=128)
def _jacobi_reference(n: int, power: float) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = special.roots_jacobi(n, 0.0, power)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_jacobi_left(n: int, power: float, lo, hi) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rule for ∫_lo^hi (t − lo)^power g(t) dt (endpoint singularity carried by
    the weights); lo and hi may be arrays
    """
    x, w = _jacobi_reference(int(n), float(power))
    lo = np.asarray(lo, dtype=float)[..., None]
    hi = np.asarray(hi, dtype=float)[..., None]
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), w * half ** (power + 1.0)


def velocity_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Hermite rule for the 3D standard normal: nodes (n³, 3), weights (n³,)"""
    x, w = gauss_hermite_normal(n)
    grid = np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1).reshape(-1, 3)
    weights = (w[:, None, None] * w[None, :, None] * w[None, None, :]).reshape(-1)
    return grid, weights


def phase_rule(n_v: int, n_i: int, params: ModelParams) -> PhaseRule:
    """
    Tensor rule for ∫ g(v, I) M(v, I) dv dI

    Args:
        n_v: Gauss-Hermite nodes per velocity axis
        n_i: Gauss-Laguerre nodes in I (Laguerre parameter δ/2 − 1)
        params: Model parameters

    Returns:
        PhaseRule: Nodes and weights; velocity index varies slowest
    """
    v_nodes, v_weights = velocity_rule(n_v)
    i_nodes, i_weights = gauss_laguerre_gamma(n_i, params.delta / 2)
    v = np.repeat(v_nodes, len(i_nodes), axis=0)
    i = np.tile(i_nodes, len(v_nodes))
    weights = np.outer(v_weights, i_weights).reshape(-1)
    return PhaseRule(v=v, i=i, weights=weights)


def sphere_directions(n_polar: int, n_azimuth: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Product rule on S²: Gauss-Legendre in cos θ, uniform azimuth

    Returns:
        Tuple of unit vectors (n_polar·n_azimuth, 3) and weights summing to 4π
    """
    cos_t, w_t = gauss_legendre(n_polar, -1.0, 1.0)
    phi = (np.arange(n_azimuth) + 0.5) * (2 * math.pi / n_azimuth)
    sin_t = np.sqrt(np.clip(1.0 - cos_t ** 2, 0.0, None))
    dirs = np.stack([
        np.outer(sin_t, np.cos(phi)),
        np.outer(sin_t, np.sin(phi)),
        np.outer(cos_t, np.ones_like(phi)),
    ], axis=-1).reshape(-1, 3)
    weights = np.outer(w_t, np.full(n_azimuth, 2 * math.pi / n_azimuth)).reshape(-1)
    return dirs, weights
