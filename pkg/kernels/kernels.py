"""
Integral Kernels of K

K f(v, I) = ∫ k(v, v*, I, I*) f(v*, I*) dv* dI* with k = k₂ − k₁.

k₁ (the partner part of the loss term) has the closed form
C Z Φ^{1−α/2} √(M M*). k₂ (the gain part) is evaluated in the frame
u = v − v*, n = u/|u|, where the post-collision velocity is resolved as
v′ − v* = η − ζn. Energy balance pins I′* = |u|(ζ − ζ_min) with
ζ_min = (I* − I − I′)/|u|, and the remaining integral over (I′, ζ, |η|)
is done by Laguerre, Jacobi and Legendre rules (the angle of η is
integrated with the scaled Bessel function i0e).
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import special

from collision.sampling import sample_blocks
from gas_model.equilibrium import log_maxwellian_values, weight_values
from gas_model.params import ModelParams, PhasePoint
from gas_model.quadrature import (
    QuadratureSpec,
    gauss_jacobi_left,
    gauss_laguerre_raw,
    gauss_legendre,
    sphere_directions,
)
from kernels.frequency import MonteCarloValue, monte_carlo_value
from utils.errors import SingularInputError, UsageError
from utils.logger import log_performance

logger = logging.getLogger(__name__)

K1_STREAM = 22
K2_STREAM = 23

KW_EPS_MAX = 1 / 64
KW_M_MAX = 1 / 8

_STAR_CHUNK = 128
_SEPARATION_FLOOR = 1e-12


@dataclass(frozen=True)
class KernelPoint:
    """Pair of states at which a kernel is evaluated"""

    p: PhasePoint
    p_star: PhasePoint

    @property
    def separation(self) -> float:
        return float(np.linalg.norm(self.p.velocity - self.p_star.velocity))

    def swapped(self) -> "KernelPoint":
        return KernelPoint(p=self.p_star, p_star=self.p)


class KernelIntegral(NamedTuple):
    """Outer integral of a kernel with the estimate of the excluded ball |v* − v| < r_min"""

    value: float
    ball_error: float


def _interior(kp: KernelPoint):
    if not (kp.p.is_interior and kp.p_star.is_interior):
        raise UsageError(f"kernels require I, I* > 0, got I={kp.p.i}, I*={kp.p_star.i}")


# k1

def k1_values(v: np.ndarray, i: np.ndarray, v_star: np.ndarray, i_star: np.ndarray,
              params: ModelParams) -> np.ndarray:
    """Vectorised k₁ = C Z Φ^{1−α/2} √(M M*)"""
    u = np.asarray(v, dtype=float) - np.asarray(v_star, dtype=float)
    phi = 0.25 * np.sum(u * u, axis=-1) + i + i_star
    log_root = 0.5 * (log_maxwellian_values(v, i, params) + log_maxwellian_values(v_star, i_star, params))
    return params.collision_constant * phi ** params.kinetic_exponent * np.exp(log_root)


def k1(kp: KernelPoint, params: ModelParams, quad: QuadratureSpec) -> float:
    """
    Loss-part kernel k₁(v, v*, I, I*)

    The (I′, I′*) integral of the defining formula is a Dirichlet integral
    in closed form, so quad is not used; it is accepted for a uniform
    kernel signature.
    """
    _interior(kp)
    return float(k1_values(kp.p.velocity, kp.p.i, kp.p_star.velocity, kp.p_star.i, params))


def k1_bound_envelope(kp: KernelPoint, params: ModelParams) -> float:
    """(I*)^{δ/4−1} e^{−|v|²/16 − |v*|²/16 − I/8 − I*/8}"""
    _interior(kp)
    return float(k1_envelope_values(kp.p.velocity, kp.p.i, kp.p_star.velocity, kp.p_star.i, params))


def k1_envelope_values(v: np.ndarray, i: np.ndarray, v_star: np.ndarray, i_star: np.ndarray,
                       params: ModelParams) -> np.ndarray:
    """Pointwise upper envelope of k₁ (up to a constant)"""
    v = np.asarray(v, dtype=float)
    v_star = np.asarray(v_star, dtype=float)
    exponent = (-np.sum(v * v, axis=-1) / 16 - np.sum(v_star * v_star, axis=-1) / 16
                - np.asarray(i) / 8 - np.asarray(i_star) / 8)
    return np.asarray(i_star, dtype=float) ** (params.delta / 4 - 1) * np.exp(exponent)


def k1_monte_carlo(kp: KernelPoint, params: ModelParams, quad: QuadratureSpec,
                   stream_index: int = 0) -> MonteCarloValue:
    """
    Brute-force estimate of the defining k₁ integral over the primed energies

    k₁ = 4πC √(M M*) ∫ (I′I′*)^{δ/2−1} √(Φ − I′ − I′*) Φ^{−δ−(α−1)/2} χ{I′+I′* < Φ} dI′ dI′*
    """
    _interior(kp)
    a = params.laguerre_parameter
    power = params.delta + (params.alpha - 1) / 2
    u = kp.p.velocity - kp.p_star.velocity
    phi = float(u @ u / 4 + kp.p.i + kp.p_star.i)
    root = math.exp(0.5 * (float(log_maxwellian_values(kp.p.velocity, kp.p.i, params))
                           + float(log_maxwellian_values(kp.p_star.velocity, kp.p_star.i, params))))
    chunks = []
    for rng, count in sample_blocks(quad.seed, (K1_STREAM, stream_index), quad.mc_samples, quad.mc_block):
        x = rng.random(count)
        y = rng.random(count)
        inside = x + y < 1
        slack = np.sqrt(np.where(inside, 1.0 - x - y, 0.0) * phi)
        energies = (phi * phi * x * y) ** a if a != 0 else 1.0
        chunks.append(4 * math.pi * params.c_sigma * root * phi ** 2 * energies * slack * phi ** -power * inside)
    return monte_carlo_value(np.concatenate(chunks))


# k2

def _frame(v: np.ndarray, v_star: np.ndarray):
    """|u|, mid-point coordinate m = (v + v*)·n/2 and the transverse speed b"""
    u = v - v_star
    separation = np.linalg.norm(u, axis=-1)
    if np.any(separation < _SEPARATION_FLOOR):
        raise SingularInputError("k2 is singular at v = v*", {"min_separation": float(separation.min())})
    n = u / separation[..., None]
    along = np.sum(v * n, axis=-1)
    mid = 0.5 * (along + np.sum(v_star * n, axis=-1))
    transverse = np.linalg.norm(v - along[..., None] * n, axis=-1)
    return separation, mid, transverse


def _transverse_integral(A: np.ndarray, transverse: np.ndarray, params: ModelParams, quad: QuadratureSpec):
    """
    H(A) = ∫_{R²} e^{−|η + V⊥|²/2} (A + |η|²/4)^{−p} dη, p = δ + (α−1)/2

    A has shape (S, ...) and transverse shape (S,).
    """
    p = params.delta + (params.alpha - 1) / 2
    lo = np.maximum(0.0, transverse - quad.radial_window)
    rho, w_rho = gauss_legendre(quad.n_eta, lo, transverse + quad.radial_window)
    b = transverse[:, None]
    radial = 2 * math.pi * w_rho * rho * special.i0e(b * rho) * np.exp(-0.5 * (b - rho) ** 2)
    extra = (1,) * (A.ndim - 1)
    rho_b = rho.reshape(rho.shape[:1] + extra + rho.shape[1:])
    radial_b = radial.reshape(radial.shape[:1] + extra + radial.shape[1:])
    return np.sum(radial_b * (A[..., None] + 0.25 * rho_b ** 2) ** -p, axis=-1)


def k2_values(v: np.ndarray, i: float, v_star: np.ndarray, i_star: np.ndarray,
              params: ModelParams, quad: QuadratureSpec) -> np.ndarray:
    """
    Vectorised k₂ for one (v, I) against partner states (S, 3), (S,)

    Args:
        v: Velocity (3,)
        i: Internal energy I > 0
        v_star: Partner velocities, none equal to v
        i_star: Partner energies (> 0)
        params: Model parameters
        quad: Quadrature specification (n_energy, n_jacobi, n_eta, radial_window)

    Returns:
        np.ndarray: k₂ values, shape (S,)
    """
    v = np.asarray(v, dtype=float)
    v_star = np.atleast_2d(np.asarray(v_star, dtype=float))
    i_star = np.atleast_1d(np.asarray(i_star, dtype=float))
    result = np.empty(len(i_star))
    for start in range(0, len(i_star), _STAR_CHUNK):
        part = slice(start, start + _STAR_CHUNK)
        result[part] = _k2_chunk(v, float(i), v_star[part], i_star[part], params, quad)
    return result


def _k2_chunk(v, i, v_star, i_star, params: ModelParams, quad: QuadratureSpec) -> np.ndarray:
    a = params.laguerre_parameter
    window = quad.radial_window
    separation, mid, transverse = _frame(v[None, :], v_star)

    # I′ = 2x against x^a e^{−x}
    x, w_x = gauss_laguerre_raw(quad.n_energy, a)
    i_prime = 2 * x
    w_prime = w_x * 2 ** (a + 1)

    sep = separation[:, None]
    zeta_min = (i_star[:, None] - i - i_prime[None, :]) / sep
    lo = np.maximum(zeta_min, mid[:, None] - window)
    hi = np.minimum(mid[:, None] + window, zeta_min + window ** 2 / sep)
    active = hi > lo
    hi = np.where(active, hi, lo + 1.0)

    from_edge = lo <= zeta_min
    z_j, w_j = gauss_jacobi_left(quad.n_jacobi, a, lo, hi)
    z_l, w_l = gauss_legendre(quad.n_jacobi, lo, hi)
    zeta = np.where(from_edge[..., None], z_j, z_l)
    i_star_prime = np.maximum(sep[..., None] * (zeta - zeta_min[..., None]), 0.0)
    if a != 0:
        energy_factor = np.where(from_edge[..., None], w_j * sep[..., None] ** a, w_l * i_star_prime ** a)
    else:
        energy_factor = np.where(from_edge[..., None], w_j, w_l)
    energy_factor = energy_factor * active[..., None]

    A = 0.25 * (sep[..., None] + zeta) ** 2 + i + i_prime[None, :, None]
    H = _transverse_integral(A, transverse, params, quad)
    integrand = energy_factor * np.exp(-0.5 * i_star_prime - 0.5 * (zeta - mid[:, None, None]) ** 2) * H
    inner = np.sum(integrand, axis=-1) @ w_prime

    log_pref = (math.log(4 * params.c_sigma) + params.log_maxwellian_constant
                - separation ** 2 / 8)
    if a != 0:
        log_pref = log_pref + 0.5 * a * (math.log(i) + np.log(i_star))
    return np.exp(log_pref) * inner


def k2(kp: KernelPoint, params: ModelParams, quad: QuadratureSpec) -> float:
    """
    Gain-part kernel k₂(v, v*, I, I*)

    Raises:
        SingularInputError: v = v*
    """
    _interior(kp)
    return float(k2_values(kp.p.velocity, kp.p.i, kp.p_star.velocity[None, :],
                           np.asarray([kp.p_star.i]), params, quad)[0])


def k2_monte_carlo(kp: KernelPoint, params: ModelParams, quad: QuadratureSpec,
                   stream_index: int = 0) -> MonteCarloValue:
    """
    Brute-force estimate of the frame-resolved k₂ integral

    I′ ~ Gamma(δ/2, scale 2), ζ ~ N(m, 1) and η ~ N(−V⊥, 1) in the plane
    orthogonal to n; the energy-feasibility indicator χ{ζ > ζ_min} and
    Ψ^{−(δ+(α−1)/2)} are evaluated on every sample.
    """
    _interior(kp)
    a = params.laguerre_parameter
    p = params.delta + (params.alpha - 1) / 2
    separation, mid, transverse = (float(q[0]) for q in _frame(kp.p.velocity[None, :], kp.p_star.velocity[None, :]))
    i, i_star = kp.p.i, kp.p_star.i
    log_const = (math.log(4 * params.c_sigma) + params.log_maxwellian_constant
                 + 0.5 * a * (math.log(i) + math.log(i_star))
                 + special.gammaln(a + 1) + (a + 1) * math.log(2.0)
                 + 0.5 * math.log(2 * math.pi) + math.log(2 * math.pi)
                 - separation ** 2 / 8)
    chunks = []
    for rng, count in sample_blocks(quad.seed, (K2_STREAM, stream_index), quad.mc_samples, quad.mc_block):
        i_prime = rng.gamma(a + 1, 2.0, count)
        zeta = mid + rng.standard_normal(count)
        eta = rng.standard_normal((count, 2))
        eta[:, 0] -= transverse
        zeta_min = (i_star - i - i_prime) / separation
        feasible = zeta > zeta_min
        i_star_prime = np.where(feasible, separation * (zeta - zeta_min), 0.0)
        psi = 0.25 * (np.sum(eta * eta, axis=1) + (separation + zeta) ** 2) + i + i_prime
        energies = i_star_prime ** a if a != 0 else 1.0
        chunks.append(math.exp(log_const) * energies * np.exp(-0.5 * i_star_prime) * psi ** -p * feasible)
    return monte_carlo_value(np.concatenate(chunks))


def k_values(v: np.ndarray, i: float, v_star: np.ndarray, i_star: np.ndarray,
             params: ModelParams, quad: QuadratureSpec) -> np.ndarray:
    """k = k₂ − k₁ for one (v, I) against partner states"""
    return (k2_values(v, i, v_star, i_star, params, quad)
            - k1_values(v, i, v_star, i_star, params))


def kw(kp: KernelPoint, params: ModelParams, quad: QuadratureSpec) -> float:
    """Weighted kernel k_w = k · w(v, I)/w(v*, I*)"""
    _interior(kp)
    value = k2(kp, params, quad) - k1(kp, params, quad)
    ratio = (weight_values(kp.p.velocity, kp.p.i, params.beta)
             / weight_values(kp.p_star.velocity, kp.p_star.i, params.beta))
    return float(value * ratio)


# outer integrals over (v*, I*)

class OuterGrid(NamedTuple):
    """Spherical grid of partner states around v, with Lebesgue weights"""

    v_star: np.ndarray
    i_star: np.ndarray
    weights: np.ndarray
    shell_weights: np.ndarray
    separation: np.ndarray


def outer_grid(v: np.ndarray, params: ModelParams, quad: QuadratureSpec) -> OuterGrid:
    """
    Partner grid v* = v − ρω, ρ ∈ [r_min, outer_radius], with I* = 2x on the
    Laguerre rule of x^{(δ/2−1)/2} e^{−x}

    weights integrate g(v*, I*) dv* dI*; shell_weights carry only the
    angular and I* parts (integration over one radial shell).
    """
    a = params.laguerre_parameter
    rho, w_rho = gauss_legendre(quad.n_outer_radial, quad.r_min, quad.outer_radius)
    dirs, w_dirs = sphere_directions(quad.n_outer_polar, quad.n_outer_azimuth)
    x, w_x = gauss_laguerre_raw(quad.n_outer_energy, a / 2)
    i_star = 2 * x
    w_energy = 2 * w_x * np.exp(x)
    if a != 0:
        w_energy = w_energy * x ** (-a / 2)

    offsets = (rho[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
    n_space, n_energy = len(offsets), len(i_star)
    w_radial = np.repeat(w_rho * rho ** 2, len(w_dirs))
    w_shell = np.outer(np.tile(w_dirs, len(rho)), w_energy).reshape(-1)
    return OuterGrid(
        v_star=np.repeat(np.asarray(v, dtype=float) - offsets, n_energy, axis=0),
        i_star=np.tile(i_star, n_space),
        weights=np.repeat(w_radial, n_energy) * w_shell,
        shell_weights=w_shell,
        separation=np.repeat(np.repeat(rho, len(w_dirs)), n_energy),
    )


def ball_error_estimate(grid: OuterGrid, integrand: np.ndarray, quad: QuadratureSpec) -> float:
    """
    Bound of the excluded ball |v* − v| < r_min for an integrand behaving
    like C(ω, I*)/|u|: (r_min²/2) ∫ C dω dI*, with C read off the innermost shell
    """
    rho0 = grid.separation.min()
    innermost = grid.separation == rho0
    shell_integral = float(np.sum(np.abs(integrand[innermost]) * grid.shell_weights[innermost]))
    return 0.5 * quad.r_min ** 2 * rho0 * shell_integral


ScalarField = Callable[[np.ndarray, np.ndarray], np.ndarray]


def K_apply_estimate(f: ScalarField, p: PhasePoint, params: ModelParams, quad: QuadratureSpec,
                     weighted: bool = False) -> KernelIntegral:
    """
    (K f)(v, I), or (K_w f)(v, I) = w K(f/w) when weighted, with the
    estimate of the excluded ball

    Args:
        f: Callable of (v (S, 3), I (S,))
        p: Phase point (I > 0)
        params: Model parameters
        quad: Quadrature specification
        weighted: Apply the weighted operator K_w

    Returns:
        KernelIntegral
    """
    if not p.is_interior:
        raise UsageError(f"K requires I > 0, got I={p.i}")
    grid = outer_grid(p.velocity, params, quad)
    values = np.asarray(f(grid.v_star, grid.i_star), dtype=float)
    if weighted:
        values = values / weight_values(grid.v_star, grid.i_star, params.beta)
    integrand = k_values(p.velocity, p.i, grid.v_star, grid.i_star, params, quad) * values
    value = float(np.sum(integrand * grid.weights))
    ball = ball_error_estimate(grid, integrand, quad)
    if weighted:
        scale = float(weight_values(p.velocity, p.i, params.beta))
        value *= scale
        ball *= scale
    return KernelIntegral(value=value, ball_error=ball)


def K_apply(f: ScalarField, p: PhasePoint, weighted: bool, params: ModelParams, quad: QuadratureSpec) -> float:
    """
    Apply K = K₂ − K₁ (or K_w) at one phase point

    Args:
        f: Callable of (v (S, 3), I (S,))
        p: Phase point
        weighted: Apply K_w h = w K(h/w)
        params: Model parameters
        quad: Quadrature specification

    Returns:
        float: (K f)(v, I)
    """
    return K_apply_estimate(f, p, params, quad, weighted=weighted).value


@log_performance
def K_apply_sweep(f: ScalarField, points, params: ModelParams, quad: QuadratureSpec,
                  weighted: bool = False) -> np.ndarray:
    """K_apply over several phase points"""
    return np.array([K_apply(f, p, weighted, params, quad) for p in points])


def kw_weighted_integral(p: PhasePoint, eps: float, m: float, params: ModelParams, quad: QuadratureSpec) -> float:
    """
    ∫ |k_w(v, v*, I, I*)| e^{ε|v−v*|²} (1 + I*)^m dv* dI*

    Args:
        p: Phase point (I > 0)
        eps: Gaussian growth exponent in [0, 1/64]
        m: Energy growth exponent in [0, 1/8]
        params: Model parameters
        quad: Quadrature specification

    Returns:
        float: The integral (nonnegative)
    """
    if not 0 <= eps <= KW_EPS_MAX:
        raise UsageError(f"eps must lie in [0, 1/64], got {eps}")
    if not 0 <= m <= KW_M_MAX:
        raise UsageError(f"m must lie in [0, 1/8], got {m}")
    if not p.is_interior:
        raise UsageError(f"k_w requires I > 0, got I={p.i}")
    grid = outer_grid(p.velocity, params, quad)
    kernel = np.abs(k_values(p.velocity, p.i, grid.v_star, grid.i_star, params, quad))
    ratio = weight_values(p.velocity, p.i, params.beta) / weight_values(grid.v_star, grid.i_star, params.beta)
    growth = np.exp(eps * grid.separation ** 2) * (1 + grid.i_star) ** m
    return float(np.sum(kernel * ratio * growth * grid.weights))
