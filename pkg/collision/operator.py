"""
Collision Operator

Borgnakke-Larsen post-collision map, the cross section B = CΦ^{1−α/2}, and
Monte Carlo estimates of Q(F, G) and Γ(f, g) at phase points. Gain and loss
share one sample stream per point.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from collision.distributions import PhaseDistribution, ensure_distribution, ensure_phase_function
from collision.sampling import (
    PartnerProposal,
    draw_collision_parameters,
    draw_partners,
    root_maxwellian_mass,
    sample_blocks,
)
from gas_model.equilibrium import maxwellian_values
from gas_model.params import ModelParams, PhasePoint
from gas_model.quadrature import QuadratureSpec, phase_rule
from utils.errors import DomainError

logger = logging.getLogger(__name__)

# Stream identifiers keep independent estimates on disjoint random streams
Q_STREAM = 1
GAMMA_STREAM = 2
INVARIANT_STREAM = 3

_ROUNDING_FLOOR = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class CollisionPair:
    """Colliding states (v, I) and (v*, I*)"""

    p: PhasePoint
    p_star: PhasePoint


@dataclass(frozen=True)
class CollisionParams:
    """Collision parameters ω ∈ S², R ∈ [0, 1], r ∈ [0, 1]"""

    omega: Tuple[float, float, float]
    r_frac: float
    r_split: float

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float).reshape(-1)
        if omega.shape != (3,) or abs(np.linalg.norm(omega) - 1.0) > 1e-12:
            raise DomainError(f"omega must be a unit 3-vector, got {self.omega!r}")
        if not 0 <= self.r_frac <= 1 or not 0 <= self.r_split <= 1:
            raise DomainError(f"R and r must lie in [0, 1], got R={self.r_frac}, r={self.r_split}")
        object.__setattr__(self, "omega", tuple(float(c) for c in omega))


@dataclass(frozen=True)
class PostCollisionState:
    """Post-collision states (v′, I′) and (v′*, I′*)"""

    p_prime: PhasePoint
    p_star_prime: PhasePoint


@dataclass(frozen=True)
class CollisionEstimate:
    """Monte Carlo estimate of a collision integral at one phase point"""

    value: float
    std_error: float
    gain: float
    gain_error: float
    loss: float
    loss_error: float
    n_samples: int

    def tolerance(self, n_sigma: float = 3.0) -> float:
        """n_sigma standard errors plus a rounding floor relative to the loss term"""
        return n_sigma * self.std_error + _ROUNDING_FLOOR * abs(self.loss)

    def to_dict(self) -> Dict[str, float]:
        return {
            "value": self.value, "std_error": self.std_error,
            "gain": self.gain, "gain_error": self.gain_error,
            "loss": self.loss, "loss_error": self.loss_error,
            "n_samples": self.n_samples,
        }


def total_energy_phi(pair: CollisionPair) -> float:
    """Φ = |v − v*|²/4 + I + I*"""
    u = pair.p.velocity - pair.p_star.velocity
    return float(u @ u / 4 + pair.p.i + pair.p_star.i)


def cross_section_b(pair: CollisionPair, params: ModelParams) -> float:
    """B = C Φ^{1−α/2}"""
    return params.c_sigma * total_energy_phi(pair) ** params.kinetic_exponent


def post_collision_arrays(v: np.ndarray, i: np.ndarray, v_star: np.ndarray, i_star: np.ndarray,
                          omega: np.ndarray, r_frac: np.ndarray, r_split: np.ndarray):
    """
    Vectorised post-collision map

    V = (v+v*)/2, v′ = V + √(RΦ)ω, v′* = V − √(RΦ)ω,
    I′ = r(1−R)Φ, I′* = (1−r)(1−R)Φ

    Returns:
        Tuple (v′, I′, v′*, I′*, Φ)
    """
    u = v - v_star
    phi = 0.25 * np.sum(u * u, axis=-1) + i + i_star
    centre = 0.5 * (v + v_star)
    swing = np.sqrt(r_frac * phi)[..., None] * omega
    internal = (1.0 - r_frac) * phi
    return centre + swing, r_split * internal, centre - swing, (1.0 - r_split) * internal, phi


def post_collision(pair: CollisionPair, cp: CollisionParams) -> PostCollisionState:
    """
    Borgnakke-Larsen post-collision states

    Args:
        pair: Pre-collision states
        cp: Collision parameters (ω, R, r)

    Returns:
        PostCollisionState: momentum and energy conserving outgoing states
    """
    v_prime, i_prime, v_star_prime, i_star_prime, _ = post_collision_arrays(
        pair.p.velocity, np.asarray(pair.p.i), pair.p_star.velocity, np.asarray(pair.p_star.i),
        np.asarray(cp.omega), np.asarray(cp.r_frac), np.asarray(cp.r_split),
    )
    return PostCollisionState(
        p_prime=PhasePoint(v_prime, float(i_prime)),
        p_star_prime=PhasePoint(v_star_prime, float(i_star_prime)),
    )


def _draw(params: ModelParams, quad: QuadratureSpec, key: Tuple[int, ...], proposal: PartnerProposal):
    parts = []
    for rng, count in sample_blocks(quad.seed, key, quad.mc_samples, quad.mc_block):
        v_star, i_star, log_q = draw_partners(rng, count, params, proposal)
        omega, r_frac, r_split = draw_collision_parameters(rng, count, params)
        parts.append((v_star, i_star, log_q, omega, r_frac, r_split))
    return [np.concatenate(column) for column in zip(*parts)]


def _estimate(gain: np.ndarray, loss: np.ndarray) -> CollisionEstimate:
    n = len(gain)
    root_n = math.sqrt(n)

    def error(samples):
        return float(np.std(samples, ddof=1) / root_n) if n > 1 else float("inf")

    diff = gain - loss
    return CollisionEstimate(
        value=float(np.mean(diff)), std_error=error(diff),
        gain=float(np.mean(gain)), gain_error=error(gain),
        loss=float(np.mean(loss)), loss_error=error(loss),
        n_samples=n,
    )


def _q_terms(F: PhaseDistribution, G: PhaseDistribution, v: np.ndarray, i: float,
             params: ModelParams, quad: QuadratureSpec, key: Tuple[int, ...]):
    v_star, i_star, log_q, omega, r_frac, r_split = _draw(params, quad, key, PartnerProposal.MAXWELLIAN)
    v_rep = np.broadcast_to(v, v_star.shape)
    i_rep = np.full(len(i_star), float(i))
    v_p, i_p, v_sp, i_sp, phi = post_collision_arrays(v_rep, i_rep, v_star, i_star, omega, r_frac, r_split)

    a = params.laguerre_parameter
    log_pref = -log_q
    if a != 0:
        with np.errstate(divide="ignore"):
            log_pref = log_pref + a * (np.log(i_rep) + np.log(i_star))
    pref = params.collision_constant * phi ** params.kinetic_exponent * np.exp(log_pref)

    with np.errstate(invalid="ignore"):
        gain = pref * F.reduced(v_p, i_p) * G.reduced(v_sp, i_sp)
        loss = pref * F.reduced(v_rep, i_rep) * G.reduced(v_star, i_star)
    return np.nan_to_num(gain), np.nan_to_num(loss)


def q_apply(F: PhaseDistribution, G: PhaseDistribution, p: PhasePoint,
            params: ModelParams, quad: QuadratureSpec, stream_index: int = 0) -> CollisionEstimate:
    """
    Monte Carlo estimate of Q(F, G)(v, I) = Q₊ − Q₋

    The partner is drawn from M, ω uniformly, R and r from their Beta
    densities; both parts are evaluated on the same samples.

    Args:
        F: First distribution
        G: Second (partner) distribution
        p: Phase point
        params: Model parameters
        quad: Quadrature specification (mc_samples, mc_block, seed)
        stream_index: Index of the random stream (distinct points of one sweep
            use distinct indices)

    Returns:
        CollisionEstimate: value, standard error and the gain/loss parts
    """
    F = ensure_distribution(F, params)
    G = ensure_distribution(G, params)
    gain, loss = _q_terms(F, G, p.velocity, p.i, params, quad, (Q_STREAM, stream_index))
    return _estimate(gain, loss)


def gamma_apply(f, g, p: PhasePoint, params: ModelParams, quad: QuadratureSpec,
                stream_index: int = 0) -> CollisionEstimate:
    """
    Monte Carlo estimate of Γ(f, g) = Q(√M f, √M g)/√M

    The partner is drawn from the √M-shaped density so the estimator stays
    square integrable for perturbations that only decay polynomially.

    Args:
        f: Perturbation f(v, I) (callable on arrays)
        g: Perturbation g(v, I) (callable on arrays)
        p: Phase point
        params: Model parameters
        quad: Quadrature specification
        stream_index: Index of the random stream

    Returns:
        CollisionEstimate: value, standard error, Γ₊ and Γ₋
    """
    f = ensure_phase_function(f)
    g = ensure_phase_function(g)
    v_star, i_star, _, omega, r_frac, r_split = _draw(
        params, quad, (GAMMA_STREAM, stream_index), PartnerProposal.ROOT_MAXWELLIAN)
    v_rep = np.broadcast_to(p.velocity, v_star.shape)
    i_rep = np.full(len(i_star), p.i)
    v_p, i_p, v_sp, i_sp, phi = post_collision_arrays(v_rep, i_rep, v_star, i_star, omega, r_frac, r_split)

    pref = params.collision_constant * root_maxwellian_mass(params) * phi ** params.kinetic_exponent
    a = params.laguerre_parameter
    if a != 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.exp(0.5 * a * (np.log(i_rep) + np.log(i_star) - np.log(i_p) - np.log(i_sp)))
        gain_pref = pref * np.nan_to_num(ratio, posinf=0.0)
    else:
        gain_pref = pref

    gain = gain_pref * np.asarray(f(v_p, i_p), dtype=float) * np.asarray(g(v_sp, i_sp), dtype=float)
    loss = pref * np.asarray(f(v_rep, i_rep), dtype=float) * np.asarray(g(v_star, i_star), dtype=float)
    return _estimate(gain, loss)


def collision_invariant_residuals(F: PhaseDistribution, params: ModelParams, quad: QuadratureSpec,
                                  n_hermite: int = 6, n_laguerre: int = 6) -> Dict[str, Tuple[float, float]]:
    """
    ∫ Q(F, F) ψ dv dI for the five collision invariants

    Pointwise estimates of Q on a Gauss grid are combined with Lebesgue
    weights; every node uses its own random stream so the reported errors
    add in quadrature.

    Returns:
        dict: invariant name -> (value, standard error)
    """
    F = ensure_distribution(F, params)
    rule = phase_rule(n_hermite, n_laguerre, params)
    lebesgue = rule.weights / maxwellian_values(rule.v, rule.i, params)
    q_values = np.empty(len(rule.i))
    q_errors = np.empty(len(rule.i))
    for node in range(len(rule.i)):
        gain, loss = _q_terms(F, F, rule.v[node], rule.i[node], params, quad, (INVARIANT_STREAM, node))
        estimate = _estimate(gain, loss)
        q_values[node] = estimate.value
        q_errors[node] = estimate.std_error

    invariants = {
        "mass": np.ones_like(rule.i),
        "momentum_1": rule.v[:, 0],
        "momentum_2": rule.v[:, 1],
        "momentum_3": rule.v[:, 2],
        "energy": 0.5 * np.sum(rule.v ** 2, axis=1) + rule.i,
    }
    residuals = {}
    for name, psi in invariants.items():
        value = float(np.sum(lebesgue * psi * q_values))
        error = float(np.sqrt(np.sum((lebesgue * psi * q_errors) ** 2)))
        residuals[name] = (value, error)
        logger.debug(f"invariant {name}: {value:.3e} ± {error:.3e}")
    return residuals


def sweep_q(F: PhaseDistribution, G: PhaseDistribution, points: Sequence[PhasePoint],
            params: ModelParams, quad: QuadratureSpec):
    """q_apply over several points, one independent stream per point"""
    return [q_apply(F, G, p, params, quad, stream_index=index) for index, p in enumerate(points)]
