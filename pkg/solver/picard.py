"""
Picard Approximation Sequence

Homogeneous iteration ∂_t F^{n+1} + g^n F^{n+1} = Q₊(F^n, F^n), F^{n+1}(0) = F₀,
solved exactly along the time axis:

    F^{n+1}(t) − M = e^{−G(t)}(F₀ − M) + e^{−G(t)} ∫₀^t e^{G(s)}(Q₊(s) − g^n(s) M) ds,

G(t) = ∫₀^t g^n. With F^n = M h^n the loss frequency is
g^n = ν + C Z Σ ω* Φ^{1−α/2}(h* − 1) on the node grid and the gain is
Q₊ = ν M + C Z M E[Φ^{1−α/2}(h′h′* − 1)], so M is an exact fixed point.
Time integrals use composite Gauss-Legendre panels and their spectral
integration matrix.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional

import numpy as np
from numpy.polynomial import legendre

from collision.operator import post_collision_arrays
from collision.sampling import draw_collision_parameters, draw_maxwellian_states, stream
from gas_model.grid import DistributionGrid
from gas_model.params import ModelParams
from gas_model.quadrature import QuadratureSpec, gauss_legendre
from kernels.frequency import nu_values
from linearized.basis import TensorExpansion
from utils.errors import ConsistencyError, PreconditionError, UsageError
from utils.logger import log_performance

logger = logging.getLogger(__name__)

PICARD_STREAM = 41

POSITIVITY_FLOOR = -1e-12
RATIO_FLOOR = 1e-300


def t1_horizon(f0_norm: float, c1: float) -> float:
    """
    Local existence horizon T₁ = 1 / (8 C₁ (1 + ‖w f₀‖_∞))

    Args:
        f0_norm: ‖w f₀‖_∞ ≥ 0
        c1: Constant C₁ > 0

    Returns:
        float: T₁
    """
    if not math.isfinite(c1) or c1 <= 0:
        raise UsageError(f"c1 must be a positive finite number, got {c1}")
    if not math.isfinite(f0_norm) or f0_norm < 0:
        raise UsageError(f"f0_norm must be finite and nonnegative, got {f0_norm}")
    return 1.0 / (8 * c1 * (1 + f0_norm))


@dataclass(frozen=True)
class IterationReport:
    """
    Norms of one Picard iterate

    Args:
        n: Iteration index
        sup_norm: ‖w f^n‖_∞ over grid and time nodes
        diff_norm: ‖√w (f^{n+1} − f^n)‖_∞
        ratio: diff_norm(n) / diff_norm(n−1); None for n = 0
    """

    n: int
    sup_norm: float
    diff_norm: float
    ratio: Optional[float]

    def to_dict(self) -> Dict:
        return {"n": self.n, "sup_norm": self.sup_norm, "diff_norm": self.diff_norm, "ratio": self.ratio}


@lru_cache(maxsize=16)
def _reference_integration(n: int):
    """S[k, j] = ∫_{−1}^{x_k} ℓ_j(s) ds for the Lagrange basis on Gauss-Legendre nodes"""
    x, w = legendre.leggauss(n)
    vander = legendre.legvander(x, n - 1)
    coefficients = np.linalg.inv(vander)
    antiderivative = legendre.legint(coefficients, lbnd=-1.0, axis=0)
    S = legendre.legval(x, antiderivative).T
    S.setflags(write=False)
    return S, w


def time_integration(T: float, panels: int, nodes: int):
    """
    Composite Gauss-Legendre nodes on [0, T] and the matrix S with
    (S g)_k ≈ ∫₀^{t_k} g(s) ds

    Returns:
        Tuple of times (P·n,) and S (P·n, P·n)
    """
    S_ref, w_ref = _reference_integration(nodes)
    width = T / panels
    times = np.concatenate([gauss_legendre(nodes, p * width, (p + 1) * width)[0] for p in range(panels)])
    size = panels * nodes
    S = np.zeros((size, size))
    for p in range(panels):
        rows = slice(p * nodes, (p + 1) * nodes)
        S[rows, rows] = 0.5 * width * S_ref
        for q in range(p):
            S[rows, q * nodes:(q + 1) * nodes] = 0.5 * width * w_ref
    return times, S


class PicardSolver:
    """
    Picard iteration on the homogeneous node grid of F₀

    Args:
        F0: Homogeneous distribution grid
        params: Model parameters
        quad: Quadrature specification (time_panels, time_nodes, seed)
        samples_per_node: Collision samples of the gain term per node
    """

    def __init__(self, F0: DistributionGrid, params: ModelParams, quad: QuadratureSpec, samples_per_node: int = 256):
        if not F0.is_homogeneous:
            raise UsageError("picard_iterate needs a homogeneous grid")
        if F0.params != params:
            raise UsageError(f"grid was built for {F0.params}, called with {params}")
        self.F0 = F0
        self.params = params
        self.quad = quad
        self.logger = logging.getLogger(self.__class__.__name__)

        if F0.n_nodes != quad.n_hermite ** 3 * quad.n_laguerre:
            raise UsageError("picard_iterate needs the grid of DistributionGrid.from_quadrature(params, quad)")
        self.expansion = TensorExpansion(n_v_nodes=quad.n_hermite, n_i_nodes=quad.n_laguerre, params=params)

        self.maxwellian = F0.maxwellian
        self.nu = nu_values(F0.v_nodes, F0.i_nodes, params, quad)
        u = F0.v_nodes[:, None, :] - F0.v_nodes[None, :, :]
        phi = 0.25 * np.sum(u * u, axis=-1) + F0.i_nodes[:, None] + F0.i_nodes[None, :]
        self.loss_kernel = params.collision_constant * phi ** params.kinetic_exponent * F0.weights[None, :]
        self._draw_gain_samples(samples_per_node)

    def _draw_gain_samples(self, samples_per_node: int):
        F0, params = self.F0, self.params
        v_post, i_post, v_star_post, i_star_post, kinetic = [], [], [], [], []
        for node in range(F0.n_nodes):
            rng = stream(self.quad.seed, PICARD_STREAM, node)
            v_star, i_star = draw_maxwellian_states(rng, samples_per_node, params)
            omega, r_frac, r_split = draw_collision_parameters(rng, samples_per_node, params)
            v = np.broadcast_to(F0.v_nodes[node], v_star.shape)
            i = np.full(samples_per_node, F0.i_nodes[node])
            v_p, i_p, v_sp, i_sp, phi = post_collision_arrays(v, i, v_star, i_star, omega, r_frac, r_split)
            v_post.append(v_p)
            i_post.append(i_p)
            v_star_post.append(v_sp)
            i_star_post.append(i_sp)
            kinetic.append(phi ** params.kinetic_exponent)
        self.samples_per_node = samples_per_node
        self.v_post = np.concatenate(v_post)
        self.i_post = np.concatenate(i_post)
        self.v_star_post = np.concatenate(v_star_post)
        self.i_star_post = np.concatenate(i_star_post)
        self.kinetic = np.stack(kinetic)

    def _rates(self, deviation: np.ndarray):
        """Perturbations of the loss frequency and of the gain for h = 1 + deviation"""
        loss = self.loss_kernel @ deviation
        coefficients = self.expansion.coefficients(deviation)
        d_post = self.expansion.evaluate(coefficients, self.v_post, self.i_post)
        d_star = self.expansion.evaluate(coefficients, self.v_star_post, self.i_star_post)
        product = (d_post + d_star + d_post * d_star).reshape(self.F0.n_nodes, self.samples_per_node)
        gain = self.params.collision_constant * self.maxwellian * np.mean(self.kinetic * product, axis=1)
        return loss, gain

    def _next_iterate(self, deviations: np.ndarray, times: np.ndarray, S: np.ndarray, initial: np.ndarray):
        """F^{n+1} − M at every time node from the deviations h^n − 1 at the time nodes"""
        n_t = len(times)
        loss = np.empty((n_t, self.F0.n_nodes))
        source = np.empty((n_t, self.F0.n_nodes))
        for k in range(n_t):
            loss_k, gain_k = self._rates(deviations[k])
            loss[k] = self.nu + loss_k
            source[k] = gain_k - loss_k * self.maxwellian
        exponent = S @ loss
        duhamel = S @ (np.exp(exponent) * source)
        return np.exp(-exponent) * (initial[None, :] + duhamel)

    @log_performance
    def run(self, T: float, n_iters: int, c1: float = 1.0) -> List[IterationReport]:
        """
        Iterate n_iters times on [0, T]

        Returns:
            list of IterationReport, one per computed iterate f^0 … f^{n_iters−1}
        """
        F0 = self.F0
        weight = F0.node_weight
        root = np.sqrt(self.maxwellian)
        initial = F0.distribution() - self.maxwellian
        f0_norm = float(np.max(np.abs(weight * initial / root), initial=0.0))
        horizon = t1_horizon(f0_norm, c1)
        if T > horizon * (1 + 1e-12):
            raise PreconditionError(f"T={T} exceeds the horizon T1={horizon:.6g} for ||w f0||={f0_norm:.3g}, c1={c1}")
        if n_iters < 1:
            raise UsageError(f"n_iters must be >= 1, got {n_iters}")

        times, S = time_integration(T, self.quad.time_panels, self.quad.time_nodes)
        current = np.broadcast_to(initial, (len(times), F0.n_nodes)).copy()
        reports: List[IterationReport] = []
        previous_diff = None
        for n in range(n_iters):
            sup_norm = max(f0_norm, float(np.max(np.abs(weight * current / root))))
            following = self._next_iterate(current / self.maxwellian, times, S, initial)
            F_next = following + self.maxwellian
            if np.min(F_next) < POSITIVITY_FLOOR:
                raise ConsistencyError("Picard iterate lost positivity",
                                       {"iteration": n + 1, "min_F": float(np.min(F_next))})
            diff = float(np.max(np.abs(np.sqrt(weight) * (following - current) / root)))
            if previous_diff is None:
                ratio = None
            elif previous_diff <= RATIO_FLOOR:
                ratio = 0.0
            else:
                ratio = diff / previous_diff
            reports.append(IterationReport(n=n, sup_norm=sup_norm, diff_norm=diff, ratio=ratio))
            self.logger.debug(f"Picard n={n}: sup={sup_norm:.4g} diff={diff:.4g} ratio={ratio}")
            previous_diff = diff
            current = following
        return reports


def picard_iterate(f0: DistributionGrid, T: float, n_iters: int, params: ModelParams, quad: QuadratureSpec,
                   c1: float = 1.0, samples_per_node: int = 256) -> List[IterationReport]:
    """
    Picard approximation sequence on [0, T]

    Args:
        f0: Homogeneous initial grid (F or h = w f)
        T: Horizon, at most t1_horizon(‖w f₀‖_∞, c1)
        n_iters: Number of iterates
        params: Model parameters
        quad: Quadrature specification
        c1: Constant of the horizon formula
        samples_per_node: Gain-term collision samples per node

    Returns:
        list of IterationReport
    """
    return PicardSolver(f0, params, quad, samples_per_node).run(T, n_iters, c1)
