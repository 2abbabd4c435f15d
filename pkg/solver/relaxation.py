"""
Homogeneous Relaxation

Galerkin RK2 stepping of ∂_t F = Q(F, F) for F = M h, h = Σ c_j P_j. Each
step draws a fresh weak-form sample set on its own stream so the trajectory
is reproducible and the collision invariants are conserved to rounding.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from collision.entropy import entropy_density
from collision.weak_form import collision_coefficients, draw_weak_form_samples
from gas_model.equilibrium import maxwellian_values, moment_matched_maxwellian
from gas_model.grid import DistributionGrid
from gas_model.params import ModelParams
from gas_model.quadrature import QuadratureSpec
from kernels.frequency import nu_values
from linearized.basis import SpectralBasis, build_basis
from utils.errors import DomainError, PositivityError, StiffnessError, UsageError
from utils.logger import log_performance

logger = logging.getLogger(__name__)

RELAX_STREAM = 51

TRAJECTORY_COLUMNS = ["t", "mass_defect", "momentum_defect_norm", "energy_defect", "entropy", "sup_norm", "l2_distance"]

# entropy comparisons below this relative size are rounding
ENTROPY_ROUNDING = 64 * np.finfo(float).eps

# negative mass of the truncated state treated as resolution noise
NEGATIVE_MASS_TOL = 1e-3


def bimodal_initial_state(params: ModelParams, gamma: float = 0.55) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """
    h(v, I) = (1 + γ v₁²)/(1 + γ) · q(I)/E[q] with q(I) = 1 − ηI + η′I²

    Unit mass, zero momentum and the equilibrium energy 3 + δ; bimodal in v₁
    for γ > 1/2. η′ sits at the vertex of the positivity condition η² < 4η′,
    η then follows from the energy constraint. Such a q exists when
    (κ − 3)γ² + 2(κ − 1)γ + κ > 0 with κ = δ/2, i.e. γ < 1/√2 at δ = 2.

    Args:
        params: Model parameters
        gamma: Bimodality strength

    Returns:
        Callable h(v (N, 3), I (N,)) -> (N,)
    """
    if gamma <= 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    kappa = params.delta / 2
    excess = gamma / (1 + gamma)
    a_term = excess / (kappa * (1 + excess))
    b_term = (kappa + 1) * (2 + excess) / (1 + excess)
    if a_term * b_term >= 1:
        raise DomainError(f"no positive internal profile balances gamma={gamma} at delta={params.delta}")
    eta2 = (4 - 2 * a_term * b_term) / (2 * b_term ** 2)
    eta1 = a_term + eta2 * b_term
    mean_q = 1 - eta1 * kappa + eta2 * kappa * (kappa + 1)

    def h(v: np.ndarray, i: np.ndarray) -> np.ndarray:
        velocity = (1 + gamma * v[..., 0] ** 2) / (1 + gamma)
        internal = (1 - eta1 * i + eta2 * i ** 2) / mean_q
        return velocity * internal

    return h


@dataclass
class RelaxationTrajectory:
    """Rows of the relaxation trajectory and the per-step entropy tolerances"""

    rows: List[Dict[str, float]]
    tolerances: List[float]
    coefficients: np.ndarray
    nu_max: float
    samples_per_step: int
    negative_masses: List[float] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=TRAJECTORY_COLUMNS)

    def conservation_drift(self) -> Dict[str, float]:
        """max_t |D(t) − D(0)| for the defect mass, momentum norm and energy"""
        frame = self.to_frame()
        return {
            column: float(np.max(np.abs(frame[column] - frame[column].iloc[0])))
            for column in ("mass_defect", "momentum_defect_norm", "energy_defect")
        }

    def entropy_violations(self) -> List[int]:
        """Steps n with H(t_{n+1}) > H(t_n) + 2·tolerance_n (plus a rounding floor)"""
        entropy = [row["entropy"] for row in self.rows]
        return [n for n in range(len(self.tolerances))
                if entropy[n + 1] > entropy[n] + 2 * self.tolerances[n] + ENTROPY_ROUNDING * abs(entropy[n])]


class HomogeneousRelaxation:
    """
    RK2 Galerkin integrator of the space-homogeneous equation

    Args:
        params: Model parameters
        quad: Quadrature specification (phase rule, mc_samples, seed)
        basis: Spectral basis for h; defaults to n_v = 4, n_i = 2
        n_samples: Collision samples per step; defaults to quad.mc_samples
        negative_mass_tol: Largest ∫ F₋ the truncated state may carry before the
            run stops with PositivityError
    """

    def __init__(self, params: ModelParams, quad: QuadratureSpec, basis: Optional[SpectralBasis] = None,
                 n_samples: Optional[int] = None, negative_mass_tol: float = NEGATIVE_MASS_TOL):
        self.params = params
        self.quad = quad
        self.basis = basis or build_basis(4, 2, params)
        if self.basis.params != params:
            raise UsageError("basis was built for different model parameters")
        self.n_samples = n_samples or quad.mc_samples
        self.negative_mass_tol = negative_mass_tol
        self.logger = logging.getLogger(self.__class__.__name__)

        self.grid = DistributionGrid.from_quadrature(params, quad)
        self.fine_quad = replace(quad, n_hermite=quad.n_hermite + 2, n_laguerre=quad.n_laguerre + 2)
        self.fine_grid = DistributionGrid.from_quadrature(params, self.fine_quad)
        self.nodal = self.basis.evaluate(self.grid.v_nodes, self.grid.i_nodes)
        inside = np.linalg.norm(self.grid.v_nodes, axis=1) <= quad.v_radius
        self.nu_max = float(np.max(nu_values(self.grid.v_nodes[inside], self.grid.i_nodes[inside], params, quad)))

    def project(self, F0: DistributionGrid) -> np.ndarray:
        """Coefficients c_j = E_M[h P_j] of h = F₀/M"""
        if not F0.is_homogeneous:
            raise UsageError("homogeneous_relax needs a homogeneous grid")
        if F0.params != self.params:
            raise UsageError(f"grid was built for {F0.params}, called with {self.params}")
        if F0.n_nodes != self.grid.n_nodes:
            raise UsageError("initial grid must be DistributionGrid.from_quadrature(params, quad)")
        h = F0.distribution() / F0.maxwellian
        return self.nodal @ (F0.weights * h)

    def ratio(self, coefficients: np.ndarray, v: np.ndarray, i: np.ndarray) -> np.ndarray:
        return coefficients @ self.basis.evaluate(v, i)

    def _grid_entropy(self, grid: DistributionGrid, F: np.ndarray):
        """
        H on one rule with nonpositive nodes contributing zero

        Returns:
            (H, bound on the dropped contribution, ∫ F₋, count and min of nonpositive nodes)
        """
        negative = F <= 0
        magnitude = np.where(negative, -F, 0.0)
        density = entropy_density(np.where(negative, 1.0, F), grid.i_nodes, self.params)
        density = np.where(negative, 0.0, density)
        dropped = magnitude * (1 + np.abs(np.log(np.maximum(magnitude, np.finfo(float).tiny))))
        return (grid.integrate(density), grid.integrate(np.where(negative, dropped, 0.0)),
                grid.integrate(magnitude), int(np.sum(negative)), float(F.min()))

    def _entropy(self, coefficients: np.ndarray, t: float = 0.0):
        """
        Entropy on the working and the refined rule

        The difference between the rules estimates the quadrature error. The
        truncated state may dip below zero at outer nodes; those nodes are
        dropped from H and their bound is added to the error, unless the
        negative mass exceeds negative_mass_tol.

        Returns:
            (H, error estimate, negative mass)
        """
        results = []
        for grid in (self.grid, self.fine_grid):
            F = grid.maxwellian * self.ratio(coefficients, grid.v_nodes, grid.i_nodes)
            results.append(self._grid_entropy(grid, F))
        negative_mass = max(r[2] for r in results)
        if negative_mass > self.negative_mass_tol:
            raise PositivityError("truncated distribution lost positivity", {
                "t": t,
                "negative_mass": negative_mass,
                "negative_mass_tol": self.negative_mass_tol,
                "nonpositive_nodes": sum(r[3] for r in results),
                "min_value": min(r[4] for r in results),
            })
        (entropy, dropped, _, count, _), (fine_entropy, fine_dropped, _, _, _) = results
        if count:
            self.logger.debug(f"t={t:.4g}: {count} nonpositive nodes, negative mass {negative_mass:.3g}")
        return entropy, abs(fine_entropy - entropy) + dropped + fine_dropped, negative_mass

    def _entropy_direction(self, coefficients: np.ndarray) -> np.ndarray:
        """g_i = E_M[P_i (log(F/I^{δ/2−1}) + 1)], so dH/dt = Σ g_i ċ_i"""
        F = self.grid.maxwellian * (coefficients @ self.nodal)
        log_reduced = np.log(np.maximum(F, np.finfo(float).tiny))
        a = self.params.laguerre_parameter
        if a != 0:
            log_reduced = log_reduced - a * np.log(self.grid.i_nodes)
        return self.nodal @ (self.grid.weights * (log_reduced + 1))

    def row(self, t: float, coefficients: np.ndarray, entropy: float) -> Dict[str, float]:
        grid, params = self.grid, self.params
        h = coefficients @ self.nodal
        weights = grid.weights
        energy_density = np.sum(grid.v_nodes ** 2, axis=1) + 2 * grid.i_nodes
        mass = float(weights @ h)
        momentum = grid.v_nodes.T @ (weights * h)
        energy = float(weights @ (energy_density * h))
        bulk = momentum / mass
        temperature = (energy / mass - bulk @ bulk) / (3 + params.delta)
        matched = moment_matched_maxwellian(grid.v_nodes, grid.i_nodes, mass, bulk, temperature, params)
        distance = math.sqrt(float(weights @ (h - matched / grid.maxwellian) ** 2))
        perturbation = grid.node_weight * np.sqrt(grid.maxwellian) * (h - 1)
        return {
            "t": t,
            "mass_defect": mass - 1.0,
            "momentum_defect_norm": float(np.linalg.norm(momentum)),
            "energy_defect": energy - (3 + params.delta),
            "entropy": entropy,
            "sup_norm": float(np.max(np.abs(perturbation))),
            "l2_distance": distance,
        }

    def rate(self, coefficients: np.ndarray, samples, direction: Optional[np.ndarray] = None):
        return collision_coefficients(coefficients, self.basis, samples, direction=direction)

    @log_performance
    def run(self, F0: DistributionGrid, dt: float, n_steps: int, stiffness_cap: float = 0.5) -> RelaxationTrajectory:
        if dt <= 0 or n_steps < 0:
            raise UsageError(f"need dt > 0 and n_steps >= 0, got dt={dt}, n_steps={n_steps}")
        if dt * self.nu_max > stiffness_cap:
            raise StiffnessError("time step too large for the collision frequency",
                                 {"dt": dt, "nu_max": self.nu_max, "dt_nu_max": dt * self.nu_max, "cap": stiffness_cap})

        c = self.project(F0)
        entropy, _, negative_mass = self._entropy(c)
        rows = [self.row(0.0, c, entropy)]
        tolerances: List[float] = []
        negative_masses = [negative_mass]
        for step in range(n_steps):
            samples = draw_weak_form_samples(self.params, self.n_samples, self.quad.seed, block=self.quad.mc_block,
                                             stream_key=(RELAX_STREAM, step))
            first = self.rate(c, samples, direction=self._entropy_direction(c))
            predictor = c + dt * first.values
            second = self.rate(predictor, samples)
            c = c + 0.5 * dt * (first.values + second.values)

            t = (step + 1) * dt
            entropy, quadrature_error, negative_mass = self._entropy(c, t)
            tolerances.append(quadrature_error + dt * float(first.direction_error))
            negative_masses.append(negative_mass)
            rows.append(self.row(t, c, entropy))
            self.logger.debug(f"relax step {step + 1}: H={entropy:.10g} tol={tolerances[-1]:.3g}")
        return RelaxationTrajectory(rows=rows, tolerances=tolerances, coefficients=c, nu_max=self.nu_max,
                                    samples_per_step=self.n_samples, negative_masses=negative_masses)


def homogeneous_relax(F0: DistributionGrid, dt: float, n_steps: int, params: ModelParams, quad: QuadratureSpec,
                      basis: Optional[SpectralBasis] = None, n_samples: Optional[int] = None,
                      stiffness_cap: float = 0.5, negative_mass_tol: float = NEGATIVE_MASS_TOL) -> RelaxationTrajectory:
    """
    Relax a homogeneous distribution towards equilibrium

    Args:
        F0: Initial grid from DistributionGrid.from_quadrature(params, quad)
        dt: Time step
        n_steps: Number of RK2 steps
        params: Model parameters
        quad: Quadrature specification
        basis: Spectral basis for h = F/M
        n_samples: Collision samples per step
        stiffness_cap: Largest admissible dt·max ν
        negative_mass_tol: Largest admissible ∫ F₋ of the truncated state

    Returns:
        RelaxationTrajectory
    """
    return HomogeneousRelaxation(params, quad, basis, n_samples, negative_mass_tol).run(F0, dt, n_steps, stiffness_cap)


def equilibrium_initial_state(params: ModelParams, quad: QuadratureSpec) -> DistributionGrid:
    return DistributionGrid.from_quadrature(params, quad)


def bimodal_initial_grid(params: ModelParams, quad: QuadratureSpec, gamma: float = 0.55) -> DistributionGrid:
    h = bimodal_initial_state(params, gamma)
    return DistributionGrid.from_quadrature(params, quad, fn=lambda v, i: maxwellian_values(v, i, params) * h(v, i))
