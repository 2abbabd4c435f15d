"""
Distribution Grids

Sampled distributions on the tensor Gauss-Hermite × Gauss-Laguerre phase grid,
either spatially homogeneous or on an N_x³ lattice of the torus [0, 2π)³.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np

from gas_model.equilibrium import maxwellian_values, weight_values
from gas_model.params import DefectMoments, ModelParams
from gas_model.quadrature import QuadratureSpec, phase_rule
from utils.errors import UsageError

logger = logging.getLogger(__name__)

TORUS_LENGTH = 2 * math.pi


class GridQuantity(str, Enum):
    """What the grid values represent"""

    DISTRIBUTION = "F"
    WEIGHTED_PERTURBATION = "h"


@dataclass(frozen=True)
class DistributionGrid:
    """
    Distribution sampled on phase nodes

    values has shape (N,) for a homogeneous grid and (N_x, N_x, N_x, N)
    on a lattice. weights are the Maxwellian-weighted Gauss weights
    (Σ weights · g ≈ ∫ g M dv dI); Lebesgue integrals use weights / M.
    """

    params: ModelParams
    v_nodes: np.ndarray
    i_nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    quantity: GridQuantity = GridQuantity.DISTRIBUTION
    time: float = 0.0
    n_cells: Optional[int] = None
    v_radius: float = 8.0
    _maxwellian: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.i_nodes)
        if self.v_nodes.shape != (n, 3) or self.weights.shape != (n,):
            raise UsageError("v_nodes, i_nodes and weights must describe the same number of nodes")
        if np.any(self.weights <= 0):
            raise UsageError("quadrature weights must be positive")
        expected = (n,) if self.n_cells is None else (self.n_cells,) * 3 + (n,)
        if self.values.shape != expected:
            raise UsageError(f"values have shape {self.values.shape}, expected {expected}")
        if self.time < 0:
            raise UsageError(f"time must be nonnegative, got {self.time}")
        object.__setattr__(self, "_maxwellian", maxwellian_values(self.v_nodes, self.i_nodes, self.params))

    @classmethod
    def from_quadrature(cls, params: ModelParams, quad: QuadratureSpec,
                        fn: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None,
                        n_cells: Optional[int] = None,
                        quantity: GridQuantity = GridQuantity.DISTRIBUTION) -> "DistributionGrid":
        """
        Build a grid on the quad.n_hermite³ × quad.n_laguerre phase rule

        Args:
            params: Model parameters
            quad: Quadrature specification
            fn: Values as a function of (v (N,3), I (N,)); defaults to M for
                distributions and 0 for weighted perturbations
            n_cells: Lattice size per axis, or None for a homogeneous grid
            quantity: Meaning of the values

        Returns:
            DistributionGrid
        """
        rule = phase_rule(quad.n_hermite, quad.n_laguerre, params)
        if fn is None:
            if quantity is GridQuantity.DISTRIBUTION:
                nodal = maxwellian_values(rule.v, rule.i, params)
            else:
                nodal = np.zeros(len(rule.i))
        else:
            nodal = np.asarray(fn(rule.v, rule.i), dtype=float)
        values = nodal if n_cells is None else np.broadcast_to(nodal, (n_cells,) * 3 + nodal.shape).copy()
        return cls(params=params, v_nodes=rule.v, i_nodes=rule.i, weights=rule.weights,
                   values=values, quantity=quantity, n_cells=n_cells, v_radius=quad.v_radius)

    @property
    def is_homogeneous(self) -> bool:
        return self.n_cells is None

    @property
    def n_nodes(self) -> int:
        return len(self.i_nodes)

    @property
    def cell_volume(self) -> float:
        if self.n_cells is None:
            return 1.0
        return (TORUS_LENGTH / self.n_cells) ** 3

    @property
    def spatial_volume(self) -> float:
        return 1.0 if self.n_cells is None else TORUS_LENGTH ** 3

    @property
    def maxwellian(self) -> np.ndarray:
        return self._maxwellian

    @property
    def lebesgue_weights(self) -> np.ndarray:
        """Weights for ∫ g dv dI"""
        return self.weights / self._maxwellian

    @property
    def node_weight(self) -> np.ndarray:
        """w(v, I) at the nodes"""
        return weight_values(self.v_nodes, self.i_nodes, self.params.beta)

    def distribution(self) -> np.ndarray:
        """F = M + √M h / w at every node"""
        if self.quantity is GridQuantity.DISTRIBUTION:
            return self.values
        return self._maxwellian + np.sqrt(self._maxwellian) * self.values / self.node_weight

    def weighted_perturbation(self) -> np.ndarray:
        """h = w (F − M)/√M at every node"""
        if self.quantity is GridQuantity.WEIGHTED_PERTURBATION:
            return self.values
        return self.node_weight * (self.values - self._maxwellian) / np.sqrt(self._maxwellian)

    def sup_norm(self) -> float:
        """‖h‖_∞ = ‖w f‖_∞ over the grid"""
        return float(np.max(np.abs(self.weighted_perturbation()), initial=0.0))

    def with_values(self, values: np.ndarray, time: Optional[float] = None,
                    quantity: Optional[GridQuantity] = None) -> "DistributionGrid":
        return replace(self, values=values,
                       time=self.time if time is None else time,
                       quantity=self.quantity if quantity is None else quantity)

    def integrate(self, integrand: np.ndarray) -> float:
        """∫ over x, v, I of a nodal Lebesgue integrand with the grid's shape"""
        per_cell = np.tensordot(integrand, self.lebesgue_weights, axes=([-1], [0]))
        return float(np.sum(per_cell) * self.cell_volume)


def defect_moments(F: DistributionGrid, params: ModelParams) -> DefectMoments:
    """
    Defect mass, momentum and energy of F − M

    Args:
        F: Distribution grid
        params: Model parameters (must be the grid's)

    Returns:
        DefectMoments: (∫(F−M), ∫v(F−M), ∫(|v|²+2I)(F−M)) over x, v, I
    """
    if F.params != params:
        raise UsageError(f"grid was built for {F.params}, called with {params}")
    defect = F.distribution() - F.maxwellian
    energy_density = np.sum(F.v_nodes ** 2, axis=1) + 2 * F.i_nodes
    mass = F.integrate(defect)
    momentum = tuple(F.integrate(defect * F.v_nodes[:, axis]) for axis in range(3))
    energy = F.integrate(defect * energy_density)
    return DefectMoments(mass=mass, momentum=momentum, energy=energy)


def leaked_mass(F: DistributionGrid) -> float:
    """|F − M| mass carried by nodes outside the velocity truncation radius"""
    outside = np.linalg.norm(F.v_nodes, axis=1) > F.v_radius
    if not np.any(outside):
        return 0.0
    defect = np.abs(F.distribution() - F.maxwellian) * outside
    return F.integrate(defect)
