"""
Hermite-Laguerre Basis

Basis functions e_j = P_j √M with P_j(v, I) = ψ_{k1}(v₁)ψ_{k2}(v₂)ψ_{k3}(v₃)λ_m(I),
ψ the normalized probabilists' Hermite polynomials and λ the normalized
generalized Laguerre polynomials with parameter δ/2 − 1. The e_j are
orthonormal in L²(dv dI) because the P_j are orthonormal under M.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from config.settings import AppConfig
from gas_model.equilibrium import log_maxwellian_values
from gas_model.params import ModelParams
from gas_model.polynomials import hermite_table, laguerre_table
from gas_model.quadrature import PhaseRule, gauss_hermite_normal, gauss_laguerre_gamma, phase_rule
from utils.errors import CapacityError, ModelError, UsageError

logger = logging.getLogger(__name__)

KERNEL_DIMENSION = 5


def multi_indices(n_v: int, n_i: int, total_degree: Optional[int] = None) -> np.ndarray:
    """
    Multi-indices (k1, k2, k3, m) with k_a ≤ n_v, k1+k2+k3 ≤ total_degree and m ≤ n_i

    Sorted by total degree k1+k2+k3+2m, then lexicographically, so
    (0, 0, 0, 0) comes first.
    """
    cap = n_v if total_degree is None else total_degree
    rows = [
        (k1, k2, k3, m)
        for k1 in range(n_v + 1)
        for k2 in range(n_v + 1)
        for k3 in range(n_v + 1)
        for m in range(n_i + 1)
        if k1 + k2 + k3 <= cap
    ]
    rows.sort(key=lambda r: (r[0] + r[1] + r[2] + 2 * r[3], r))
    return np.array(rows, dtype=int)


@dataclass(frozen=True)
class SpectralBasis:
    """
    Truncated orthonormal basis of L²(dv dI)

    Args:
        n_v: Maximum Hermite degree per velocity axis
        n_i: Maximum Laguerre degree in I
        params: Model parameters
        total_degree: Cap on k1+k2+k3 (defaults to n_v)
    """

    n_v: int
    n_i: int
    params: ModelParams
    total_degree: Optional[int] = None
    indices: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("n_v", "n_i"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise UsageError(f"{name} must be an integer >= 1, got {value!r}")
        if self.total_degree is not None and self.total_degree < 1:
            raise UsageError(f"total_degree must be >= 1, got {self.total_degree}")
        object.__setattr__(self, "indices", multi_indices(self.n_v, self.n_i, self.total_degree))

    @property
    def size(self) -> int:
        return len(self.indices)

    @property
    def laguerre_parameter(self) -> float:
        return self.params.laguerre_parameter

    def evaluate(self, v: np.ndarray, i: np.ndarray) -> np.ndarray:
        """
        P_j at points

        Args:
            v: Velocities (S, 3)
            i: Internal energies (S,)

        Returns:
            np.ndarray: shape (size, S)
        """
        v = np.atleast_2d(np.asarray(v, dtype=float))
        i = np.atleast_1d(np.asarray(i, dtype=float))
        tables = [hermite_table(self.n_v, v[:, axis]) for axis in range(3)]
        lag = laguerre_table(self.n_i, i, self.laguerre_parameter)
        idx = self.indices
        return tables[0][idx[:, 0]] * tables[1][idx[:, 1]] * tables[2][idx[:, 2]] * lag[idx[:, 3]]

    def functions(self, v: np.ndarray, i: np.ndarray) -> np.ndarray:
        """e_j = P_j √M at points, shape (size, S)"""
        root = np.exp(0.5 * log_maxwellian_values(np.atleast_2d(v), np.atleast_1d(i), self.params))
        return self.evaluate(v, i) * root

    def rule(self, extra: int = 3) -> PhaseRule:
        """Phase rule exact for products of two basis polynomials and a degree-2·extra factor"""
        return phase_rule(self.n_v + extra, self.n_i + extra, self.params)

    def project_polynomial(self, poly: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> np.ndarray:
        """
        Coefficients of q √M for a low-degree polynomial q(v, I)

        ⟨q √M, e_j⟩ = E_M[q P_j] by Gauss quadrature (exact when
        deg q ≤ 5).
        """
        rule = self.rule()
        return self.evaluate(rule.v, rule.i) @ (rule.weights * np.asarray(poly(rule.v, rule.i), dtype=float))

    def gram(self) -> np.ndarray:
        """⟨e_i, e_j⟩ by Gauss quadrature"""
        rule = self.rule(extra=1)
        values = self.evaluate(rule.v, rule.i)
        return (values * rule.weights) @ values.T

    def kernel_vectors(self) -> np.ndarray:
        """
        Coefficients of √M, v₁√M, v₂√M, v₃√M and (|v|² + 2I − 3 − δ)√M

        Returns:
            np.ndarray: shape (5, size)
        """
        delta = self.params.delta
        polys = [
            lambda v, i: np.ones(len(i)),
            lambda v, i: v[:, 0],
            lambda v, i: v[:, 1],
            lambda v, i: v[:, 2],
            lambda v, i: np.sum(v * v, axis=1) + 2 * i - 3 - delta,
        ]
        return np.array([self.project_polynomial(poly) for poly in polys])

    def kernel_residual(self) -> float:
        """‖q‖² − ‖coefficients of q‖² summed over the kernel functions (zero when represented)"""
        vectors = self.kernel_vectors()
        norms = np.array([1.0, 1.0, 1.0, 1.0, energy_mode_norm_squared(self.params)])
        return float(np.max(np.abs(norms - np.sum(vectors ** 2, axis=1))))

    def kernel_basis(self) -> np.ndarray:
        """Orthonormal rows spanning the five kernel directions"""
        vectors = self.kernel_vectors()
        q, _ = np.linalg.qr(vectors.T)
        return q.T

    def multiplication_matrix(self, axis: int) -> np.ndarray:
        """
        ⟨e_i, v_axis e_j⟩ from v ψ_n = √(n+1) ψ_{n+1} + √n ψ_{n−1}

        Terms that leave the truncated index set are dropped, which keeps
        the matrix symmetric.
        """
        lookup = {tuple(row): pos for pos, row in enumerate(self.indices)}
        matrix = np.zeros((self.size, self.size))
        for j, row in enumerate(self.indices):
            n = row[axis]
            for shift, coefficient in ((1, np.sqrt(n + 1)), (-1, np.sqrt(n))):
                if coefficient == 0:
                    continue
                target = list(row)
                target[axis] = n + shift
                i = lookup.get(tuple(target))
                if i is not None:
                    matrix[i, j] = coefficient
        return matrix

    def to_dict(self):
        return {"n_v": self.n_v, "n_i": self.n_i, "total_degree": self.total_degree, "size": self.size}


def energy_mode_norm_squared(params: ModelParams) -> float:
    """‖(|v|² + 2I − 3 − δ)√M‖² = 6 + 2δ"""
    return 6 + 2 * params.delta


def build_basis(n_v: int, n_i: int, params: ModelParams, total_degree: Optional[int] = None,
                max_size: Optional[int] = None) -> SpectralBasis:
    """
    Build the orthonormal Hermite-Laguerre basis

    Args:
        n_v: Maximum Hermite degree per axis (≥ 1)
        n_i: Maximum Laguerre degree (≥ 1)
        params: Model parameters
        total_degree: Cap on the total velocity degree (defaults to n_v)
        max_size: Largest admissible basis (defaults to AppConfig.MAX_BASIS_SIZE)

    Returns:
        SpectralBasis
    """
    basis = SpectralBasis(n_v=n_v, n_i=n_i, params=params, total_degree=total_degree)
    limit = AppConfig().MAX_BASIS_SIZE if max_size is None else max_size
    if basis.size > limit:
        raise CapacityError(f"basis of size {basis.size} exceeds the limit {limit}")
    if n_v >= 2:
        residual = basis.kernel_residual()
        if residual > 1e-10:
            raise ModelError("kernel functions are not represented by the basis", {"residual": residual})
    logger.debug(f"Built basis n_v={n_v} n_i={n_i} size={basis.size}")
    return basis


@dataclass(frozen=True)
class TensorExpansion:
    """
    Full tensor polynomial interpolant through the nodes of a phase rule

    The discrete transform on n_v³ × n_i Gauss nodes is exact for degrees
    below the node counts, so the interpolant reproduces the nodal values.
    Evaluation at arbitrary points contracts one axis at a time.
    """

    n_v_nodes: int
    n_i_nodes: int
    params: ModelParams

    def _axis_tables(self):
        x, w_x = gauss_hermite_normal(self.n_v_nodes)
        y, w_y = gauss_laguerre_gamma(self.n_i_nodes, self.params.delta / 2)
        hv = hermite_table(self.n_v_nodes - 1, x) * w_x
        hi = laguerre_table(self.n_i_nodes - 1, y, self.params.laguerre_parameter) * w_y
        return hv, hi

    def coefficients(self, nodal: np.ndarray) -> np.ndarray:
        """
        Transform nodal values (..., n_v³·n_i) in phase_rule order to
        coefficients (..., n_v, n_v, n_v, n_i)
        """
        n, m = self.n_v_nodes, self.n_i_nodes
        values = np.asarray(nodal, dtype=float).reshape(nodal.shape[:-1] + (n, n, n, m))
        hv, hi = self._axis_tables()
        return np.einsum("...abcd,ia,jb,kc,ld->...ijkl", values, hv, hv, hv, hi, optimize=True)

    def evaluate(self, coefficients: np.ndarray, v: np.ndarray, i: np.ndarray) -> np.ndarray:
        """
        Interpolant at points

        Args:
            coefficients: (n_v, n_v, n_v, n_i) array
            v: Velocities (S, 3)
            i: Energies (S,)

        Returns:
            np.ndarray: shape (S,)
        """
        h1 = hermite_table(self.n_v_nodes - 1, v[:, 0])
        h2 = hermite_table(self.n_v_nodes - 1, v[:, 1])
        h3 = hermite_table(self.n_v_nodes - 1, v[:, 2])
        lag = laguerre_table(self.n_i_nodes - 1, i, self.params.laguerre_parameter)
        partial = np.einsum("abcd,ds->abcs", coefficients, lag)
        partial = np.einsum("abcs,cs->abs", partial, h3)
        partial = np.einsum("abs,bs->as", partial, h2)
        return np.einsum("as,as->s", partial, h1)
