"""
Linearized Operator in the Spectral Basis

Assembly of ⟨e_i, L e_j⟩, the coercivity constant, the projections P₁/P₂
onto ker L, the per-Fourier-mode generator G(k) = −(i k·v + L) and the
ν − K cross-validation route.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from collision.weak_form import draw_weak_form_samples, linearized_form_errors, linearized_form_matrix
from gas_model.equilibrium import log_maxwellian_values
from gas_model.params import ModelParams
from gas_model.quadrature import QuadratureSpec, phase_rule
from kernels.frequency import nu_values
from kernels.kernels import ball_error_estimate, k_values, outer_grid
from linearized.basis import KERNEL_DIMENSION, SpectralBasis, energy_mode_norm_squared
from utils.errors import ModelError, NumericError, UsageError
from utils.logger import log_performance

logger = logging.getLogger(__name__)

L_STREAM = 31

SYMMETRY_TOLERANCE = 1e-8
KERNEL_TOLERANCE = 1e-8


class OperatorKind(str, Enum):
    """What an operator matrix represents"""

    LINEARIZED = "L"
    FREQUENCY = "nu"
    MULTIPLICATION = "v"
    MODE_GENERATOR = "G(k)"


@dataclass(frozen=True)
class OperatorMatrix:
    """
    Dense matrix ⟨e_i, A e_j⟩ on a spectral basis

    Args:
        basis: Basis the entries refer to
        entries: (size, size) real or complex matrix
        kind: Operator represented
        k: Wave vector for mode generators, axis index for multiplications
    """

    basis: SpectralBasis
    entries: np.ndarray
    kind: OperatorKind
    k: Optional[Tuple[int, ...]] = None
    _eigenvalues: Dict[str, np.ndarray] = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.basis.size
        if self.entries.shape != (n, n):
            raise UsageError(f"entries have shape {self.entries.shape}, basis has size {n}")

    @property
    def is_hermitian_kind(self) -> bool:
        return self.kind in (OperatorKind.LINEARIZED, OperatorKind.FREQUENCY, OperatorKind.MULTIPLICATION)

    def asymmetry(self) -> float:
        """‖A − Aᵀ‖ / ‖A‖ (Frobenius)"""
        scale = np.linalg.norm(self.entries)
        if scale == 0:
            return 0.0
        return float(np.linalg.norm(self.entries - self.entries.T) / scale)

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues, ascending for symmetric kinds, by decreasing real part otherwise"""
        if "values" not in self._eigenvalues:
            if self.is_hermitian_kind:
                values = np.linalg.eigvalsh(0.5 * (self.entries + self.entries.conj().T))
            else:
                values = np.linalg.eigvals(self.entries)
                values = values[np.lexsort((values.imag, -values.real))]
            self._eigenvalues["values"] = values
        return self._eigenvalues["values"]

    def spectral_abscissa(self) -> float:
        """Largest real part of the spectrum"""
        return float(np.max(np.real(self.eigenvalues())))

    def apply(self, coefficients: np.ndarray) -> np.ndarray:
        return self.entries @ coefficients

    def to_dict(self) -> Dict:
        return {"kind": self.kind.value, "k": list(self.k) if self.k is not None else None,
                "basis": self.basis.to_dict()}


@log_performance
def assemble_L(basis: SpectralBasis, quad: QuadratureSpec) -> OperatorMatrix:
    """
    ⟨e_i, L e_j⟩ from the symmetrized weak form

    ⟨e_i, L e_j⟩ = (C Z / 4) E[Φ^{1−α/2} ΔP_i ΔP_j], ΔP = P(v′)+P(v′*)−P(v)−P(v*),
    on quad.mc_samples collisions of a fixed stream. Exactly symmetric and
    nonnegative; the collision invariants are annihilated sample by sample.

    Args:
        basis: Spectral basis
        quad: Quadrature specification (mc_samples, mc_block, seed)

    Returns:
        OperatorMatrix of kind L
    """
    samples = draw_weak_form_samples(basis.params, quad.mc_samples, quad.seed, quad.mc_block, (L_STREAM,))
    entries = linearized_form_matrix(basis, samples)
    if not np.all(np.isfinite(entries)):
        raise NumericError("non-finite entries in the assembled L",
                           {"n_samples": samples.size, "basis_size": basis.size})
    matrix = OperatorMatrix(basis=basis, entries=entries, kind=OperatorKind.LINEARIZED)
    values = matrix.eigenvalues()
    scale = max(float(np.max(np.abs(values))), 1.0)
    if values[0] < -SYMMETRY_TOLERANCE * scale:
        raise NumericError("assembled L is not positive semidefinite",
                           {"min_eigenvalue": float(values[0]), "scale": scale})
    kernel_residual = float(np.max(np.abs(entries @ basis.kernel_vectors().T))) if basis.n_v >= 2 else float("nan")
    logger.info(f"Assembled L: size={basis.size}, samples={samples.size}, "
                f"kernel residual={kernel_residual:.2e}, max eigenvalue={values[-1]:.4g}")
    return matrix


def _rule_for(basis: SpectralBasis, quad: QuadratureSpec):
    return phase_rule(max(quad.n_hermite, basis.n_v + 2), max(quad.n_laguerre, basis.n_i + 2), basis.params)


@log_performance
def assemble_nu_matrix(basis: SpectralBasis, quad: QuadratureSpec) -> OperatorMatrix:
    """⟨e_i, ν e_j⟩ = E_M[ν P_i P_j] by Gauss quadrature"""
    rule = _rule_for(basis, quad)
    values = basis.evaluate(rule.v, rule.i)
    frequency = nu_values(rule.v, rule.i, basis.params, quad)
    entries = (values * (rule.weights * frequency)) @ values.T
    return OperatorMatrix(basis=basis, entries=0.5 * (entries + entries.T), kind=OperatorKind.FREQUENCY)


def k_operator_norm(Lmat: OperatorMatrix, nu_matrix: OperatorMatrix) -> float:
    """Spectral norm of K = ν − L on the Galerkin space"""
    if Lmat.basis is not nu_matrix.basis and Lmat.basis != nu_matrix.basis:
        raise UsageError("L and ν matrices refer to different bases")
    K = nu_matrix.entries - Lmat.entries
    return float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (K + K.T)))))


def kernel_dimension(Lmat: OperatorMatrix, tol: float = KERNEL_TOLERANCE) -> int:
    values = Lmat.eigenvalues()
    scale = float(np.max(np.abs(values)))
    return int(np.sum(np.abs(values) <= tol * scale))


def coercivity_gap(Lmat: OperatorMatrix, tol: float = KERNEL_TOLERANCE) -> float:
    """
    λ₀ = smallest eigenvalue of L on the orthogonal complement of ker L

    Args:
        Lmat: Operator matrix of kind L
        tol: Relative threshold below which an eigenvalue counts as zero

    Returns:
        float: λ₀ > 0
    """
    if Lmat.kind is not OperatorKind.LINEARIZED:
        raise UsageError(f"coercivity_gap needs an L matrix, got {Lmat.kind.value}")
    dimension = kernel_dimension(Lmat, tol)
    values = Lmat.eigenvalues()
    if dimension != KERNEL_DIMENSION:
        raise ModelError(
            f"kernel dimension {dimension} != {KERNEL_DIMENSION}; basis under-resolved",
            {"kernel_dimension": dimension, "smallest": [float(x) for x in values[:7]]},
        )
    return float(values[KERNEL_DIMENSION])


@dataclass(frozen=True)
class MacroCoefficients:
    """Macroscopic part P₁f = {a + b·v + c(|v|² + 2I − 3 − δ)}√M"""

    a: complex
    b: Tuple[complex, complex, complex]
    c: complex

    def reconstruct(self, basis: SpectralBasis) -> np.ndarray:
        """Coefficient vector of P₁f"""
        vectors = basis.kernel_vectors()
        weights = np.array([self.a, *self.b, self.c])
        return weights @ vectors

    def to_dict(self) -> Dict:
        def pair(z):
            z = complex(z)
            return [z.real, z.imag]
        return {"a": pair(self.a), "b": [pair(x) for x in self.b], "c": pair(self.c)}


def macro_extract(f: np.ndarray, basis: SpectralBasis) -> MacroCoefficients:
    """
    (a, b, c) of the projection of f onto ker L

    Args:
        f: Coefficient vector (real or complex)
        basis: Spectral basis

    Returns:
        MacroCoefficients
    """
    f = np.asarray(f)
    if f.shape != (basis.size,):
        raise UsageError(f"coefficient vector has shape {f.shape}, basis has size {basis.size}")
    vectors = basis.kernel_vectors()
    moments = vectors @ f
    values = [complex(x) if np.iscomplexobj(f) else float(x) for x in moments]
    return MacroCoefficients(a=values[0], b=(values[1], values[2], values[3]),
                             c=values[4] / energy_mode_norm_squared(basis.params))


def project_macro(f: np.ndarray, basis: SpectralBasis) -> np.ndarray:
    """P₁f"""
    return macro_extract(f, basis).reconstruct(basis)


def project_micro(f: np.ndarray, basis: SpectralBasis) -> np.ndarray:
    """P₂f = f − P₁f"""
    return np.asarray(f) - project_macro(f, basis)


def mode_generator(k: Sequence[int], basis: SpectralBasis, Lmat: OperatorMatrix,
                   quad: Optional[QuadratureSpec] = None) -> OperatorMatrix:
    """
    Generator G(k) = −(i k·v + L) of ∂_t f̂ = G(k) f̂

    Args:
        k: Integer wave vector (3,)
        basis: Spectral basis
        Lmat: L on the same basis
        quad: Unused; the v-multiplication entries are exact

    Returns:
        OperatorMatrix of kind G(k)
    """
    k = tuple(int(x) for x in k)
    if len(k) != 3:
        raise UsageError(f"wave vector must have 3 components, got {k}")
    if Lmat.basis != basis:
        raise UsageError("L was assembled on a different basis")
    streaming = np.zeros((basis.size, basis.size))
    for axis, component in enumerate(k):
        if component:
            streaming += component * basis.multiplication_matrix(axis)
    entries = -(1j * streaming + Lmat.entries)
    return OperatorMatrix(basis=basis, entries=entries, kind=OperatorKind.MODE_GENERATOR, k=k)


def _nu_minus_k_entries(basis: SpectralBasis, quad: QuadratureSpec, entries: Sequence[Tuple[int, int]],
                        n_v_nodes: int, n_i_nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """⟨e_i, (ν − K) e_j⟩ on one Gauss phase rule, with the excluded-ball bound of each entry"""
    params: ModelParams = basis.params
    rule = phase_rule(n_v_nodes, n_i_nodes, params)
    columns = sorted({j for _, j in entries})
    P_nodes = basis.evaluate(rule.v, rule.i)
    root_nodes = np.exp(0.5 * log_maxwellian_values(rule.v, rule.i, params))
    frequency = nu_values(rule.v, rule.i, params, quad)

    k_applied = {j: np.empty(len(rule.i)) for j in columns}
    ball = {j: np.empty(len(rule.i)) for j in columns}
    for node in range(len(rule.i)):
        grid = outer_grid(rule.v[node], params, quad)
        kernel = k_values(rule.v[node], rule.i[node], grid.v_star, grid.i_star, params, quad)
        partner = basis.functions(grid.v_star, grid.i_star)
        for j in columns:
            k_applied[j][node] = float(np.sum(kernel * partner[j] * grid.weights))
            ball[j][node] = ball_error_estimate(grid, kernel * partner[j], quad)

    values, ball_errors = [], []
    for i, j in entries:
        # ∫ e_i g = E_M[P_i g / √M]
        integrand = P_nodes[i] * (frequency * P_nodes[j] * root_nodes - k_applied[j]) / root_nodes
        values.append(float(np.sum(rule.weights * integrand)))
        ball_errors.append(float(np.sum(rule.weights * np.abs(P_nodes[i]) * ball[j] / root_nodes)))
    return np.array(values), np.array(ball_errors)


@log_performance
def cross_validate_entries(basis: SpectralBasis, Lmat: OperatorMatrix, quad: QuadratureSpec,
                           entries: Sequence[Tuple[int, int]], weak_form_quad: Optional[QuadratureSpec] = None,
                           n_sigma: float = 3.0, rtol: float = 1e-3) -> List[Dict[str, Any]]:
    """
    Compare selected entries of L with ⟨e_i, (ν − K) e_j⟩

    The outer integral uses the Gauss phase rule with n_v + 1 Hermite and
    n_i + 1 Laguerre nodes, exact for the polynomial part P_i P_j, and is
    repeated with one more node per axis to estimate its error. (K e_j) is
    evaluated at each node on the spherical partner grid of the kernel module.
    An entry agrees when

        |difference| ≤ n_sigma · (Monte Carlo error of the weak form)
                       + quadrature error + excluded-ball bound + rtol · |L_ij|

    Args:
        basis: Spectral basis of Lmat
        Lmat: Weak-form L
        quad: Quadrature for ν and the partner grid
        entries: (i, j) pairs to compare
        weak_form_quad: Quadrature Lmat was assembled with (defaults to quad)
        n_sigma: Standard errors allowed for the weak form
        rtol: Relative allowance for the partner-grid quadrature

    Returns:
        list of dicts with i, j, weak_form, nu_minus_k, difference, mc_error,
        quadrature_error, ball_error, tolerance, agrees
    """
    if Lmat.basis != basis:
        raise UsageError("Lmat was assembled on a different basis")
    n_v_nodes, n_i_nodes = basis.n_v + 1, basis.n_i + 1
    values, ball_errors = _nu_minus_k_entries(basis, quad, entries, n_v_nodes, n_i_nodes)
    refined, _ = _nu_minus_k_entries(basis, quad, entries, n_v_nodes + 1, n_i_nodes + 1)

    sampled = weak_form_quad or quad
    samples = draw_weak_form_samples(basis.params, sampled.mc_samples, sampled.seed, sampled.mc_block, (L_STREAM,))
    mc_errors = linearized_form_errors(basis, samples, entries)

    report = []
    for (i, j), value, fine, ball, mc_error in zip(entries, values, refined, ball_errors, mc_errors):
        weak = float(Lmat.entries[i, j])
        difference = abs(weak - value)
        quadrature_error = abs(fine - value)
        tolerance = n_sigma * float(mc_error) + quadrature_error + ball + rtol * abs(weak)
        report.append({"i": int(i), "j": int(j), "weak_form": weak, "nu_minus_k": float(value),
                       "difference": difference, "mc_error": float(mc_error),
                       "quadrature_error": quadrature_error, "ball_error": float(ball),
                       "tolerance": tolerance, "agrees": bool(difference <= tolerance)})
        logger.info(f"L[{i},{j}]: weak form {weak:.5g}, nu - K {value:.5g}, tolerance {tolerance:.3g}")
    return report
