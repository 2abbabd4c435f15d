"""
Compensator and Lyapunov Functional

The interactive functional E^int(f̂) couples the macroscopic coefficients
(â, b̂, ĉ) of a Fourier mode with the moments of its microscopic part
P₂f̂ against

    p_ij = (v_i v_j − δ_ij)√M,    p_i = (|v|² + 2I − 5 − δ) v_i √M.

Its time derivative along ∂_t f̂ = G(k) f̂ recovers dissipation of the
macroscopic part, which L alone does not see. E(f̂) = ‖f̂‖² + ε Re E^int(f̂)
is then a strict Lyapunov functional for ε small enough.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from linearized.basis import SpectralBasis, energy_mode_norm_squared
from linearized.operator import OperatorKind, OperatorMatrix
from utils.errors import NumericError, UsageError

logger = logging.getLogger(__name__)

MIN_WEIGHT = 2.0 ** -30


@dataclass(frozen=True)
class MomentVectors:
    """Coefficient vectors of the macroscopic functionals and the moment functions"""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    p_ij: np.ndarray
    p_i: np.ndarray
    micro: np.ndarray


def moment_vectors(basis: SpectralBasis) -> MomentVectors:
    """
    Linear functionals of f̂ used by the compensator

    Returns:
        MomentVectors: a (size,), b (3, size), c (size,), p_ij (3, 3, size),
        p_i (3, size) already composed with P₂, and the P₂ matrix itself
    """
    if basis.n_v < 3 or basis.n_i < 1:
        raise UsageError(f"compensator moments need n_v >= 3 and n_i >= 1, got n_v={basis.n_v}, n_i={basis.n_i}")
    delta = basis.params.delta
    kernel = basis.kernel_vectors()
    orthonormal = basis.kernel_basis()
    micro = np.eye(basis.size) - orthonormal.T @ orthonormal

    p_ij = np.empty((3, 3, basis.size))
    for i in range(3):
        for j in range(3):
            shift = 1.0 if i == j else 0.0
            p_ij[i, j] = basis.project_polynomial(lambda v, e, i=i, j=j, s=shift: v[:, i] * v[:, j] - s)
    p_i = np.array([
        basis.project_polynomial(lambda v, e, i=i: (np.sum(v * v, axis=1) + 2 * e - 5 - delta) * v[:, i])
        for i in range(3)
    ])
    return MomentVectors(
        a=kernel[0],
        b=kernel[1:4],
        c=kernel[4] / energy_mode_norm_squared(basis.params),
        p_ij=p_ij @ micro,
        p_i=p_i @ micro,
        micro=micro,
    )


def compensator_functional(fhat: np.ndarray, k: Sequence[int], basis: SpectralBasis,
                           moments: Optional[MomentVectors] = None) -> float:
    """
    Re E^int(f̂) for one Fourier mode

    E^int = Σ_ij ⟨ik_i b̂_j + ik_j b̂_i, (P₂f̂, p_ij) + 2ĉδ_ij⟩
            + Σ_i ⟨ik_i â, b̂_i⟩ + Σ_i ⟨ik_i ĉ, (P₂f̂, p_i)⟩,  ⟨x, y⟩ = x ȳ

    Args:
        fhat: Complex coefficient vector
        k: Wave vector
        basis: Spectral basis
        moments: Precomputed moment_vectors(basis)

    Returns:
        float: Re E^int(f̂)
    """
    moments = moments or moment_vectors(basis)
    fhat = np.asarray(fhat, dtype=complex)
    k = np.asarray(k, dtype=float)
    a = moments.a @ fhat
    b = moments.b @ fhat
    c = moments.c @ fhat
    stress = moments.p_ij @ fhat
    flux = moments.p_i @ fhat

    total = 0j
    for i in range(3):
        for j in range(3):
            left = 1j * (k[i] * b[j] + k[j] * b[i])
            right = stress[i, j] + (2 * c if i == j else 0)
            total += left * np.conj(right)
        total += 1j * k[i] * a * np.conj(b[i])
        total += 1j * k[i] * c * np.conj(flux[i])
    return float(total.real)


def compensator_matrix(k: Sequence[int], basis: SpectralBasis, moments: Optional[MomentVectors] = None) -> np.ndarray:
    """
    Hermitian H with Re E^int(f̂) = f̂ᴴ H f̂

    Each block ⟨i κ x, y⟩ with x = αᵀf̂, y = βᵀf̂ contributes f̂ᴴ (iκ β αᵀ) f̂.
    """
    moments = moments or moment_vectors(basis)
    k = np.asarray(k, dtype=float)
    B = np.zeros((basis.size, basis.size), dtype=complex)
    for i in range(3):
        for j in range(3):
            left = k[i] * moments.b[j] + k[j] * moments.b[i]
            right = moments.p_ij[i, j] + (2 * moments.c if i == j else 0)
            B += 1j * np.outer(right, left)
        B += 1j * k[i] * np.outer(moments.b[i], moments.a)
        B += 1j * k[i] * np.outer(moments.p_i[i], moments.c)
    return 0.5 * (B + B.conj().T)


@dataclass(frozen=True)
class LyapunovWeight:
    """Compensator weight ε and the certified properties of E = ‖f̂‖² + ε Re E^int"""

    eps: float
    c1: float
    c2: float
    rate: float

    def functional(self, fhat: np.ndarray, H: np.ndarray) -> float:
        fhat = np.asarray(fhat, dtype=complex)
        return float(np.real(np.vdot(fhat, fhat) + self.eps * np.vdot(fhat, H @ fhat)))

    def to_dict(self) -> Dict[str, float]:
        return {"eps": self.eps, "c1": self.c1, "c2": self.c2, "rate": self.rate}


def lyapunov_weight(G: OperatorMatrix, H: np.ndarray, eps0: float = 1.0) -> LyapunovWeight:
    """
    Largest ε = eps0·2^{−n} for which E is equivalent to ‖f̂‖² and strictly decays

    With A = I + εH the conditions are A ≥ ½ I and
    A^{−1/2}(GᴴA + AG)A^{−1/2} < 0; the decay rate is minus the largest
    eigenvalue of that matrix, so ∂_t E ≤ −rate·E.

    Args:
        G: Mode generator G(k)
        H: compensator_matrix(k, basis)
        eps0: First weight tried

    Returns:
        LyapunovWeight
    """
    if G.kind is not OperatorKind.MODE_GENERATOR:
        raise UsageError(f"lyapunov_weight needs a mode generator, got {G.kind.value}")
    generator = G.entries
    identity = np.eye(G.basis.size)
    eps = eps0
    while eps >= MIN_WEIGHT:
        A = identity + eps * H
        values, vectors = np.linalg.eigh(A)
        if values[0] >= 0.5:
            inv_root = (vectors / np.sqrt(values)) @ vectors.conj().T
            D = generator.conj().T @ A + A @ generator
            D = inv_root @ D @ inv_root
            top = float(np.max(np.linalg.eigvalsh(0.5 * (D + D.conj().T))))
            if top < 0:
                weight = LyapunovWeight(eps=eps, c1=float(values[0]), c2=float(values[-1]), rate=-top)
                logger.info(f"Lyapunov weight for k={G.k}: eps={eps:.3g}, rate={weight.rate:.4g}")
                return weight
        eps /= 2
    raise NumericError("no compensator weight makes the Lyapunov functional decay", {"k": G.k, "min_eps": MIN_WEIGHT})
