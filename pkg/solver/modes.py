"""
Linear Mode Evolution

Per-Fourier-mode Galerkin evolution ∂_t f̂ = G(k) f̂ with the matrix
exponential, the fitted decay rate and the Lyapunov functional along the
trajectory.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.sparse.linalg import expm_multiply

from linearized.basis import KERNEL_DIMENSION, SpectralBasis
from linearized.compensator import compensator_matrix, lyapunov_weight
from linearized.operator import OperatorMatrix, mode_generator
from utils.errors import PreconditionError, UsageError

logger = logging.getLogger(__name__)

DEFECT_TOLERANCE = 1e-10


@dataclass(frozen=True)
class ModeDecayRecord:
    """
    Trajectory summary of one Fourier mode

    Args:
        k: Wave vector
        times: Sample times
        norms: ‖f̂(t)‖
        energies: E(f̂(t)) = ‖f̂‖² + ε Re E^int(f̂)
        lambda_fit: Decay rate fitted to log ‖f̂‖ over the second half
        spectral_abscissa: Largest real part of the relevant spectrum of G(k)
        eps: Compensator weight (0 without compensator)
        certified_rate: Decay rate of E certified by the weight search
    """

    k: tuple
    times: np.ndarray
    norms: np.ndarray
    energies: np.ndarray
    lambda_fit: float
    spectral_abscissa: float
    eps: float
    certified_rate: Optional[float]

    @property
    def relative_rate_error(self) -> float:
        """|λ_fit + abscissa| / |abscissa|"""
        target = -self.spectral_abscissa
        if target == 0:
            return float("inf")
        return abs(self.lambda_fit - target) / abs(target)

    def energy_monotone(self, rtol: float = 1e-9) -> bool:
        steps = np.diff(self.energies)
        return bool(np.all(steps <= rtol * self.energies[0]))

    def norm_monotone_after(self, transient: float, rtol: float = 1e-9) -> bool:
        """‖f̂‖ non-increasing on t ≥ transient"""
        late = self.norms[self.times >= transient]
        return bool(np.all(np.diff(late) <= rtol * self.norms[0]))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.times, "norm": self.norms, "lyapunov": self.energies})

    def to_dict(self) -> Dict:
        return {
            "k": list(self.k),
            "lambda_fit": self.lambda_fit,
            "spectral_abscissa": self.spectral_abscissa,
            "eps": self.eps,
            "certified_rate": self.certified_rate,
            "initial_norm": float(self.norms[0]),
            "final_norm": float(self.norms[-1]),
        }


def fitted_decay_rate(times: np.ndarray, norms: np.ndarray) -> float:
    """−slope of log ‖f̂‖ against t over the second half of the window"""
    half = len(times) // 2
    late_t, late_norm = times[half:], norms[half:]
    positive = late_norm > 0
    if np.count_nonzero(positive) < 2:
        return float("inf")
    slope, _ = np.polyfit(late_t[positive], np.log(late_norm[positive]), 1)
    return float(-slope)


def relevant_abscissa(G: OperatorMatrix, Lmat: OperatorMatrix) -> float:
    """Spectral abscissa of G(k); at k = 0 the kernel is excluded and −λ₀ is returned"""
    if any(G.k):
        return G.spectral_abscissa()
    return -float(Lmat.eigenvalues()[KERNEL_DIMENSION])


def linear_mode_evolve(k: Sequence[int], fhat0: np.ndarray, t_end: float, basis: SpectralBasis,
                       Lmat: OperatorMatrix, n_times: int = 81, with_compensator: bool = True) -> ModeDecayRecord:
    """
    Integrate d f̂/dt = G(k) f̂ on [0, t_end]

    Args:
        k: Integer wave vector
        fhat0: Initial coefficient vector
        t_end: Final time
        basis: Spectral basis
        Lmat: L on the basis
        n_times: Number of equally spaced sample times
        with_compensator: Track the Lyapunov functional with a certified weight (k ≠ 0, n_v ≥ 3)

    Returns:
        ModeDecayRecord
    """
    fhat0 = np.asarray(fhat0, dtype=complex)
    if fhat0.shape != (basis.size,):
        raise UsageError(f"initial mode has shape {fhat0.shape}, basis has size {basis.size}")
    if t_end <= 0 or n_times < 4:
        raise UsageError(f"need t_end > 0 and n_times >= 4, got t_end={t_end}, n_times={n_times}")
    initial_norm = float(np.linalg.norm(fhat0))
    if initial_norm == 0:
        raise UsageError("initial mode is zero")

    G = mode_generator(k, basis, Lmat)
    if not any(G.k):
        defects = basis.kernel_vectors() @ fhat0
        if np.max(np.abs(defects)) > DEFECT_TOLERANCE * initial_norm:
            raise PreconditionError(f"k = 0 mode carries defect moments {np.abs(defects).max():.3e}; no decay to claim")

    times = np.linspace(0.0, t_end, n_times)
    trajectory = expm_multiply(G.entries, fhat0, start=0.0, stop=t_end, num=n_times, endpoint=True)
    norms = np.linalg.norm(trajectory, axis=1)
    norms[0] = initial_norm

    eps, certified = 0.0, None
    energies = norms ** 2
    if with_compensator and any(G.k) and basis.n_v >= 3:
        H = compensator_matrix(G.k, basis)
        weight = lyapunov_weight(G, H)
        eps, certified = weight.eps, weight.rate
        energies = np.array([weight.functional(f, H) for f in trajectory])

    record = ModeDecayRecord(
        k=G.k,
        times=times,
        norms=norms,
        energies=energies,
        lambda_fit=fitted_decay_rate(times, norms),
        spectral_abscissa=relevant_abscissa(G, Lmat),
        eps=eps,
        certified_rate=certified,
    )
    logger.info(f"mode k={G.k}: lambda_fit={record.lambda_fit:.4g}, abscissa={record.spectral_abscissa:.4g}, eps={eps:.3g}")
    return record
