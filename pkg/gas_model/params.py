"""
Model Parameters and Phase Points

Physical constants of the polyatomic collision model and the kinetic state types.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Tuple

import numpy as np
from scipy import special

from utils.errors import DomainError


@dataclass(frozen=True)
class ModelParams:
    """
    Constants of the polyatomic model

    Args:
        delta: Internal degrees of freedom (δ ≥ 2)
        alpha: Potential exponent (α ∈ [0, 2])
        c_sigma: Cross-section constant C > 0
        beta: Exponent of the polynomial weight w (β > 5)
    """

    delta: float = 2.0
    alpha: float = 1.0
    c_sigma: float = 1.0
    beta: float = 6.0

    def __post_init__(self):
        for name in ("delta", "alpha", "c_sigma", "beta"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite real number, got {value!r}")
        if self.delta < 2:
            raise DomainError(f"delta must be >= 2, got {self.delta}")
        if not 0 <= self.alpha <= 2:
            raise DomainError(f"alpha must lie in [0, 2], got {self.alpha}")
        if self.c_sigma <= 0:
            raise DomainError(f"c_sigma must be positive, got {self.c_sigma}")
        if self.beta <= 5:
            raise DomainError(f"beta must be > 5, got {self.beta}")

    @property
    def laguerre_parameter(self) -> float:
        """Exponent δ/2 − 1 of the internal-energy measure"""
        return self.delta / 2 - 1

    @property
    def kinetic_exponent(self) -> float:
        """Exponent 1 − α/2 of Φ in the cross section"""
        return 1 - self.alpha / 2

    @property
    def log_maxwellian_constant(self) -> float:
        """log of 1/((2π)^{3/2} Γ(δ/2))"""
        return -1.5 * math.log(2 * math.pi) - special.gammaln(self.delta / 2)

    @property
    def measure_mass(self) -> float:
        """Total mass Z(δ) of the (ω, R, r) collision measure"""
        return 4 * math.pi * special.beta(1.5, self.delta) * special.beta(self.delta / 2, self.delta / 2)

    @property
    def collision_constant(self) -> float:
        """C·Z(δ), the prefactor of every sampled collision integral"""
        return self.c_sigma * self.measure_mass

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class PhasePoint:
    """
    One kinetic state (v, I)

    i = 0 is accepted as a boundary state (quadrature node of the collision
    measure); operations that need the open domain check i > 0 themselves.
    """

    v: Tuple[float, float, float]
    i: float
    _velocity: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        velocity = np.asarray(self.v, dtype=float).reshape(-1)
        if velocity.shape != (3,) or not np.all(np.isfinite(velocity)):
            raise DomainError(f"velocity must be a finite 3-vector, got {self.v!r}")
        if not math.isfinite(self.i) or self.i < 0:
            raise DomainError(f"internal energy must be finite and nonnegative, got {self.i!r}")
        object.__setattr__(self, "v", tuple(float(c) for c in velocity))
        object.__setattr__(self, "i", float(self.i))
        object.__setattr__(self, "_velocity", velocity)

    @property
    def velocity(self) -> np.ndarray:
        return self._velocity.copy()

    @property
    def speed(self) -> float:
        return float(np.linalg.norm(self._velocity))

    @property
    def is_interior(self) -> bool:
        return self.i > 0

    def to_dict(self) -> Dict[str, Any]:
        return {"v": list(self.v), "i": self.i}


@dataclass(frozen=True)
class DefectMoments:
    """Mass, momentum and energy (|v|²+2I weighted) of F − M"""

    mass: float
    momentum: Tuple[float, float, float]
    energy: float

    @property
    def momentum_norm(self) -> float:
        return float(np.linalg.norm(self.momentum))

    def max_abs(self) -> float:
        return max(abs(self.mass), self.momentum_norm, abs(self.energy))

    def to_dict(self) -> Dict[str, Any]:
        return {"mass": self.mass, "momentum": list(self.momentum), "energy": self.energy}
