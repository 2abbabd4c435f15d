"""
Evaluable Distributions

The collision integrals evaluate distributions at arbitrary post-collision
states, including boundary states I′ = 0. Every distribution therefore
exposes its reduced form F / I^{δ/2−1}, which is finite up to I = 0.
"""

from abc import ABC, abstractmethod
from typing import Callable

import numpy as np

from gas_model.equilibrium import reduced_maxwellian_values
from gas_model.params import ModelParams
from utils.errors import UsageError

PhaseFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


class PhaseDistribution(ABC):
    """Distribution F(v, I) evaluable on arrays of phase points"""

    def __init__(self, params: ModelParams):
        self.params = params

    @abstractmethod
    def reduced(self, v: np.ndarray, i: np.ndarray) -> np.ndarray:
        """F(v, I) / I^{δ/2−1}"""
        pass

    def __call__(self, v: np.ndarray, i: np.ndarray) -> np.ndarray:
        a = self.params.laguerre_parameter
        values = self.reduced(v, i)
        if a == 0:
            return values
        return values * np.asarray(i, dtype=float) ** a


class MaxwellianDistribution(PhaseDistribution):
    """The global equilibrium M"""

    def reduced(self, v, i):
        return reduced_maxwellian_values(v, i, self.params)


class MaxwellianProductDistribution(PhaseDistribution):
    """F = M·h for a callable h(v, I) (polynomial expansions, perturbations)"""

    def __init__(self, params: ModelParams, factor: PhaseFunction):
        super().__init__(params)
        self.factor = factor

    def reduced(self, v, i):
        return reduced_maxwellian_values(v, i, self.params) * self.factor(v, i)


class ReducedFunctionDistribution(PhaseDistribution):
    """F = I^{δ/2−1}·φ(v, I) for a callable φ given directly"""

    def __init__(self, params: ModelParams, reduced_fn: PhaseFunction):
        super().__init__(params)
        self.reduced_fn = reduced_fn

    def reduced(self, v, i):
        return self.reduced_fn(v, i)


def ensure_distribution(candidate, params: ModelParams) -> PhaseDistribution:
    """Check that the argument can be evaluated by the collision integrals"""
    if not isinstance(candidate, PhaseDistribution):
        raise UsageError(
            f"{type(candidate).__name__} is not evaluable at arbitrary phase points; "
            "wrap it in a PhaseDistribution"
        )
    if candidate.params != params:
        raise UsageError(f"distribution built for {candidate.params}, called with {params}")
    return candidate


def ensure_phase_function(candidate) -> PhaseFunction:
    """Perturbations passed to Γ must be callables of (v, I)"""
    if not callable(candidate):
        raise UsageError(f"{type(candidate).__name__} is not a callable of (v, I)")
    return candidate
