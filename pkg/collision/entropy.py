"""
Entropy Functional
"""

import numpy as np

from gas_model.grid import DistributionGrid
from gas_model.params import ModelParams
from utils.errors import DomainError, UsageError


def entropy_density(F: np.ndarray, i: np.ndarray, params: ModelParams) -> np.ndarray:
    """F log(F / I^{δ/2−1}) on nodal arrays"""
    a = params.laguerre_parameter
    log_reduced = np.log(F)
    if a != 0:
        log_reduced = log_reduced - a * np.log(i)
    return F * log_reduced


def entropy_h(F: DistributionGrid, params: ModelParams) -> float:
    """
    H(F) = ∫ F log(F / I^{δ/2−1}) dv dI (and dx on a lattice)

    Args:
        F: Distribution grid
        params: Model parameters (must be the grid's)

    Returns:
        float: H value
    """
    if F.params != params:
        raise UsageError(f"grid was built for {F.params}, called with {params}")
    values = F.distribution()
    if np.any(values <= 0):
        count = int(np.sum(values <= 0))
        raise DomainError(f"entropy requires F > 0; {count} nonpositive node values (min {values.min():.3e})")
    return F.integrate(entropy_density(values, F.i_nodes, params))
