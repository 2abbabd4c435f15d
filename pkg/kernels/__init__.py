"""
Frequency and Kernel Module

Collision frequency ν, the kernels k₁, k₂, k and k_w, the operator K and
the brute-force Monte Carlo oracles used to certify them.
"""

from .frequency import MonteCarloValue, nu, nu_bound_ratio, nu_bound_ratios, nu_monte_carlo, nu_values
from .kernels import (
    KernelIntegral,
    KernelPoint,
    K_apply,
    K_apply_estimate,
    K_apply_sweep,
    k1,
    k1_bound_envelope,
    k1_envelope_values,
    k1_monte_carlo,
    k1_values,
    k2,
    k2_monte_carlo,
    k2_values,
    k_values,
    kw,
    kw_weighted_integral,
    outer_grid,
)

__all__ = [
    'MonteCarloValue', 'nu', 'nu_values', 'nu_monte_carlo', 'nu_bound_ratio', 'nu_bound_ratios',
    'KernelPoint', 'KernelIntegral', 'k1', 'k1_values', 'k1_bound_envelope', 'k1_envelope_values',
    'k1_monte_carlo', 'k2', 'k2_values', 'k2_monte_carlo', 'k_values', 'kw', 'kw_weighted_integral',
    'K_apply', 'K_apply_estimate', 'K_apply_sweep', 'outer_grid',
]
