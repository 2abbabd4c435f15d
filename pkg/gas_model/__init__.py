"""
Gas Model Module

Model parameters, phase space, equilibrium Maxwellian, weight, exact moment
table, quadrature engine and sampled distribution grids.
"""

from .equilibrium import (
    Moment,
    entropy_maxwellian,
    gamma_fn,
    maxwellian,
    maxwellian_values,
    moment_identity,
    moment_matched_maxwellian,
    reduced_maxwellian_values,
    weight,
    weight_values,
)
from .grid import DistributionGrid, GridQuantity, defect_moments, leaked_mass
from .params import DefectMoments, ModelParams, PhasePoint
from .quadrature import PhaseRule, QuadratureSpec, phase_rule

__all__ = [
    'ModelParams', 'PhasePoint', 'DefectMoments', 'QuadratureSpec', 'PhaseRule', 'phase_rule',
    'DistributionGrid', 'GridQuantity', 'defect_moments', 'leaked_mass',
    'maxwellian', 'maxwellian_values', 'reduced_maxwellian_values', 'weight', 'weight_values',
    'gamma_fn', 'Moment', 'moment_identity', 'moment_matched_maxwellian', 'entropy_maxwellian',
]
