"""
Linearized Module

Galerkin discretization of L in a Hermite-Laguerre basis, kernel projections,
coercivity constant, mode generators and the compensator functional.
"""

from .basis import KERNEL_DIMENSION, SpectralBasis, TensorExpansion, build_basis, energy_mode_norm_squared
from .compensator import (
    LyapunovWeight,
    MomentVectors,
    compensator_functional,
    compensator_matrix,
    lyapunov_weight,
    moment_vectors,
)
from .operator import (
    MacroCoefficients,
    OperatorKind,
    OperatorMatrix,
    assemble_L,
    assemble_nu_matrix,
    coercivity_gap,
    cross_validate_entries,
    k_operator_norm,
    kernel_dimension,
    macro_extract,
    mode_generator,
    project_macro,
    project_micro,
)

__all__ = [
    'SpectralBasis', 'TensorExpansion', 'build_basis', 'energy_mode_norm_squared', 'KERNEL_DIMENSION',
    'OperatorKind', 'OperatorMatrix', 'MacroCoefficients', 'assemble_L', 'assemble_nu_matrix',
    'coercivity_gap', 'kernel_dimension', 'k_operator_norm', 'macro_extract', 'project_macro',
    'project_micro', 'mode_generator', 'cross_validate_entries',
    'MomentVectors', 'moment_vectors', 'compensator_functional', 'compensator_matrix',
    'LyapunovWeight', 'lyapunov_weight',
]
