"""
Collision Module

Borgnakke-Larsen post-collision map, cross section, sampled Q and Γ, the
symmetrized weak form and the entropy functional.
"""

from .distributions import (
    MaxwellianDistribution,
    MaxwellianProductDistribution,
    PhaseDistribution,
    ReducedFunctionDistribution,
)
from .entropy import entropy_density, entropy_h
from .operator import (
    CollisionEstimate,
    CollisionPair,
    CollisionParams,
    PostCollisionState,
    collision_invariant_residuals,
    cross_section_b,
    gamma_apply,
    post_collision,
    post_collision_arrays,
    q_apply,
    sweep_q,
    total_energy_phi,
)
from .sampling import PartnerProposal, stream
from .weak_form import (
    WeakFormProjection,
    WeakFormSamples,
    collision_coefficients,
    draw_weak_form_samples,
    linearized_form_errors,
    linearized_form_matrix,
)

__all__ = [
    'PhaseDistribution', 'MaxwellianDistribution', 'MaxwellianProductDistribution', 'ReducedFunctionDistribution',
    'CollisionPair', 'CollisionParams', 'PostCollisionState', 'CollisionEstimate',
    'total_energy_phi', 'cross_section_b', 'post_collision', 'post_collision_arrays',
    'q_apply', 'gamma_apply', 'sweep_q', 'collision_invariant_residuals',
    'entropy_h', 'entropy_density', 'PartnerProposal', 'stream',
    'WeakFormSamples', 'WeakFormProjection', 'draw_weak_form_samples',
    'collision_coefficients', 'linearized_form_matrix', 'linearized_form_errors',
]
