"""
Solver Module

Picard approximation sequence, homogeneous relaxation, linear mode
evolution and the torus mild-form stepper.
"""

from .modes import ModeDecayRecord, fitted_decay_rate, linear_mode_evolve, relevant_abscissa
from .picard import IterationReport, PicardSolver, picard_iterate, t1_horizon, time_integration
from .relaxation import (
    TRAJECTORY_COLUMNS,
    HomogeneousRelaxation,
    RelaxationTrajectory,
    bimodal_initial_grid,
    bimodal_initial_state,
    equilibrium_initial_state,
    homogeneous_relax,
)
from .torus import (
    TorusMildStepper,
    TorusStep,
    TorusTrajectory,
    periodic_shift,
    small_data_initial_state,
    torus_mild_step,
)

__all__ = [
    't1_horizon', 'IterationReport', 'PicardSolver', 'picard_iterate', 'time_integration',
    'homogeneous_relax', 'HomogeneousRelaxation', 'RelaxationTrajectory', 'TRAJECTORY_COLUMNS',
    'bimodal_initial_state', 'bimodal_initial_grid', 'equilibrium_initial_state',
    'linear_mode_evolve', 'ModeDecayRecord', 'fitted_decay_rate', 'relevant_abscissa',
    'torus_mild_step', 'TorusMildStepper', 'TorusStep', 'TorusTrajectory', 'periodic_shift',
    'small_data_initial_state',
]
