"""Cell-centered finite-volume model: DOFs, operator, Newton, time stepping, QoIs."""

from .dofmap import Dofmap, build_dofmap
from .newton import NewtonResult, SolverConfig, newton_solve, solve_initial_potential
from .operator import BoundaryDrive, RestrictedSubOperator, SubOperatorView, SystemOperator
from .qoi import qoi_cell_voltage, qoi_mean_solid_conc, qoi_vectors
from .state import CellState, initial_fields
from .timestepping import StepInfo, Trajectory, prepare_initial_state, run_transient, step

__all__ = [
    "Dofmap",
    "build_dofmap",
    "NewtonResult",
    "SolverConfig",
    "newton_solve",
    "solve_initial_potential",
    "BoundaryDrive",
    "RestrictedSubOperator",
    "SubOperatorView",
    "SystemOperator",
    "qoi_cell_voltage",
    "qoi_mean_solid_conc",
    "qoi_vectors",
    "CellState",
    "initial_fields",
    "StepInfo",
    "Trajectory",
    "prepare_initial_state",
    "run_transient",
    "step",
]
