"""Half-cell microstructure generation, microscopic electrochemistry, and model order reduction.

Subpackages
-----------
microgen   stochastic voxel microstructures with a plated-lithium surface phase
echem      transport/kinetics closures and the interface-condition table
fvm        cell-centered finite-volume model, implicit Euler + Newton
mor        POD / empirical-interpolation reduced-order models and error estimation
workflow   configuration, study orchestration, reporting, CLI
"""

from .errors import (
    ConfigError,
    DomainError,
    GeometryError,
    HalfcellError,
    ModelError,
    NonConvergence,
    NumericsError,
    ReductionError,
    SimulationError,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "GeometryError",
    "HalfcellError",
    "ModelError",
    "NonConvergence",
    "NumericsError",
    "ReductionError",
    "SimulationError",
]

__version__ = "0.1.0"
