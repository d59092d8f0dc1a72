"""Stochastic voxel microstructures for half-cells with a plated-lithium phase."""

from .config import DEFAULT_POWER_COEFFS, GenConfig, RadiusLaw, angular_power_spectrum
from .connectivity import ConnectivityGraph, build_connectivity, minimum_spanning_tree
from .generate import GenerationResult, generate, generate_detailed
from .io import load_geometry, load_sidecar, save_geometry, save_sidecar
from .laguerre import LaguerreDiagram, build_laguerre
from .packing import SeedSphere, SlabRegion, pack_spheres
from .particles import (
    ParticleField,
    coefficient_variances,
    real_sph_harm_matrix,
    sample_coefficients,
    sample_particle,
)
from .phases import Phase, PhaseGrid
from .plating import plate_germs, sample_germs
from .rasterize import morphological_close, rasterize_and_smooth, rasterize_particles

__all__ = [
    "DEFAULT_POWER_COEFFS",
    "GenConfig",
    "RadiusLaw",
    "angular_power_spectrum",
    "ConnectivityGraph",
    "build_connectivity",
    "minimum_spanning_tree",
    "GenerationResult",
    "generate",
    "generate_detailed",
    "load_geometry",
    "load_sidecar",
    "save_geometry",
    "save_sidecar",
    "LaguerreDiagram",
    "build_laguerre",
    "SeedSphere",
    "SlabRegion",
    "pack_spheres",
    "ParticleField",
    "coefficient_variances",
    "real_sph_harm_matrix",
    "sample_coefficients",
    "sample_particle",
    "Phase",
    "PhaseGrid",
    "plate_germs",
    "sample_germs",
    "morphological_close",
    "rasterize_and_smooth",
    "rasterize_particles",
]
