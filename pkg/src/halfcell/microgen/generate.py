"""End-to-end stochastic generation of a voxelized half-cell."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import GeometryError
from .config import GenConfig
from .connectivity import ConnectivityGraph, build_connectivity
from .laguerre import LaguerreDiagram, build_laguerre
from .packing import SlabRegion, pack_spheres
from .particles import ParticleField, sample_particle
from .phases import Phase, PhaseGrid
from .plating import plate_germs
from .rasterize import rasterize_and_smooth

log = logging.getLogger(__name__)

#: Extra contact radius (in voxels) so that touching survives voxelization.
CONTACT_OVERLAP_VOXELS = 0.5


@dataclass
class GenerationResult:
    """Full pipeline output: the grid plus the auxiliary construction stages."""

    grid: PhaseGrid
    diagram: LaguerreDiagram
    graph: ConnectivityGraph
    particles: list[ParticleField]


def _contact_constraints(diagram: LaguerreDiagram, graph: ConnectivityGraph,
                         mean_radii: np.ndarray, voxel_size: float):
    """Per-cell (direction, required radius) pairs from the connectivity edges.

    The contact point of an edge is the intersection of the seeds' radical
    plane with the line between their centers; each particle must reach it
    (plus half a voxel of overlap). Edges whose contact point falls outside
    the segment or demands more than twice a mean radius are skipped; the
    final structure's connectivity is verified downstream instead.
    """
    constraints: dict[int, list[tuple[np.ndarray, float]]] = {i: [] for i in range(diagram.n_cells)}
    margin = CONTACT_OVERLAP_VOXELS * voxel_size
    for i, j in sorted(graph.edges):
        ci = np.asarray(diagram.seeds[i].center)
        cj = np.asarray(diagram.seeds[j].center)
        d = np.linalg.norm(cj - ci)
        if d < 1e-12:
            continue
        ri, rj = diagram.seeds[i].radius, diagram.seeds[j].radius
        u = 0.5 * (1.0 + (ri * ri - rj * rj) / (d * d))
        if not 0.05 < u < 0.95:
            log.debug("edge (%d,%d): contact point off segment, skipped", i, j)
            continue
        xc = ci + u * (cj - ci)
        req_i = np.linalg.norm(xc - ci) + margin
        req_j = np.linalg.norm(xc - cj) + margin
        if req_i > 2.0 * mean_radii[i] or req_j > 2.0 * mean_radii[j]:
            log.debug("edge (%d,%d): contact radius infeasible, skipped", i, j)
            continue
        constraints[i].append(((xc - ci) / np.linalg.norm(xc - ci), req_i))
        constraints[j].append(((xc - cj) / np.linalg.norm(xc - cj), req_j))
    return constraints


def _prune_disconnected_graphite(labels: np.ndarray, z_contact: int) -> np.ndarray:
    """Convert graphite not 6-connected to the working collector into electrolyte."""
    gr = labels == Phase.GRAPHITE
    struct = ndimage.generate_binary_structure(3, 1)
    comp, n = ndimage.label(gr, structure=struct)
    if n == 0:
        raise GeometryError("generation produced no graphite")
    touching = np.unique(comp[z_contact][comp[z_contact] > 0])
    if touching.size == 0:
        raise GeometryError("no graphite component touches the working collector")
    keep = np.isin(comp, touching)
    out = labels.copy()
    out[gr & ~keep] = Phase.ELECTROLYTE
    return out


def generate(cfg: GenConfig) -> PhaseGrid:
    """Generate one half-cell microstructure; see :func:`generate_detailed`."""
    return generate_detailed(cfg).grid


def generate_detailed(cfg: GenConfig) -> GenerationResult:
    """Run the four-step construction and assemble the full half-cell grid.

    Steps: sphere packing, Laguerre tessellation, connectivity graph,
    conditioned particle sampling, rasterization with smoothing, slab
    assembly, germ-grain plating. Deterministic per ``cfg.rng_seed``.
    """
    cfg.validate()
    nx, ny, nz = cfg.grid_dims
    h = cfg.voxel_size
    layout = cfg.layer_voxels()

    seed_seq = np.random.SeedSequence(cfg.rng_seed)
    ss_pack, ss_conn, ss_part, ss_plate = seed_seq.spawn(4)

    z_e0, z_e1 = layout["electrode"]
    region = SlabRegion((0.0, 0.0, z_e0 * h), (nx * h, ny * h, z_e1 * h))
    seeds = pack_spheres(cfg, region, np.random.default_rng(ss_pack))
    log.info("packed %d seed spheres", len(seeds))

    slab_dims = (nx, ny, z_e1 - z_e0)
    diagram = build_laguerre(seeds, slab_dims, h, origin=(0.0, 0.0, z_e0 * h))
    graph = build_connectivity(diagram, cfg.extra_edge_slope, np.random.default_rng(ss_conn))

    base_radii = (3.0 * cfg.fill_factor * diagram.cell_volume / (4.0 * np.pi)) ** (1.0 / 3.0)
    cell_seeds = ss_part.spawn(diagram.n_cells)

    def build_particles(scale: float) -> list[ParticleField]:
        radii = base_radii * scale
        cons = _contact_constraints(diagram, graph, radii, h)
        out = []
        for k in range(diagram.n_cells):
            rng_k = np.random.default_rng(cell_seeds[k])
            out.append(sample_particle(k, diagram.seeds[k].center, float(radii[k]),
                                       cons[k], cfg, rng_k))
        return out

    particles = build_particles(1.0)
    slab_shape = (z_e1 - z_e0, ny, nx)
    # the topmost electrode layer stays pore space so the plated film never
    # crosses into the separator slab
    keep_out = np.zeros(slab_shape, dtype=bool)
    keep_out[-1] = True
    solid = rasterize_and_smooth(particles, slab_shape, cfg,
                                 origin=(0.0, 0.0, z_e0 * h), resample=build_particles,
                                 keep_out=keep_out)

    labels = np.zeros((nz, ny, nx), dtype=np.uint8)
    labels[:] = Phase.ELECTROLYTE
    w0, w1 = layout["collector_working"]
    labels[w0:w1] = Phase.COLLECTOR_WORKING
    labels[z_e0:z_e1][solid] = Phase.GRAPHITE
    f0, f1 = layout["foil"]
    labels[f0:f1] = Phase.LI_FOIL
    c0, c1 = layout["collector_counter"]
    labels[c0:c1] = Phase.COLLECTOR_COUNTER

    labels = _prune_disconnected_graphite(labels, z_e0)
    grid = PhaseGrid(labels, h)
    grid = plate_germs(grid, cfg.plating_intensity, cfg.plating_radius,
                       np.random.default_rng(ss_plate))
    return GenerationResult(grid, diagram, graph, particles)
