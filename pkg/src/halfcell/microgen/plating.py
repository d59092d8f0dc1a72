"""Germ-grain initialization of the plated-lithium surface phase."""

from __future__ import annotations

import logging

import numpy as np

from .phases import Phase, PhaseGrid

log = logging.getLogger(__name__)

_FACE_OFFSETS = np.array([(0, 0, 1), (0, 0, -1), (0, 1, 0), (0, -1, 0), (1, 0, 0), (-1, 0, 0)])


def sample_germs(extent_x: float, extent_y: float, intensity: float,
                 rng: np.random.Generator) -> np.ndarray:
    """Poisson point process on a rectangle; returns (n, 2) positions in um."""
    n = rng.poisson(intensity * extent_x * extent_y)
    pts = np.empty((n, 2))
    pts[:, 0] = rng.random(n) * extent_x
    pts[:, 1] = rng.random(n) * extent_y
    return pts


def _graphite_surface_mask(labels: np.ndarray) -> np.ndarray:
    """Graphite voxels with at least one face-adjacent electrolyte voxel."""
    gr = labels == Phase.GRAPHITE
    el = labels == Phase.ELECTROLYTE
    near_el = np.zeros_like(el)
    for axis in range(3):
        near_el |= np.roll(el, 1, axis=axis) & ~_edge_mask(el.shape, axis, 0)
        near_el |= np.roll(el, -1, axis=axis) & ~_edge_mask(el.shape, axis, -1)
    return gr & near_el


def _edge_mask(shape, axis, side) -> np.ndarray:
    m = np.zeros(shape, dtype=bool)
    idx = [slice(None)] * 3
    idx[axis] = 0 if side == 0 else shape[axis] - 1
    m[tuple(idx)] = True
    return m


def plate_germs(grid: PhaseGrid, intensity: float, grain_radius: float,
                rng: np.random.Generator) -> PhaseGrid:
    """Place plated-lithium patches on graphite surfaces near the separator.

    Germs are drawn from a Poisson process on the separator-anode interface
    plane. Each germ is projected toward the working collector (descending z)
    onto the first graphite voxel of its column; graphite surface voxels
    within ``grain_radius`` of that hit point donate their electrolyte face
    neighbors, which become one-voxel-thick plated lithium. Germs whose ray
    never meets graphite are skipped.
    """
    labels = grid.labels.copy()
    nz, ny, nx = labels.shape
    h = grid.voxel_size

    germs = sample_germs(nx * h, ny * h, intensity, rng)
    if germs.shape[0] == 0:
        return PhaseGrid(labels, h)

    gr_z = np.nonzero((labels == Phase.GRAPHITE).any(axis=(1, 2)))[0]
    if gr_z.size == 0:
        log.warning("plating skipped: grid contains no graphite")
        return PhaseGrid(labels, h)
    z_top = int(gr_z.max())   # germ plane sits on the face above the top graphite layer

    surface = _graphite_surface_mask(labels)
    surf_idx = np.argwhere(surface)   # (n, 3) as (z, y, x)
    if surf_idx.size == 0:
        log.warning("plating skipped: graphite has no electrolyte-facing surface")
        return PhaseGrid(labels, h)
    surf_centers = (surf_idx[:, ::-1] + 0.5) * h   # (x, y, z) um

    el_mask = labels == Phase.ELECTROLYTE
    hit_points = []
    skipped = 0
    for gx, gy in germs:
        ix = min(nx - 1, int(gx / h))
        iy = min(ny - 1, int(gy / h))
        column = labels[: z_top + 1, iy, ix]
        hits = np.nonzero(column == Phase.GRAPHITE)[0]
        if hits.size == 0:
            skipped += 1
            continue
        z_hit = int(hits.max())   # first graphite voxel along the descending ray
        hit_points.append((gx, gy, (z_hit + 1) * h))
    if skipped:
        log.info("plating: %d of %d germs skipped (ray met no graphite)", skipped, len(germs))
    if not hit_points:
        return PhaseGrid(labels, h)
    hit_points = np.asarray(hit_points)

    def within_grain(points_um: np.ndarray) -> np.ndarray:
        d2 = np.min(np.sum((points_um[:, None, :] - hit_points[None, :, :]) ** 2, axis=2), axis=1)
        return d2 <= grain_radius ** 2

    # the converted electrolyte voxel must itself lie within the grain so the
    # plated phase is contained in the union of the grain balls
    for z, y, x in surf_idx[within_grain(surf_centers)]:
        for dz, dy, dx in _FACE_OFFSETS:
            zz, yy, xx = z + dz, y + dy, x + dx
            if 0 <= zz < nz and 0 <= yy < ny and 0 <= xx < nx and el_mask[zz, yy, xx]:
                center = (np.array([xx, yy, zz]) + 0.5) * h
                if within_grain(center[None, :])[0]:
                    labels[zz, yy, xx] = Phase.PLATED_LI
    return PhaseGrid(labels, h)
