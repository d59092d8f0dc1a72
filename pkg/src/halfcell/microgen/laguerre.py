"""Voxelized Laguerre (power) diagram of a packed sphere system."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import GeometryError
from .packing import SeedSphere


@dataclass
class LaguerreDiagram:
    """Per-voxel ownership of the electrode slab plus facet-area adjacency.

    ``voxel_owner`` is indexed ``[z, y, x]`` over the slab subgrid and holds
    the owning seed index; ownership minimizes the power distance
    ``|x - c|^2 - r^2`` with ties going to the lowest seed index.
    ``adjacency`` lists ``(i, j, facet_area_um2)`` with ``i < j``, counted
    from voxel faces whose two sides have different owners.
    """

    seeds: list[SeedSphere]
    voxel_owner: np.ndarray
    adjacency: list[tuple[int, int, float]]
    cell_volume: np.ndarray
    voxel_size: float

    @property
    def n_cells(self) -> int:
        return len(self.seeds)

    def adjacency_array(self) -> np.ndarray:
        return np.asarray([(i, j, a) for i, j, a in self.adjacency], dtype=float)


def build_laguerre(seeds: list[SeedSphere], grid_dims: tuple[int, int, int],
                   voxel_size: float, origin=(0.0, 0.0, 0.0)) -> LaguerreDiagram:
    """Assign every voxel of a slab subgrid to its power-distance-minimizing seed.

    ``grid_dims`` is (nx, ny, nz) of the slab; voxel centers sit at
    ``origin + (i + 1/2) * voxel_size``. Seeds that end up owning no voxel are
    dropped and the remaining cells are reindexed in original seed order.
    """
    if not seeds:
        raise GeometryError("Laguerre diagram needs at least one seed")
    nx, ny, nz = grid_dims
    h = voxel_size
    ox, oy, oz = origin

    xs = ox + (np.arange(nx) + 0.5) * h
    ys = oy + (np.arange(ny) + 0.5) * h
    zs = oz + (np.arange(nz) + 0.5) * h
    Z, Y, X = np.meshgrid(zs, ys, xs, indexing="ij")

    best = np.full((nz, ny, nx), np.inf)
    owner = np.zeros((nz, ny, nx), dtype=np.int32)
    for k, s in enumerate(seeds):
        cx, cy, cz = s.center
        power = (X - cx) ** 2 + (Y - cy) ** 2 + (Z - cz) ** 2 - s.radius ** 2
        better = power < best   # strict: ties stay with the lower index
        owner[better] = k
        best[better] = power[better]

    # drop empty cells, keep original ordering
    counts = np.bincount(owner.ravel(), minlength=len(seeds))
    keep = np.flatnonzero(counts > 0)
    remap = np.full(len(seeds), -1, dtype=np.int32)
    remap[keep] = np.arange(len(keep), dtype=np.int32)
    owner = remap[owner]
    kept_seeds = [seeds[k] for k in keep]
    cell_volume = counts[keep].astype(float) * h ** 3

    adjacency: dict[tuple[int, int], int] = {}
    for axis in range(3):
        a = owner.take(np.arange(owner.shape[axis] - 1), axis=axis)
        b = owner.take(np.arange(1, owner.shape[axis]), axis=axis)
        diff = a != b
        pi, pj = a[diff], b[diff]
        lohi = np.sort(np.stack([pi, pj], axis=1), axis=1)
        for i, j in lohi:
            adjacency[(int(i), int(j))] = adjacency.get((int(i), int(j)), 0) + 1

    adj_list = [(i, j, n * h * h) for (i, j), n in sorted(adjacency.items())]
    return LaguerreDiagram(kept_seeds, owner, adj_list, cell_volume, h)
