"""Degree-of-freedom layout of the finite-volume model on a phase grid.

Concentration DOFs live on graphite and electrolyte voxels. Potential DOFs
live on every conducting or electrolyte voxel except the outermost layer of
the counter collector, which is eliminated as the grounded Dirichlet face
(phi = 0). The packed state vector is ``x = [c-block, phi-block]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import ModelError
from ..microgen.phases import Phase, PhaseGrid


@dataclass
class Dofmap:
    grid: PhaseGrid
    c_dof: np.ndarray        # per-voxel c DOF id or -1, flat voxel order
    p_dof: np.ndarray        # per-voxel phi DOF id or -1
    n_c: int
    n_p: int
    plated_voxels: np.ndarray   # flat voxel ids of plated-lithium voxels, ascending
    dirichlet: np.ndarray       # flat voxel ids with phi fixed to 0

    @property
    def n_total(self) -> int:
        return self.n_c + self.n_p

    @property
    def n_plated(self) -> int:
        return int(self.plated_voxels.size)

    def x_index_c(self, voxel_flat) -> np.ndarray:
        """State-vector index of the c DOF of the given flat voxel ids."""
        return self.c_dof[voxel_flat]

    def x_index_p(self, voxel_flat) -> np.ndarray:
        """State-vector index of the phi DOF of the given flat voxel ids."""
        return self.n_c + self.p_dof[voxel_flat]

    def voxel_coords(self, voxel_flat: int) -> tuple[int, int, int]:
        nz, ny, nx = self.grid.shape
        z, rem = divmod(int(voxel_flat), ny * nx)
        y, x = divmod(rem, nx)
        return x, y, z

    def describe(self) -> str:
        return (f"{self.n_c} concentration DOFs, {self.n_p} potential DOFs, "
                f"{self.n_plated} plated voxels, {self.dirichlet.size} grounded voxels")


def _electrolyte_connects_electrodes(labels: np.ndarray) -> bool:
    el = labels == Phase.ELECTROLYTE
    comp, n = ndimage.label(el, structure=ndimage.generate_binary_structure(3, 1))
    if n == 0:
        return False
    gr = labels == Phase.GRAPHITE
    foil = labels == Phase.LI_FOIL
    near_gr = ndimage.binary_dilation(gr, ndimage.generate_binary_structure(3, 1))
    near_foil = ndimage.binary_dilation(foil, ndimage.generate_binary_structure(3, 1))
    touch_gr = np.unique(comp[near_gr & el])
    touch_foil = np.unique(comp[near_foil & el])
    return bool(np.intersect1d(touch_gr, touch_foil).size > 0)


def build_dofmap(grid: PhaseGrid) -> Dofmap:
    """Assign DOF ids and validate that the grid supports a half-cell model."""
    labels = grid.labels
    flat = labels.ravel()
    nz = labels.shape[0]

    if not np.any(flat == Phase.GRAPHITE):
        raise ModelError("grid contains no graphite electrode")
    if not np.any(flat == Phase.LI_FOIL):
        raise ModelError("grid contains no lithium foil counter electrode")
    if not _electrolyte_connects_electrodes(labels):
        raise ModelError("no electrolyte path connects the electrode to the counter electrode")

    c_mask = (flat == Phase.GRAPHITE) | (flat == Phase.ELECTROLYTE)

    dirichlet_mask = np.zeros_like(flat, dtype=bool)
    outer = labels[nz - 1] == Phase.COLLECTOR_COUNTER
    if not outer.any():
        raise ModelError("outermost z layer holds no counter collector to ground")
    dirichlet_mask.reshape(labels.shape)[nz - 1] = outer

    p_mask = ~dirichlet_mask   # every phase conducts ions or electrons

    c_dof = np.full(flat.size, -1, dtype=np.int64)
    c_dof[c_mask] = np.arange(np.count_nonzero(c_mask))
    p_dof = np.full(flat.size, -1, dtype=np.int64)
    p_dof[p_mask] = np.arange(np.count_nonzero(p_mask))

    plated = np.flatnonzero(flat == Phase.PLATED_LI)
    dirichlet = np.flatnonzero(dirichlet_mask)
    return Dofmap(grid, c_dof, p_dof, int(c_mask.sum()), int(p_mask.sum()), plated, dirichlet)
