"""Quantities of interest as linear functionals on the packed state."""

from __future__ import annotations

import numpy as np

from ..microgen.phases import Phase
from .dofmap import Dofmap
from .state import CellState


def qoi_vectors(dof: Dofmap) -> tuple[np.ndarray, np.ndarray]:
    """(cell-voltage vector, mean-solid-concentration vector) on x = [c, phi].

    Cell voltage is the area mean of phi over the working-collector outer
    layer (the grounded counter face is the zero reference); the second
    functional is the volume mean of c over graphite voxels.
    """
    labels = dof.grid.labels
    flat = labels.ravel()
    nx = labels.shape[2]
    ny = labels.shape[1]

    v_cp = np.zeros(dof.n_total)
    outer = np.flatnonzero((flat == Phase.COLLECTOR_WORKING)
                           & (np.arange(flat.size) < nx * ny))
    if outer.size:
        v_cp[dof.n_c + dof.p_dof[outer]] = 1.0 / outer.size

    v_ac = np.zeros(dof.n_total)
    gr = np.flatnonzero(flat == Phase.GRAPHITE)
    if gr.size:
        v_ac[dof.c_dof[gr]] = 1.0 / gr.size
    return v_cp, v_ac


def qoi_cell_voltage(state: CellState, dof: Dofmap) -> float:
    v_cp, _ = qoi_vectors(dof)
    return float(v_cp @ state.x)


def qoi_mean_solid_conc(state: CellState, dof: Dofmap) -> float:
    _, v_ac = qoi_vectors(dof)
    return float(v_ac @ state.x)
