"""Discrete cell state and initial-condition construction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..echem.params import MaterialParams
from ..microgen.phases import Phase
from .dofmap import Dofmap


@dataclass
class CellState:
    """Concentrations, potentials and plated inventory at one time."""

    c: np.ndarray      # per c-DOF, mol/m^3
    phi: np.ndarray    # per phi-DOF, V
    n_pl: np.ndarray   # per plated voxel, mol
    t: float           # s

    @property
    def x(self) -> np.ndarray:
        return np.concatenate([self.c, self.phi])

    @classmethod
    def from_x(cls, x: np.ndarray, n_c: int, n_pl: np.ndarray, t: float) -> "CellState":
        return cls(x[:n_c].copy(), x[n_c:].copy(), n_pl.copy(), t)

    def copy(self) -> "CellState":
        return CellState(self.c.copy(), self.phi.copy(), self.n_pl.copy(), self.t)

    def validate(self):
        if not (np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.phi))
                and np.all(np.isfinite(self.n_pl))):
            raise ValueError("state contains non-finite values")
        if np.any(self.c <= 0):
            raise ValueError("concentrations must stay positive")
        if np.any(self.n_pl < 0):
            raise ValueError("plated inventory must stay nonnegative")


def initial_fields(dof: Dofmap, p: MaterialParams) -> CellState:
    """Uniform initial concentrations and a crude potential guess.

    Graphite starts at ``soc_init``, the electrolyte at ``c_el_init``; each
    plated voxel holds its full voxel volume of metallic lithium. The guess
    puts working-side conductors at the open-circuit potential and everything
    else at the ground reference; the stationary solve refines it.
    """
    flat = dof.grid.labels.ravel()
    c = np.empty(dof.n_c)
    cvox = np.flatnonzero(dof.c_dof >= 0)
    gr = flat[cvox] == Phase.GRAPHITE
    c[dof.c_dof[cvox[gr]]] = p.soc_init * p.c_gr_max
    c[dof.c_dof[cvox[~gr]]] = p.c_el_init

    from ..echem.kinetics import ocp   # local import to avoid a cycle at module load

    u0 = ocp(p.soc_init * p.c_gr_max, p)
    phi = np.zeros(dof.n_p)
    pvox = np.flatnonzero(dof.p_dof >= 0)
    working = np.isin(flat[pvox], (Phase.GRAPHITE, Phase.PLATED_LI, Phase.COLLECTOR_WORKING))
    phi[dof.p_dof[pvox[working]]] = u0

    voxel_volume = (dof.grid.voxel_size * 1e-6) ** 3
    n_pl = np.full(dof.n_plated, voxel_volume * p.c_li_metal)
    return CellState(c, phi, n_pl, 0.0)
