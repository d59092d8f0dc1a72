"""Material phase labels and the voxelized half-cell grid."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np


class Phase(IntEnum):
    """Material phase of a voxel. Values are the on-disk label encoding."""

    ELECTROLYTE = 0
    GRAPHITE = 1
    PLATED_LI = 2
    LI_FOIL = 3
    COLLECTOR_WORKING = 4
    COLLECTOR_COUNTER = 5


N_PHASES = 6

#: Phases that conduct electrons (carry a potential DOF through sigma).
ELECTRON_CONDUCTORS = frozenset(
    {Phase.GRAPHITE, Phase.PLATED_LI, Phase.LI_FOIL, Phase.COLLECTOR_WORKING, Phase.COLLECTOR_COUNTER}
)


@dataclass
class PhaseGrid:
    """Voxelized half-cell geometry.

    ``labels`` is indexed ``[z, y, x]`` (C order, x fastest in memory) so the
    through direction of the cell is the leading axis: working collector at
    ``z = 0``, counter collector at ``z = nz - 1``.

    ``voxel_size`` is in micrometers.
    """

    labels: np.ndarray
    voxel_size: float

    def __post_init__(self):
        self.labels = np.ascontiguousarray(self.labels, dtype=np.uint8)
        if self.labels.ndim != 3:
            raise ValueError("labels must be a 3d array")
        if self.voxel_size <= 0:
            raise ValueError("voxel_size must be positive")

    @property
    def dims(self) -> tuple[int, int, int]:
        """(nx, ny, nz) voxel counts."""
        nz, ny, nx = self.labels.shape
        return nx, ny, nz

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.labels.shape

    def count(self, phase: Phase) -> int:
        return int(np.count_nonzero(self.labels == phase))

    def volume_fraction(self, phase: Phase, region: slice | None = None) -> float:
        """Volume fraction of ``phase``, optionally restricted to a z-slab."""
        lab = self.labels if region is None else self.labels[region]
        return np.count_nonzero(lab == phase) / lab.size

    def copy(self) -> "PhaseGrid":
        return PhaseGrid(self.labels.copy(), self.voxel_size)
