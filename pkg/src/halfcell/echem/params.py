"""Physical constants and material/transport/kinetic parameters.

The shipped default parameter set is synthetic: values are chosen at the
right orders of magnitude for a graphite half cell so that desk-scale runs
exercise all regimes (transport limitation, stripping, intercalation), but
they are not calibrated against any measured cell. Tests rely on structural
properties only, never on these numbers being physical.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError

#: Faraday constant, C/mol.
FARADAY = 96485.33
#: Universal gas constant, J/(mol K).
GAS_CONSTANT = 8.3145


@dataclass(frozen=True)
class PhysConstants:
    F: float = FARADAY
    R: float = GAS_CONSTANT


#: Synthetic open-circuit potential of graphite vs Li/Li+ over state of charge.
#: Monotone decreasing with two plateau regions, qualitatively graphite-like.
DEFAULT_OCP_TABLE = (
    (0.00, 0.600),
    (0.04, 0.400),
    (0.10, 0.280),
    (0.20, 0.220),
    (0.30, 0.210),
    (0.45, 0.185),
    (0.55, 0.155),
    (0.65, 0.150),
    (0.80, 0.145),
    (0.90, 0.100),
    (0.97, 0.070),
    (1.00, 0.060),
)


@dataclass
class MaterialParams:
    """All coefficients of the transport and interface-kinetics model.

    Units are SI throughout (m, s, mol, A, V, K). ``i00_grel`` multiplies
    sqrt(c_gr * c_el), ``i00_plel`` multiplies sqrt(c_el); their units absorb
    the concentration factors.
    """

    temperature: float = 298.15          # K
    d_gr: float = 5.0e-13                # m^2/s, solid diffusion
    sigma_gr: float = 50.0               # S/m
    sigma_li: float = 2.0e3              # S/m, metallic lithium foil
    sigma_cc: float = 2.0e3              # S/m, current collectors
    sigma_pl: float = 2.0e3              # S/m, plated lithium
    d_el: float = 3.0e-10                # m^2/s
    kappa_el: float = 1.0                # S/m
    t_plus: float = 0.26                 # transference number
    dlnf_dlnc: float = 0.0               # activity derivative, constant
    i00_grel: float = 2.0e-4             # A/m^2 per (mol/m^3)
    i00_ceel: float = 50.0               # A/m^2
    i00_plel: float = 2.0                # A/m^2 per (mol/m^3)^(1/2)
    c_gr_max: float = 30000.0            # mol/m^3
    ocp_table: tuple = DEFAULT_OCP_TABLE
    n_const_thickness: float = 0.48e-9   # m, regularization thickness
    c_li_metal: float = 76900.0          # mol/m^3, molar density of Li metal
    c_el_init: float = 1000.0            # mol/m^3, initial electrolyte concentration
    soc_init: float = 0.75               # initial graphite state of charge
    constants: PhysConstants = field(default_factory=PhysConstants)

    def __post_init__(self):
        self.validate()
        self._ocp_soc = np.asarray([s for s, _ in self.ocp_table], dtype=float)
        self._ocp_v = np.asarray([v for _, v in self.ocp_table], dtype=float)

    def validate(self):
        positive = ("temperature", "d_gr", "sigma_gr", "sigma_li", "sigma_cc", "sigma_pl",
                    "d_el", "kappa_el", "i00_grel", "i00_ceel", "i00_plel", "c_gr_max",
                    "n_const_thickness", "c_li_metal", "c_el_init")
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if not 0.0 < self.t_plus < 1.0:
            raise ConfigError("transference number must lie in (0, 1)")
        if not 0.0 < self.soc_init <= 1.0:
            raise ConfigError("initial state of charge must lie in (0, 1]")
        socs = [s for s, _ in self.ocp_table]
        if len(socs) < 2 or socs[0] > 0.0 or socs[-1] < 1.0:
            raise ConfigError("OCP table must cover SOC in [0, 1]")
        if any(b <= a for a, b in zip(socs, socs[1:])):
            raise ConfigError("OCP table SOC knots must be strictly increasing")

    def n_const(self, face_area: float) -> float:
        """Regularization inventory in moles for one voxel face.

        Converts the reference plated-film thickness into moles using the
        molar density of metallic lithium and the face area (m^2).
        """
        return self.c_li_metal * self.n_const_thickness * face_area

    @property
    def thermal_voltage_2(self) -> float:
        """2 R T / F, volts; the denominator of all sinh/exp arguments."""
        return 2.0 * self.constants.R * self.temperature / self.constants.F


def load_ocp_csv(path) -> tuple:
    """Read a 2-column (SOC, volts) CSV into an OCP table."""
    rows = []
    with open(Path(path), newline="") as f:
        for rec in csv.reader(f):
            if not rec or rec[0].strip().startswith("#"):
                continue
            try:
                rows.append((float(rec[0]), float(rec[1])))
            except ValueError:
                continue   # header line
    if len(rows) < 2:
        raise ConfigError(f"{path}: OCP table needs at least two numeric rows")
    return tuple(rows)
