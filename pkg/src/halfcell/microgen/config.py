"""Generator configuration and the angular power spectrum of particle shapes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError

#: Rational-function coefficients (a, b, c, d) of the angular power spectrum
#: A(l) = (a*l + b) / (l**2 + c*l + d) fitted for graphite anode particles.
DEFAULT_POWER_COEFFS = (0.4241, 0.356, -3.858, 3.903)


def angular_power_spectrum(l, coeffs=DEFAULT_POWER_COEFFS):
    """Per-degree variance A(l) of the spherical-harmonic shape coefficients."""
    a, b, c, d = coeffs
    l = np.asarray(l, dtype=float)
    return (a * l + b) / (l * l + c * l + d)


def _spectrum_nonnegative(coeffs, l_max: int) -> bool:
    # Check integers plus the continuous minimum of the denominator; a sign
    # change of the denominator inside [0, l_max] flips A(l) negative.
    a, b, c, d = coeffs
    ls = np.linspace(0.0, float(l_max), 4 * l_max + 1)
    vertex = -c / 2.0
    if 0.0 <= vertex <= l_max:
        ls = np.append(ls, vertex)
    denom = ls * ls + c * ls + d
    num = a * ls + b
    return bool(np.all(denom > 0) and np.all(num >= 0))


@dataclass
class RadiusLaw:
    """Descriptor of the sphere-radius distribution used by the packing step.

    ``lognormal`` draws radii with the given median and log-space sigma;
    ``fixed`` always returns the median. Radii are in micrometers.
    """

    family: str = "lognormal"
    median_um: float = 5.5
    sigma_log: float = 0.25

    def validate(self):
        if self.family not in ("lognormal", "fixed"):
            raise ConfigError(f"unknown radius law family {self.family!r}")
        if self.median_um <= 0:
            raise ConfigError("radius law median must be positive")
        if self.family == "lognormal" and self.sigma_log < 0:
            raise ConfigError("radius law sigma must be nonnegative")

    def sample(self, rng: np.random.Generator) -> float:
        if self.family == "fixed":
            return self.median_um
        return float(self.median_um * np.exp(self.sigma_log * rng.standard_normal()))

    @property
    def min_radius(self) -> float:
        # 3-sigma lower quantile; used only for quick feasibility checks
        if self.family == "fixed":
            return self.median_um
        return self.median_um * float(np.exp(-3.0 * self.sigma_log))


@dataclass
class GenConfig:
    """All parameters of one stochastic microstructure realization.

    Lengths are micrometers. The z direction is the through direction:
    working collector | porous graphite electrode | separator gap (pure
    electrolyte) | lithium foil | counter collector.
    """

    domain_size: tuple[float, float, float] = (36.0, 36.0, 60.0)
    voxel_size: float = 1.5
    rng_seed: int = 20170
    sphere_radius_law: RadiusLaw = field(default_factory=RadiusLaw)
    target_solid_fraction: float = 0.62
    gfr_power_coeffs: tuple[float, float, float, float] = DEFAULT_POWER_COEFFS
    gfr_max_degree: int = 10
    extra_edge_slope: float = 1.5
    smoothing_radius: int = 1
    fill_factor: float = 0.33
    plating_intensity: float = 0.01   # germs per square micrometer
    plating_radius: float = 2.2       # grain radius r_s, micrometers
    separator_thickness: float = 7.5
    collector_thickness: float = 3.0
    foil_thickness: float = 4.5
    rsa_max_failures: int = 10000

    def validate(self):
        if any(s <= 0 for s in self.domain_size) or self.voxel_size <= 0:
            raise ConfigError("domain dimensions and voxel size must be positive")
        for name in ("separator_thickness", "collector_thickness", "foil_thickness"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        for i, s in enumerate(self.domain_size):
            n = round(s / self.voxel_size)
            if n < 1 or abs(n * self.voxel_size - s) > self.voxel_size * (1.0 + 1e-9):
                raise ConfigError(f"voxel_size does not divide domain dimension {i} within one voxel")
        if not 0.0 < self.target_solid_fraction < 1.0:
            raise ConfigError("target_solid_fraction must lie in (0, 1)")
        if self.gfr_max_degree < 1:
            raise ConfigError("gfr_max_degree must be at least 1")
        if not _spectrum_nonnegative(self.gfr_power_coeffs, self.gfr_max_degree):
            raise ConfigError("angular power spectrum A(l) is negative on [0, l_max]")
        if self.smoothing_radius < 0:
            raise ConfigError("smoothing_radius must be nonnegative")
        if self.fill_factor <= 0:
            raise ConfigError("fill_factor must be positive")
        if self.plating_intensity < 0 or self.plating_radius <= 0:
            raise ConfigError("plating parameters out of range")
        if self.electrode_thickness <= 0:
            raise ConfigError("layer thicknesses exceed the domain")
        self.sphere_radius_law.validate()

    # --- derived layout -------------------------------------------------

    @property
    def grid_dims(self) -> tuple[int, int, int]:
        """(nx, ny, nz) voxel counts of the full domain."""
        return tuple(int(round(s / self.voxel_size)) for s in self.domain_size)

    @property
    def electrode_thickness(self) -> float:
        return (self.domain_size[2] - self.separator_thickness - self.foil_thickness
                - 2.0 * self.collector_thickness)

    def _nvox(self, length: float) -> int:
        return max(1, int(round(length / self.voxel_size)))

    def layer_voxels(self) -> dict[str, tuple[int, int]]:
        """Half-open z-voxel ranges of the five slabs, working collector first."""
        nz = self.grid_dims[2]
        n_cc = self._nvox(self.collector_thickness)
        n_sep = self._nvox(self.separator_thickness)
        n_foil = self._nvox(self.foil_thickness)
        n_el = nz - 2 * n_cc - n_sep - n_foil
        if n_el < 1:
            raise ConfigError("electrode slab has no voxels; shrink the other layers")
        z0 = 0
        layout = {}
        for name, n in (("collector_working", n_cc), ("electrode", n_el),
                        ("separator", n_sep), ("foil", n_foil),
                        ("collector_counter", n_cc)):
            layout[name] = (z0, z0 + n)
            z0 += n
        return layout
