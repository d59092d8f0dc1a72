"""Random sequential adsorption of hard spheres inside a slab."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import GeometryError
from .config import GenConfig


@dataclass(frozen=True)
class SeedSphere:
    """A packed sphere; later the weighted seed of one tessellation cell."""

    center: tuple[float, float, float]
    radius: float


@dataclass(frozen=True)
class SlabRegion:
    """Axis-aligned box ``[lo, hi)`` in micrometers."""

    lo: tuple[float, float, float]
    hi: tuple[float, float, float]

    @property
    def extent(self) -> np.ndarray:
        return np.asarray(self.hi) - np.asarray(self.lo)

    @property
    def volume(self) -> float:
        return float(np.prod(self.extent))


def pack_spheres(cfg: GenConfig, region: SlabRegion, rng: np.random.Generator | None = None) -> list[SeedSphere]:
    """Pack non-overlapping spheres into ``region`` by random sequential adsorption.

    Each attempt draws a radius from the configured law and a uniform center
    such that the sphere lies fully inside the region. Insertion fails on
    overlap with any accepted sphere; packing stops after
    ``cfg.rsa_max_failures`` consecutive failures.
    """
    if region.volume <= 0:
        raise GeometryError("packing region has no volume")
    cfg.sphere_radius_law.validate()
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)

    lo = np.asarray(region.lo, dtype=float)
    hi = np.asarray(region.hi, dtype=float)

    centers = np.empty((0, 3))
    radii = np.empty(0)
    failures = 0
    while failures < cfg.rsa_max_failures:
        r = cfg.sphere_radius_law.sample(rng)
        span = hi - lo - 2.0 * r
        if np.any(span < 0):
            failures += 1
            continue
        c = lo + r + rng.random(3) * span
        if centers.shape[0]:
            gap = np.linalg.norm(centers - c, axis=1) - (radii + r)
            if np.min(gap) < 0:
                failures += 1
                continue
        centers = np.vstack([centers, c])
        radii = np.append(radii, r)
        failures = 0

    if not centers.shape[0]:
        raise GeometryError(
            "random sequential adsorption placed no spheres; the region is too "
            "small for the configured radius law")
    return [SeedSphere(tuple(c), float(r)) for c, r in zip(centers, radii)]
