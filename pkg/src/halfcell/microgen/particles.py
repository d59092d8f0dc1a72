"""Star-shaped particles as Gaussian random fields on the sphere.

The radius function of a particle is

    r(dir) = mean_radius + sum_{l=1..L} sum_m  a_lm * Y_lm(dir)

with real orthonormal spherical harmonics Y_lm and independent coefficients
a_lm ~ N(0, A(l)). Touching conditions from the connectivity graph are
enforced by Gaussian conditioning of the coefficient vector on point
evaluations of the radius function (simple kriging), which is exact
interpolation at the constrained directions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import GeometryError
from .config import GenConfig, angular_power_spectrum

#: Radius floor, as a fraction of the mean radius, applied when evaluating.
RADIUS_FLOOR_FRACTION = 0.1


def coeff_count(l_max: int) -> int:
    """Number of random shape coefficients (degrees 1..l_max)."""
    return (l_max + 1) ** 2 - 1


def coeff_degrees(l_max: int) -> np.ndarray:
    """Degree l of every coefficient slot, in layout order (l asc, m = -l..l)."""
    return np.concatenate([np.full(2 * l + 1, l, dtype=int) for l in range(1, l_max + 1)])


def real_sph_harm_matrix(l_max: int, dirs: np.ndarray) -> np.ndarray:
    """Evaluate the real orthonormal harmonics for degrees 1..l_max.

    ``dirs`` is (n, 3) of unit vectors; returns (n, coeff_count). Layout per
    degree l is m = -l (sine terms) ... 0 ... +l (cosine terms).
    """
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    norms = np.linalg.norm(dirs, axis=1)
    unit = dirs / norms[:, None]
    x = np.clip(unit[:, 2], -1.0, 1.0)          # cos(theta)
    s = np.sqrt(np.maximum(0.0, 1.0 - x * x))   # sin(theta)
    phi = np.arctan2(unit[:, 1], unit[:, 0])

    # fully normalized associated Legendre values P[l][m] via stable recurrences
    P = [[None] * (l_max + 1) for _ in range(l_max + 1)]
    P[0][0] = np.full(x.shape, 1.0 / np.sqrt(4.0 * np.pi))
    for m in range(1, l_max + 1):
        P[m][m] = np.sqrt((2 * m + 1) / (2.0 * m)) * s * P[m - 1][m - 1]
    for m in range(l_max):
        P[m + 1][m] = np.sqrt(2 * m + 3.0) * x * P[m][m]
    for m in range(l_max + 1):
        for l in range(m + 2, l_max + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((2.0 * l + 1.0) * (l - 1 + m) * (l - 1 - m)) / ((2.0 * l - 3.0) * (l * l - m * m)))
            P[l][m] = a * x * P[l - 1][m] - b * P[l - 2][m]

    sqrt2 = np.sqrt(2.0)
    cosm = [np.ones_like(phi)] + [np.cos(m * phi) for m in range(1, l_max + 1)]
    sinm = [np.zeros_like(phi)] + [np.sin(m * phi) for m in range(1, l_max + 1)]
    cols = []
    for l in range(1, l_max + 1):
        block = np.empty((dirs.shape[0], 2 * l + 1))
        block[:, l] = P[l][0]
        for m in range(1, l + 1):
            block[:, l + m] = sqrt2 * P[l][m] * cosm[m]
            block[:, l - m] = sqrt2 * P[l][m] * sinm[m]
        cols.append(block)
    return np.hstack(cols)


def coefficient_variances(l_max: int, coeffs_abcd) -> np.ndarray:
    """Prior variance A(l) of every coefficient slot."""
    return angular_power_spectrum(coeff_degrees(l_max), coeffs_abcd)


def sample_coefficients(l_max: int, coeffs_abcd, rng: np.random.Generator) -> np.ndarray:
    """Draw an unconstrained coefficient vector with per-degree variance A(l)."""
    var = coefficient_variances(l_max, coeffs_abcd)
    return rng.standard_normal(var.size) * np.sqrt(var)


@dataclass
class ParticleField:
    """One sampled particle: center, mean radius and shape coefficients."""

    cell_index: int
    center: np.ndarray
    mean_radius: float
    sh_coeffs: np.ndarray
    l_max: int
    contact_constraints: list[tuple[np.ndarray, float]] = field(default_factory=list)

    def radius(self, dirs: np.ndarray, clamp: bool = True) -> np.ndarray:
        """Radius along unit direction(s); clamped below at 0.1 * mean_radius."""
        Y = real_sph_harm_matrix(self.l_max, dirs)
        r = self.mean_radius + Y @ self.sh_coeffs
        if clamp:
            r = np.maximum(r, RADIUS_FLOOR_FRACTION * self.mean_radius)
        return r

    @property
    def max_radius(self) -> float:
        # coefficients bound the fluctuation: |sum a_lm Y_lm| <= |a| * |Y|,
        # with |Y(dir)|^2 = sum_l (2l+1)/(4pi) over used degrees
        l = np.arange(1, self.l_max + 1)
        ynorm = np.sqrt(np.sum(2 * l + 1) / (4.0 * np.pi))
        return float(self.mean_radius + np.linalg.norm(self.sh_coeffs) * ynorm)

    def scaled(self, factor: float) -> "ParticleField":
        """Homothety of the whole radius function (mean and fluctuations)."""
        return ParticleField(self.cell_index, self.center, self.mean_radius * factor,
                             self.sh_coeffs * factor, self.l_max,
                             [(d, r * factor) for d, r in self.contact_constraints])


def sample_particle(cell_index: int, center, mean_radius: float,
                    constraints: list[tuple[np.ndarray, float]],
                    cfg: GenConfig, rng: np.random.Generator) -> ParticleField:
    """Sample one particle, conditioned to meet the given contact radii.

    ``constraints`` is a list of (unit direction, required radius in um).
    Raises GeometryError if a required radius exceeds twice the mean radius
    or the conditioning system is singular.
    """
    for d, req in constraints:
        if req > 2.0 * mean_radius:
            raise GeometryError(
                f"cell {cell_index}: contact radius {req:.3g} um exceeds twice "
                f"the mean radius {mean_radius:.3g} um")

    var = coefficient_variances(cfg.gfr_max_degree, cfg.gfr_power_coeffs)
    a = rng.standard_normal(var.size) * np.sqrt(var)

    if constraints:
        dirs = np.asarray([d for d, _ in constraints], dtype=float)
        y = np.asarray([req for _, req in constraints], dtype=float) - mean_radius
        H = real_sph_harm_matrix(cfg.gfr_max_degree, dirs)
        S = (H * var) @ H.T   # H diag(var) H^T
        try:
            w = np.linalg.solve(S, H @ a - y)
        except np.linalg.LinAlgError as exc:
            raise GeometryError(f"cell {cell_index}: contact constraints are degenerate") from exc
        a = a - var * (H.T @ w)
        resid = np.max(np.abs(H @ a - y))
        if resid > 1e-8 * mean_radius:
            raise GeometryError(
                f"cell {cell_index}: conditioning residual {resid:.2e} um; "
                "constraints are numerically infeasible")

    return ParticleField(cell_index, np.asarray(center, dtype=float), mean_radius,
                         a, cfg.gfr_max_degree, [(np.asarray(d), r) for d, r in constraints])
