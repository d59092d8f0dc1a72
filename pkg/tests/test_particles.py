import numpy as np
import pytest

from halfcell import GeometryError
from halfcell.microgen import (
    GenConfig,
    angular_power_spectrum,
    coefficient_variances,
    real_sph_harm_matrix,
    sample_coefficients,
    sample_particle,
)
from halfcell.microgen.particles import coeff_degrees


def sphere_quadrature(n_theta, n_phi):
    """Gauss-Legendre x uniform-azimuth rule, exact for band-limited fields."""
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = (np.arange(n_phi) + 0.5) * 2.0 * np.pi / n_phi
    T, P = np.meshgrid(theta, phi, indexing="ij")
    dirs = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1)
    weights = np.repeat(wx, n_phi) * (2.0 * np.pi / n_phi)
    return dirs.reshape(-1, 3), weights


def test_harmonics_orthonormal():
    dirs, w = sphere_quadrature(14, 28)
    Y = real_sph_harm_matrix(6, dirs)
    gram = (Y * w[:, None]).T @ Y
    assert np.abs(gram - np.eye(gram.shape[0])).max() < 1e-12


def test_power_spectrum_at_zero_is_b_over_d():
    # frozen from the rational function at the default coefficients
    assert angular_power_spectrum(0) == pytest.approx(0.356 / 3.903)
    assert angular_power_spectrum(0) == pytest.approx(0.091211888, rel=1e-6)


def test_zero_spectrum_gives_perfect_sphere(rng):
    cfg = GenConfig(gfr_power_coeffs=(0.0, 0.0, 0.0, 1.0))
    p = sample_particle(3, (0, 0, 0), 4.0, [], cfg, rng)
    dirs = np.random.default_rng(0).standard_normal((50, 3))
    assert np.allclose(p.radius(dirs), 4.0)


def test_conditioning_exact_at_constraint(rng):
    cfg = GenConfig()
    rho = 6.5
    p = sample_particle(0, (0, 0, 0), 5.0,
                        [(np.array([0.0, 0.0, 1.0]), rho)], cfg, rng)
    r = p.radius(np.array([[0.0, 0.0, 1.0]]), clamp=False)[0]
    assert abs(r - rho) <= 1e-10 * 5.0


def test_multiple_constraints_exact(rng):
    cfg = GenConfig()
    cons = [(np.array([0.0, 0.0, 1.0]), 6.0),
            (np.array([1.0, 0.0, 0.0]), 4.0),
            (np.array([0.0, 1.0, 0.0]), 5.5)]
    p = sample_particle(1, (0, 0, 0), 5.0, cons, cfg, rng)
    for d, req in cons:
        assert abs(p.radius(d[None, :], clamp=False)[0] - req) <= 1e-10 * 5.0


def test_infeasible_constraint_raises(rng):
    cfg = GenConfig()
    with pytest.raises(GeometryError, match="cell 7"):
        sample_particle(7, (0, 0, 0), 3.0, [(np.array([0.0, 0.0, 1.0]), 6.5)], cfg, rng)


def test_radius_floor_clamp(rng):
    cfg = GenConfig()
    p = sample_particle(0, (0, 0, 0), 5.0, [], cfg, rng)
    p.sh_coeffs[:] = 0.0
    p.sh_coeffs[0] = -100.0   # drive the field strongly negative somewhere
    dirs, _ = sphere_quadrature(10, 20)
    assert p.radius(dirs).min() >= 0.1 * 5.0 - 1e-12


def test_unconstrained_spectrum_reproduced():
    cfg = GenConfig()
    rng = np.random.default_rng(2718)
    deg = coeff_degrees(cfg.gfr_max_degree)
    draws = np.array([sample_coefficients(cfg.gfr_max_degree, cfg.gfr_power_coeffs, rng)
                      for _ in range(2000)])
    for l in range(1, 9):
        sample_var = draws[:, deg == l].var()
        assert sample_var == pytest.approx(angular_power_spectrum(l), rel=0.10)
    assert np.allclose(coefficient_variances(cfg.gfr_max_degree, cfg.gfr_power_coeffs),
                       angular_power_spectrum(deg))
