import numpy as np
import pytest

from halfcell import GeometryError
from halfcell.microgen import GenConfig, RadiusLaw, SlabRegion, pack_spheres


def make_cfg(**kw):
    cfg = GenConfig()
    for k, v in kw.items():
        setattr(cfg, k, v)
    return cfg


def test_region_smaller_than_radius_raises():
    cfg = make_cfg(sphere_radius_law=RadiusLaw("fixed", 5.0, 0.0), rsa_max_failures=50)
    region = SlabRegion((0, 0, 0), (4.0, 4.0, 4.0))
    with pytest.raises(GeometryError):
        pack_spheres(cfg, region, np.random.default_rng(0))


def test_region_barely_fitting_one_sphere():
    cfg = make_cfg(sphere_radius_law=RadiusLaw("fixed", 5.0, 0.0), rsa_max_failures=200)
    region = SlabRegion((0, 0, 0), (10.5, 10.5, 10.5))
    spheres = pack_spheres(cfg, region, np.random.default_rng(3))
    assert len(spheres) == 1
    assert spheres[0].radius == 5.0


def test_determinism():
    cfg = make_cfg(rsa_max_failures=500)
    region = SlabRegion((0, 0, 0), (30.0, 30.0, 30.0))
    a = pack_spheres(cfg, region, np.random.default_rng(77))
    b = pack_spheres(cfg, region, np.random.default_rng(77))
    assert len(a) == len(b)
    for sa, sb in zip(a, b):
        assert sa.center == sb.center and sa.radius == sb.radius


def test_no_overlap_and_containment():
    cfg = make_cfg(rsa_max_failures=500)
    region = SlabRegion((0, 0, 5.0), (30.0, 30.0, 35.0))
    spheres = pack_spheres(cfg, region, np.random.default_rng(5))
    assert len(spheres) >= 2
    centers = np.array([s.center for s in spheres])
    radii = np.array([s.radius for s in spheres])
    lo = np.array(region.lo)
    hi = np.array(region.hi)
    assert np.all(centers - radii[:, None] >= lo - 1e-12)
    assert np.all(centers + radii[:, None] <= hi + 1e-12)
    for i in range(len(spheres)):
        for j in range(i + 1, len(spheres)):
            d = np.linalg.norm(centers[i] - centers[j])
            assert d >= radii[i] + radii[j] - 1e-12
