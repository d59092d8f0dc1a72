import struct

import numpy as np
import pytest

from halfcell import ConfigError
from halfcell.microgen import (
    GenConfig,
    Phase,
    PhaseGrid,
    load_geometry,
    load_sidecar,
    save_geometry,
    save_sidecar,
)


def small_grid():
    labels = np.arange(3 * 4 * 5, dtype=np.uint8).reshape(5, 4, 3) % 6
    return PhaseGrid(labels, 1.25)


def test_header_layout(tmp_path):
    grid = small_grid()
    path = tmp_path / "g.mcg"
    save_geometry(grid, path)
    raw = path.read_bytes()
    assert raw[:4] == b"MCG1"
    nx, ny, nz = struct.unpack_from("<3I", raw, 4)
    assert (nx, ny, nz) == (3, 4, 5)
    (voxel_m,) = struct.unpack_from("<d", raw, 16)
    assert voxel_m == pytest.approx(1.25e-6)
    (n_phases,) = struct.unpack_from("<I", raw, 24)
    assert n_phases == 6
    assert len(raw) == 64 + 3 * 4 * 5
    # payload is row-major with x fastest: first bytes walk x at y=z=0
    assert list(raw[64:67]) == [grid.labels[0, 0, 0], grid.labels[0, 0, 1], grid.labels[0, 0, 2]]


def test_round_trip(tmp_path):
    grid = small_grid()
    path = tmp_path / "g.mcg"
    save_geometry(grid, path)
    back = load_geometry(path)
    assert np.array_equal(back.labels, grid.labels)
    assert back.voxel_size == pytest.approx(grid.voxel_size)


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "bad.mcg"
    path.write_bytes(b"NOPE" + b"\x00" * 80)
    with pytest.raises(ConfigError):
        load_geometry(path)


def test_truncated_payload_rejected(tmp_path):
    grid = small_grid()
    path = tmp_path / "g.mcg"
    save_geometry(grid, path)
    path.write_bytes(path.read_bytes()[:-5])
    with pytest.raises(ConfigError):
        load_geometry(path)


def test_sidecar_round_trip(tmp_path):
    cfg = GenConfig(rng_seed=77, target_solid_fraction=0.58, gfr_max_degree=8)
    path = tmp_path / "g.cfg"
    save_sidecar(cfg, path)
    back = load_sidecar(path)
    assert back == cfg


def test_phase_enum_on_disk_values():
    assert Phase.ELECTROLYTE == 0
    assert Phase.GRAPHITE == 1
    assert Phase.PLATED_LI == 2
    assert Phase.LI_FOIL == 3
    assert Phase.COLLECTOR_WORKING == 4
    assert Phase.COLLECTOR_COUNTER == 5
