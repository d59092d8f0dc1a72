"""Voxel geometry file format and the generator-config sidecar.

The geometry file has a 64-byte fixed header: magic ``MCG1``, three u32 voxel
counts (nx, ny, nz), the voxel size as f64 in meters, and a u32 phase count,
zero-padded to 64 bytes; everything little-endian. The payload is one u8
phase label per voxel, row-major with x fastest.
"""

from __future__ import annotations

import configparser
import io as _io
import struct
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from .config import GenConfig, RadiusLaw
from .phases import N_PHASES, PhaseGrid

MAGIC = b"MCG1"
HEADER_SIZE = 64
_HEADER_FMT = "<4s3IdI"


def save_geometry(grid: PhaseGrid, path) -> None:
    path = Path(path)
    nx, ny, nz = grid.dims
    header = struct.pack(_HEADER_FMT, MAGIC, nx, ny, nz, grid.voxel_size * 1e-6, N_PHASES)
    header += b"\x00" * (HEADER_SIZE - len(header))
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(grid.labels, dtype=np.uint8).tobytes())


def load_geometry(path) -> PhaseGrid:
    path = Path(path)
    with open(path, "rb") as f:
        header = f.read(HEADER_SIZE)
        if len(header) < HEADER_SIZE:
            raise ConfigError(f"{path}: truncated geometry header")
        magic, nx, ny, nz, voxel_m, n_phases = struct.unpack_from(_HEADER_FMT, header)
        if magic != MAGIC:
            raise ConfigError(f"{path}: bad magic {magic!r}")
        if n_phases != N_PHASES:
            raise ConfigError(f"{path}: unsupported phase count {n_phases}")
        payload = f.read(nx * ny * nz)
    if len(payload) != nx * ny * nz:
        raise ConfigError(f"{path}: truncated voxel payload")
    labels = np.frombuffer(payload, dtype=np.uint8).reshape(nz, ny, nx).copy()
    return PhaseGrid(labels, voxel_m * 1e6)


# --- sidecar: full generator configuration as structured text ---------------

def genconfig_to_ini(cfg: GenConfig) -> str:
    cp = configparser.ConfigParser()
    cp["generation"] = {
        "domain_size_um": " ".join(f"{v:.17g}" for v in cfg.domain_size),
        "voxel_size_um": f"{cfg.voxel_size:.17g}",
        "rng_seed": str(cfg.rng_seed),
        "radius_family": cfg.sphere_radius_law.family,
        "radius_median_um": f"{cfg.sphere_radius_law.median_um:.17g}",
        "radius_sigma_log": f"{cfg.sphere_radius_law.sigma_log:.17g}",
        "target_solid_fraction": f"{cfg.target_solid_fraction:.17g}",
        "gfr_power_coeffs": " ".join(f"{v:.17g}" for v in cfg.gfr_power_coeffs),
        "gfr_max_degree": str(cfg.gfr_max_degree),
        "extra_edge_slope": f"{cfg.extra_edge_slope:.17g}",
        "smoothing_radius_vox": str(cfg.smoothing_radius),
        "fill_factor": f"{cfg.fill_factor:.17g}",
        "plating_intensity_per_um2": f"{cfg.plating_intensity:.17g}",
        "plating_radius_um": f"{cfg.plating_radius:.17g}",
        "separator_thickness_um": f"{cfg.separator_thickness:.17g}",
        "collector_thickness_um": f"{cfg.collector_thickness:.17g}",
        "foil_thickness_um": f"{cfg.foil_thickness:.17g}",
        "rsa_max_failures": str(cfg.rsa_max_failures),
    }
    buf = _io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def genconfig_from_ini(text: str) -> GenConfig:
    cp = configparser.ConfigParser()
    cp.read_string(text)
    if "generation" not in cp:
        raise ConfigError("sidecar misses the [generation] section")
    g = cp["generation"]
    try:
        cfg = GenConfig(
            domain_size=tuple(float(v) for v in g["domain_size_um"].split()),
            voxel_size=g.getfloat("voxel_size_um"),
            rng_seed=g.getint("rng_seed"),
            sphere_radius_law=RadiusLaw(g.get("radius_family", "lognormal"),
                                        g.getfloat("radius_median_um"),
                                        g.getfloat("radius_sigma_log")),
            target_solid_fraction=g.getfloat("target_solid_fraction"),
            gfr_power_coeffs=tuple(float(v) for v in g["gfr_power_coeffs"].split()),
            gfr_max_degree=g.getint("gfr_max_degree"),
            extra_edge_slope=g.getfloat("extra_edge_slope"),
            smoothing_radius=g.getint("smoothing_radius_vox"),
            fill_factor=g.getfloat("fill_factor"),
            plating_intensity=g.getfloat("plating_intensity_per_um2"),
            plating_radius=g.getfloat("plating_radius_um"),
            separator_thickness=g.getfloat("separator_thickness_um"),
            collector_thickness=g.getfloat("collector_thickness_um"),
            foil_thickness=g.getfloat("foil_thickness_um"),
            rsa_max_failures=g.getint("rsa_max_failures"),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"malformed generation sidecar: {exc}") from exc
    cfg.validate()
    return cfg


def save_sidecar(cfg: GenConfig, path) -> None:
    Path(path).write_text(genconfig_to_ini(cfg))


def load_sidecar(path) -> GenConfig:
    return genconfig_from_ini(Path(path).read_text())
