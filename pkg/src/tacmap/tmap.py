"""Binary deformation-map files.

Layout, little-endian throughout:

    bytes 0..4   magic b"TMAP"
    u32          version (currently 1)
    u32          H
    u32          W
    f32          d_max, meters
    f32 x H*W    depths, meters, row-major

Depths are stored as float32; loading promotes them to float64.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .render import DeformMap

MAGIC = b"TMAP"
VERSION = 1
_HEADER = struct.Struct("<4sIIIf")


class TmapFormatError(Exception):
    """Malformed or truncated deformation-map file."""


def save_tmap(path, deform_map: DeformMap) -> None:
    depths = np.asarray(deform_map.depths, dtype=float)
    if depths.ndim != 2:
        raise TmapFormatError(f"depths must be 2-D, got shape {depths.shape}")
    h, w = depths.shape
    header = _HEADER.pack(MAGIC, VERSION, h, w, float(deform_map.d_max))
    Path(path).write_bytes(header + depths.astype("<f4").tobytes())


def save_pgm(path, deform_map: DeformMap) -> None:
    """16-bit PGM preview, gray = depth / d_max scaled to [0, 65535]."""
    depths = np.asarray(deform_map.depths, dtype=float)
    h, w = depths.shape
    scaled = np.clip(depths / deform_map.d_max, 0.0, 1.0)
    gray = np.round(scaled * 65535).astype(">u2")
    header = f"P5\n{w} {h}\n65535\n".encode("ascii")
    Path(path).write_bytes(header + gray.tobytes())


def save_csv(path, deform_map: DeformMap) -> None:
    """Plain-text dump, one row per line, depths in meters."""
    np.savetxt(path, np.asarray(deform_map.depths, dtype=float), delimiter=",", fmt="%.9g")


def load_tmap(path) -> DeformMap:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise TmapFormatError(f"{path}: file shorter than header ({len(data)} bytes)")
    magic, version, h, w, d_max = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise TmapFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise TmapFormatError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 4 * h * w
    if len(data) != expected:
        raise TmapFormatError(f"{path}: expected {expected} bytes for {h}x{w} map, got {len(data)}")
    depths = np.frombuffer(data, dtype="<f4", count=h * w, offset=_HEADER.size)
    depths = depths.astype(float).reshape(h, w)
    depths.setflags(write=False)
    return DeformMap(depths, float(d_max))
