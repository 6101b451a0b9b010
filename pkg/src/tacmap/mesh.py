"""Triangle meshes and loaders for ASCII OBJ and binary STL files."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MIN_TRIANGLE_AREA = 1e-12  # m^2; smaller triangles are dropped at load


class MeshLoadError(Exception):
    """Unreadable file, malformed geometry, or no valid triangles."""


@dataclass(frozen=True)
class TriangleMesh:
    """Immutable triangle mesh in meters.

    Attributes:
        vertices: (V, 3) float64 positions.
        triangles: (F, 3) int32 vertex indices, right-hand winding.
        face_normals: (F, 3) unit geometric normals.
        twice_areas: (F,) |e1 x e2| per triangle (twice the area).
        n_degenerate_dropped: triangles removed during validation.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    face_normals: np.ndarray
    twice_areas: np.ndarray
    n_degenerate_dropped: int = 0

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    @staticmethod
    def from_arrays(vertices, triangles) -> "TriangleMesh":
        """Validate raw arrays and build a mesh, dropping degenerate triangles.

        Raises MeshLoadError on non-finite coordinates, out-of-range indices,
        or when no triangle with area > MIN_TRIANGLE_AREA remains.
        """
        vertices = np.ascontiguousarray(np.asarray(vertices, dtype=np.float64).reshape(-1, 3))
        triangles = np.ascontiguousarray(np.asarray(triangles, dtype=np.int32).reshape(-1, 3))
        if not np.all(np.isfinite(vertices)):
            raise MeshLoadError("mesh has non-finite vertex coordinates")
        if triangles.size and (triangles.min() < 0 or triangles.max() >= len(vertices)):
            raise MeshLoadError("triangle index out of range")

        v0 = vertices[triangles[:, 0]]
        e1 = vertices[triangles[:, 1]] - v0
        e2 = vertices[triangles[:, 2]] - v0
        cross = np.cross(e1, e2)
        twice_areas = np.linalg.norm(cross, axis=1)
        keep = 0.5 * twice_areas > MIN_TRIANGLE_AREA
        dropped = int(np.count_nonzero(~keep))
        if not np.any(keep):
            raise MeshLoadError("mesh has no valid (non-degenerate) triangles")

        triangles = triangles[keep]
        cross = cross[keep]
        twice_areas = twice_areas[keep]
        normals = cross / twice_areas[:, None]
        mesh = TriangleMesh(vertices, triangles, normals, twice_areas, dropped)
        for arr in (mesh.vertices, mesh.triangles, mesh.face_normals, mesh.twice_areas):
            arr.setflags(write=False)
        return mesh


def load_mesh(path, unit_scale: float = 1.0) -> TriangleMesh:
    """Load an ASCII OBJ or binary STL file and convert to meters.

    Args:
        path: file with .obj or .stl extension.
        unit_scale: meters per model unit (0.001 for millimeter files).

    Returns:
        Validated TriangleMesh; degenerate triangles are dropped and counted
        in mesh.n_degenerate_dropped.
    """
    path = Path(path)
    if unit_scale <= 0.0 or not np.isfinite(unit_scale):
        raise MeshLoadError(f"unit_scale must be positive and finite, got {unit_scale}")
    if not path.is_file():
        raise MeshLoadError(f"mesh file not found: {path}")
    suffix = path.suffix.lower()
    if suffix == ".obj":
        vertices, triangles = _parse_obj(path)
    elif suffix == ".stl":
        vertices, triangles = _parse_stl_binary(path)
    else:
        raise MeshLoadError(f"unrecognized mesh format '{suffix}' (expected .obj or .stl): {path}")
    return TriangleMesh.from_arrays(vertices * unit_scale, triangles)


def save_obj(path, mesh: TriangleMesh, unit_scale: float = 1.0) -> None:
    """Write an ASCII OBJ file; coordinates are divided by unit_scale.

    unit_scale mirrors load_mesh: 0.001 writes millimeter coordinates that
    load back to meters with the same scale.
    """
    if unit_scale <= 0.0 or not np.isfinite(unit_scale):
        raise MeshLoadError(f"unit_scale must be positive and finite, got {unit_scale}")
    lines = []
    for v in mesh.vertices / unit_scale:
        lines.append(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}")
    for t in mesh.triangles:
        lines.append(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}")
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_obj(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Parse v/f records; polygons are triangulated by fan, other records ignored."""
    vertices: list[list[float]] = []
    triangles: list[tuple[int, int, int]] = []
    try:
        text = path.read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        raise MeshLoadError(f"cannot read {path}: {exc}") from exc

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        tag = fields[0]
        if tag == "v":
            if len(fields) < 4:
                raise MeshLoadError(f"{path}:{lineno}: vertex record needs 3 coordinates")
            try:
                vertices.append([float(fields[1]), float(fields[2]), float(fields[3])])
            except ValueError as exc:
                raise MeshLoadError(f"{path}:{lineno}: bad vertex coordinate: {exc}") from exc
        elif tag == "f":
            if len(fields) < 4:
                raise MeshLoadError(f"{path}:{lineno}: face record needs at least 3 vertices")
            idx = []
            for token in fields[1:]:
                head = token.split("/")[0]
                try:
                    i = int(head)
                except ValueError as exc:
                    raise MeshLoadError(f"{path}:{lineno}: bad face index '{token}'") from exc
                if i > 0:
                    i -= 1  # OBJ indices are 1-based
                elif i < 0:
                    i += len(vertices)  # negative indices count back from the latest vertex
                else:
                    raise MeshLoadError(f"{path}:{lineno}: face index 0 is invalid")
                if not (0 <= i < len(vertices)):
                    raise MeshLoadError(f"{path}:{lineno}: face index {token} out of range")
                idx.append(i)
            for k in range(1, len(idx) - 1):
                triangles.append((idx[0], idx[k], idx[k + 1]))
        # vn/vt/usemtl/o/g/s/mtllib records carry no geometry we use

    if not triangles:
        raise MeshLoadError(f"{path}: no faces found")
    return np.asarray(vertices, dtype=np.float64), np.asarray(triangles, dtype=np.int64)


def _parse_stl_binary(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Parse binary STL: 80-byte header, little-endian u32 count, 50-byte facets."""
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise MeshLoadError(f"cannot read {path}: {exc}") from exc
    if len(blob) < 84:
        raise MeshLoadError(f"{path}: too short for binary STL (needs 84-byte preamble)")
    (count,) = struct.unpack_from("<I", blob, 80)
    expected = 84 + 50 * count
    if len(blob) != expected:
        raise MeshLoadError(
            f"{path}: binary STL size mismatch: {count} facets imply {expected} bytes, file has {len(blob)}"
        )
    if count == 0:
        raise MeshLoadError(f"{path}: binary STL with zero facets")

    # Each facet: normal (3f), three vertices (9f), u16 attribute count.
    rec = np.frombuffer(blob, dtype=np.uint8, count=50 * count, offset=84).reshape(count, 50)
    floats = rec[:, :48].copy().view("<f4").reshape(count, 12).astype(np.float64)
    corners = floats[:, 3:12].reshape(count * 3, 3)  # stored normal ignored; recomputed from winding

    unique, inverse = np.unique(corners, axis=0, return_inverse=True)
    triangles = inverse.reshape(count, 3)
    return unique, triangles
