from __future__ import annotations

import struct

import numpy as np
import pytest

import tacmap as tm
from tacmap.mesh import MIN_TRIANGLE_AREA


def write_obj(path, text):
    path.write_text(text)
    return path


def test_obj_single_triangle(tmp_path):
    path = write_obj(tmp_path / "t.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
    mesh = tm.load_mesh(path)
    assert mesh.num_vertices == 3
    assert mesh.num_triangles == 1
    assert mesh.twice_areas[0] == pytest.approx(1.0)
    assert np.allclose(mesh.face_normals[0], [0.0, 0.0, 1.0])


def test_obj_quad_fan_triangulation(tmp_path):
    path = write_obj(tmp_path / "q.obj", "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
    mesh = tm.load_mesh(path)
    assert mesh.num_triangles == 2
    assert np.array_equal(mesh.triangles, [[0, 1, 2], [0, 2, 3]])


def test_obj_negative_indices(tmp_path):
    path = write_obj(tmp_path / "n.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n")
    mesh = tm.load_mesh(path)
    assert np.array_equal(mesh.triangles, [[0, 1, 2]])


def test_obj_ignores_comments_and_normals(tmp_path):
    text = "# cube corner\nvn 0 0 1\nvt 0 0\no thing\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1/1 2/1/1 3/1/1\n"
    mesh = tm.load_mesh(write_obj(tmp_path / "c.obj", text))
    assert mesh.num_triangles == 1


def test_obj_unit_scale(tmp_path):
    path = write_obj(tmp_path / "mm.obj", "v 0 0 0\nv 1000 0 0\nv 0 1000 0\nf 1 2 3\n")
    mesh = tm.load_mesh(path, unit_scale=0.001)
    assert mesh.vertices.max() == pytest.approx(1.0)


def test_obj_error_reports_line_number(tmp_path):
    path = write_obj(tmp_path / "bad.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n")
    with pytest.raises(tm.MeshLoadError, match="bad.obj:4"):
        tm.load_mesh(path)


def test_obj_rejects_index_zero(tmp_path):
    path = write_obj(tmp_path / "z.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n")
    with pytest.raises(tm.MeshLoadError, match="index 0"):
        tm.load_mesh(path)


def test_obj_rejects_short_vertex(tmp_path):
    path = write_obj(tmp_path / "sv.obj", "v 0 0\n")
    with pytest.raises(tm.MeshLoadError, match="3 coordinates"):
        tm.load_mesh(path)


def test_obj_without_faces_rejected(tmp_path):
    path = write_obj(tmp_path / "nf.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\n")
    with pytest.raises(tm.MeshLoadError, match="no faces"):
        tm.load_mesh(path)


def test_missing_file_rejected(tmp_path):
    with pytest.raises(tm.MeshLoadError, match="not found"):
        tm.load_mesh(tmp_path / "absent.obj")


def test_unknown_extension_rejected(tmp_path):
    path = tmp_path / "m.ply"
    path.write_text("x")
    with pytest.raises(tm.MeshLoadError, match="unrecognized mesh format"):
        tm.load_mesh(path)


def _stl_bytes(triangles: np.ndarray) -> bytes:
    blob = bytearray(b"\0" * 80)
    blob += struct.pack("<I", len(triangles))
    for tri in triangles:
        blob += struct.pack("<3f", 0.0, 0.0, 0.0)
        for corner in tri:
            blob += struct.pack("<3f", *corner)
        blob += struct.pack("<H", 0)
    return bytes(blob)


def test_stl_roundtrip_with_vertex_dedup(tmp_path):
    # two triangles sharing an edge: 6 corners, 4 unique vertices
    tris = np.array(
        [
            [[0, 0, 0], [1, 0, 0], [0, 1, 0]],
            [[1, 0, 0], [1, 1, 0], [0, 1, 0]],
        ],
        dtype=float,
    )
    path = tmp_path / "two.stl"
    path.write_bytes(_stl_bytes(tris))
    mesh = tm.load_mesh(path)
    assert mesh.num_triangles == 2
    assert mesh.num_vertices == 4


def test_stl_size_mismatch_rejected(tmp_path):
    tris = np.zeros((1, 3, 3))
    tris[0, 1, 0] = 1.0
    tris[0, 2, 1] = 1.0
    path = tmp_path / "trunc.stl"
    path.write_bytes(_stl_bytes(tris)[:-10])
    with pytest.raises(tm.MeshLoadError, match="size mismatch"):
        tm.load_mesh(path)


def test_stl_too_short_rejected(tmp_path):
    path = tmp_path / "short.stl"
    path.write_bytes(b"\0" * 50)
    with pytest.raises(tm.MeshLoadError, match="84-byte preamble"):
        tm.load_mesh(path)


def test_from_arrays_drops_degenerate_triangles():
    vertices = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [2, 0, 0]]
    triangles = [[0, 1, 2], [0, 1, 3]]  # second is collinear
    mesh = tm.TriangleMesh.from_arrays(vertices, triangles)
    assert mesh.num_triangles == 1
    assert mesh.n_degenerate_dropped == 1


def test_from_arrays_rejects_out_of_range_index():
    with pytest.raises(tm.MeshLoadError, match="out of range"):
        tm.TriangleMesh.from_arrays([[0, 0, 0]], [[0, 0, 1]])


def test_from_arrays_rejects_nonfinite_vertices():
    with pytest.raises(tm.MeshLoadError, match="non-finite"):
        tm.TriangleMesh.from_arrays([[np.inf, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])


def test_from_arrays_rejects_all_degenerate():
    with pytest.raises(tm.MeshLoadError):
        tm.TriangleMesh.from_arrays([[0, 0, 0], [1, 0, 0], [2, 0, 0]], [[0, 1, 2]])


def test_face_normals_unit_and_areas_positive():
    mesh = tm.icosphere_mesh(0.01, subdivisions=2)
    assert np.allclose(np.linalg.norm(mesh.face_normals, axis=1), 1.0, atol=1e-12)
    assert np.all(mesh.twice_areas > 2 * MIN_TRIANGLE_AREA)


def test_bounds():
    mesh = tm.box_mesh(size=(0.02, 0.04, 0.06), center=(0.01, 0.0, 0.0))
    lo, hi = mesh.bounds()
    assert np.allclose(lo, [0.0, -0.02, -0.03])
    assert np.allclose(hi, [0.02, 0.02, 0.03])


def test_save_obj_roundtrip(tmp_path):
    mesh = tm.icosphere_mesh(0.005, subdivisions=1)
    path = tmp_path / "s.obj"
    tm.save_obj(path, mesh, unit_scale=0.001)
    back = tm.load_mesh(path, unit_scale=0.001)
    assert np.array_equal(back.triangles, mesh.triangles)
    assert np.allclose(back.vertices, mesh.vertices, atol=1e-15)
