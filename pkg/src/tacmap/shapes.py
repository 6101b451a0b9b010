"""Procedural indenter meshes: boxes, icospheres, cylinders.

Deterministic constructions used by tests, demos, and benchmark scenes.
All dimensions in meters.
"""

from __future__ import annotations

import numpy as np

from .mesh import TriangleMesh


def box_mesh(size=(0.01, 0.01, 0.01), center=(0.0, 0.0, 0.0)) -> TriangleMesh:
    """Axis-aligned box with outward-facing triangles (12)."""
    sx, sy, sz = (float(s) * 0.5 for s in size)
    cx, cy, cz = (float(c) for c in center)
    corners = np.array(
        [
            [cx - sx, cy - sy, cz - sz],
            [cx + sx, cy - sy, cz - sz],
            [cx + sx, cy + sy, cz - sz],
            [cx - sx, cy + sy, cz - sz],
            [cx - sx, cy - sy, cz + sz],
            [cx + sx, cy - sy, cz + sz],
            [cx + sx, cy + sy, cz + sz],
            [cx - sx, cy + sy, cz + sz],
        ]
    )
    quads = [
        (0, 3, 2, 1),  # bottom  (-z)
        (4, 5, 6, 7),  # top     (+z)
        (0, 1, 5, 4),  # front   (-y)
        (2, 3, 7, 6),  # back    (+y)
        (0, 4, 7, 3),  # left    (-x)
        (1, 2, 6, 5),  # right   (+x)
    ]
    tris = []
    for a, b, c, d in quads:
        tris.append((a, b, c))
        tris.append((a, c, d))
    return TriangleMesh.from_arrays(corners, np.asarray(tris))


def icosphere_mesh(radius: float, subdivisions: int = 3) -> TriangleMesh:
    """Icosphere: subdivided icosahedron with vertices projected onto the sphere."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    if subdivisions < 0:
        raise ValueError("subdivisions must be >= 0")
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=np.float64,
    )
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [v / np.linalg.norm(v) for v in verts]

    for _ in range(subdivisions):
        midpoint_cache: dict[tuple[int, int], int] = {}

        def midpoint(i: int, j: int) -> int:
            key = (i, j) if i < j else (j, i)
            cached = midpoint_cache.get(key)
            if cached is not None:
                return cached
            m = verts[i] + verts[j]
            m = m / np.linalg.norm(m)
            verts.append(m)
            midpoint_cache[key] = len(verts) - 1
            return midpoint_cache[key]

        next_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            next_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = next_faces

    vertices = np.asarray(verts) * float(radius)
    return TriangleMesh.from_arrays(vertices, np.asarray(faces))


def cylinder_mesh(radius: float, height: float, segments: int = 48) -> TriangleMesh:
    """Closed cylinder, axis along z, centered at the origin."""
    if radius <= 0 or height <= 0:
        raise ValueError("radius and height must be positive")
    if segments < 3:
        raise ValueError("segments must be >= 3")
    ang = 2.0 * np.pi * np.arange(segments) / segments
    ring = np.stack([radius * np.cos(ang), radius * np.sin(ang)], axis=1)
    hz = height / 2.0
    bottom = np.column_stack([ring, np.full(segments, -hz)])
    top = np.column_stack([ring, np.full(segments, hz)])
    verts = np.vstack([bottom, top, [[0.0, 0.0, -hz]], [[0.0, 0.0, hz]]])
    ib, it = 2 * segments, 2 * segments + 1

    tris = []
    for k in range(segments):
        kn = (k + 1) % segments
        # side quad, outward winding
        tris.append((k, kn, segments + kn))
        tris.append((k, segments + kn, segments + k))
        tris.append((ib, kn, k))            # bottom cap faces -z
        tris.append((it, segments + k, segments + kn))  # top cap faces +z
    return TriangleMesh.from_arrays(verts, np.asarray(tris))
