"""Bounding-volume hierarchy for accelerated first-hit ray casting.

Build is a deterministic median split over the longest axis of the centroid
bounds with leaves of up to 4 triangles, so identical meshes always produce
identical node arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .mesh import TriangleMesh

LEAF_SIZE = 4

DIRECTION_NORM_TOL = 1e-9


@dataclass(frozen=True)
class Ray:
    """Ray with unit direction and a maximum hit distance, in meters."""

    origin: np.ndarray
    direction: np.ndarray
    t_max: float = np.inf

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=float).reshape(3)
        direction = np.asarray(self.direction, dtype=float).reshape(3)
        if not (np.all(np.isfinite(origin)) and np.all(np.isfinite(direction))):
            raise ValueError("ray origin and direction must be finite")
        norm = float(np.linalg.norm(direction))
        if abs(norm - 1.0) > DIRECTION_NORM_TOL:
            raise ValueError(f"ray direction norm {norm} deviates from 1 by more than {DIRECTION_NORM_TOL}")
        if not self.t_max > 0.0:
            raise ValueError(f"ray t_max must be positive, got {self.t_max}")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "direction", direction)
        object.__setattr__(self, "t_max", float(self.t_max))


@dataclass(frozen=True)
class RayHit:
    """First intersection: distance, triangle id, hit point, and facing."""

    t: float
    triangle_id: int
    point: np.ndarray
    facing: str  # "front" or "back" relative to the ray direction


@dataclass(frozen=True)
class Bvh:
    """Flat node arrays; leaves reference contiguous ranges of tri_perm.

    node_count[i] > 0 marks a leaf holding tri_perm[node_left[i] : node_left[i]
    + node_count[i]]; otherwise node_left/node_right are child node indices.
    """

    node_min: np.ndarray
    node_max: np.ndarray
    node_left: np.ndarray
    node_right: np.ndarray
    node_count: np.ndarray
    tri_perm: np.ndarray

    @property
    def num_nodes(self) -> int:
        return self.node_min.shape[0]

    def leaf_ranges(self):
        """Yield (node index, triangle ids) for every leaf."""
        for i in range(self.num_nodes):
            c = int(self.node_count[i])
            if c > 0:
                s = int(self.node_left[i])
                yield i, self.tri_perm[s : s + c]


def build_bvh(mesh: TriangleMesh) -> Bvh:
    """Build the acceleration structure for a validated mesh."""
    tri = mesh.triangles
    v0 = mesh.vertices[tri[:, 0]]
    v1 = mesh.vertices[tri[:, 1]]
    v2 = mesh.vertices[tri[:, 2]]
    tri_min = np.minimum(np.minimum(v0, v1), v2)
    tri_max = np.maximum(np.maximum(v0, v1), v2)
    centroids = (v0 + v1 + v2) / 3.0

    n = tri.shape[0]
    perm = np.arange(n, dtype=np.int64)

    node_min: list[np.ndarray] = []
    node_max: list[np.ndarray] = []
    node_left: list[int] = []
    node_right: list[int] = []
    node_count: list[int] = []

    def new_node(lo: int, hi: int) -> int:
        ids = perm[lo:hi]
        node_min.append(tri_min[ids].min(axis=0))
        node_max.append(tri_max[ids].max(axis=0))
        node_left.append(0)
        node_right.append(0)
        node_count.append(0)
        return len(node_min) - 1

    # iterative build; each stack entry is (node index, lo, hi) over perm
    root = new_node(0, n)
    stack = [(root, 0, n)]
    while stack:
        node, lo, hi = stack.pop()
        count = hi - lo
        if count <= LEAF_SIZE:
            node_left[node] = lo
            node_right[node] = count
            node_count[node] = count
            continue
        ids = perm[lo:hi]
        cmin = centroids[ids].min(axis=0)
        cmax = centroids[ids].max(axis=0)
        axis = int(np.argmax(cmax - cmin))
        order = np.argsort(centroids[ids, axis], kind="stable")
        perm[lo:hi] = ids[order]
        mid = lo + count // 2
        left = new_node(lo, mid)
        right = new_node(mid, hi)
        node_left[node] = left
        node_right[node] = right
        stack.append((right, mid, hi))
        stack.append((left, lo, mid))

    bvh = Bvh(
        node_min=np.ascontiguousarray(node_min, dtype=np.float64),
        node_max=np.ascontiguousarray(node_max, dtype=np.float64),
        node_left=np.asarray(node_left, dtype=np.int32),
        node_right=np.asarray(node_right, dtype=np.int32),
        node_count=np.asarray(node_count, dtype=np.int32),
        tri_perm=perm,
    )
    for arr in (bvh.node_min, bvh.node_max, bvh.node_left, bvh.node_right, bvh.node_count, bvh.tri_perm):
        arr.setflags(write=False)
    return bvh


def _facing_code(facing_filter: str) -> int:
    if facing_filter == "any":
        return _kernels.FACING_ANY
    if facing_filter == "back_only":
        return _kernels.FACING_BACK_ONLY
    raise ValueError(f"facing_filter must be 'any' or 'back_only', got {facing_filter!r}")


def _triangle_corners(mesh: TriangleMesh):
    tri = mesh.triangles
    return (
        np.ascontiguousarray(mesh.vertices[tri[:, 0]]),
        np.ascontiguousarray(mesh.vertices[tri[:, 1]]),
        np.ascontiguousarray(mesh.vertices[tri[:, 2]]),
    )


def _make_hit(mesh: TriangleMesh, ray: Ray, t: float, tri_id: int) -> RayHit:
    point = ray.origin + t * ray.direction
    back = float(np.dot(mesh.face_normals[tri_id], ray.direction)) > 0.0
    return RayHit(t=float(t), triangle_id=int(tri_id), point=point, facing="back" if back else "front")


def raycast_first_hit(bvh: Bvh, mesh: TriangleMesh, ray: Ray, facing_filter: str = "any") -> RayHit | None:
    """Closest hit passing the facing filter, or None on a miss.

    With facing_filter="back_only" only triangles whose geometric normal has
    a positive dot product with the ray direction are candidates.
    """
    v0, v1, v2 = _triangle_corners(mesh)
    t, tid = _kernels.bvh_first_hit(
        bvh.node_min, bvh.node_max, bvh.node_left, bvh.node_right, bvh.node_count, bvh.tri_perm,
        v0, v1, v2, mesh.twice_areas,
        ray.origin[0], ray.origin[1], ray.origin[2],
        ray.direction[0], ray.direction[1], ray.direction[2],
        ray.t_max, _facing_code(facing_filter),
    )
    if tid < 0:
        return None
    return _make_hit(mesh, ray, t, tid)


def exhaustive_first_hit(mesh: TriangleMesh, ray: Ray, facing_filter: str = "any") -> RayHit | None:
    """Reference first hit from a scan over every triangle (no acceleration)."""
    v0, v1, v2 = _triangle_corners(mesh)
    t, tid = _kernels.brute_force_hit(
        v0, v1, v2, mesh.twice_areas,
        ray.origin[0], ray.origin[1], ray.origin[2],
        ray.direction[0], ray.direction[1], ray.direction[2],
        ray.t_max, _facing_code(facing_filter),
    )
    if tid < 0:
        return None
    return _make_hit(mesh, ray, t, tid)
