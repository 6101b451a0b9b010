"""Deformation-map rendering by normal-aligned ray casting.

Each sensing pixel casts a ray from its sensing point along its inward
normal. The distance t_o to the first qualifying surface it meets, minus
the sensing-surface standoff delta, is that pixel's deformation depth,
clamped to [0, d_max]. Pixels whose rays miss every object within t_max
read zero. The default facing filter intersects only back-facing triangles
(normal along the ray), which picks the object's sensor-facing indentation
front even when the ray origin is inside the object; a front-face hit would
measure the far side and under-report penetration.

Casting happens in each object's local frame via the relative pose, so the
output depends only on the sensor pose relative to each object.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .bvh import Bvh, build_bvh
from .mesh import TriangleMesh
from .sensor import SensingGrid
from .transforms import RigidPose, compose, identity_pose, inverse

COMBINE_MODES = ("max",)
FACING_MODES = ("back_only", "any")


class RenderError(Exception):
    """Invalid render configuration."""


@dataclass(frozen=True)
class RenderConfig:
    """Ray-cast policy: facing filter, ray length, multi-object combine rule.

    t_max None means delta + d_max + 1 mm, resolved against the grid.
    """

    facing: str = "back_only"
    t_max: float | None = None
    combine: str = "max"

    def validate(self):
        if self.facing not in FACING_MODES:
            raise RenderError(f"facing must be one of {FACING_MODES}, got {self.facing!r}")
        if self.combine not in COMBINE_MODES:
            raise RenderError(f"combine must be one of {COMBINE_MODES}, got {self.combine!r}")
        if self.t_max is not None and not self.t_max > 0:
            raise RenderError(f"t_max must be positive, got {self.t_max}")

    def resolve_t_max(self, grid: SensingGrid) -> float:
        if self.t_max is not None:
            return float(self.t_max)
        return grid.delta + grid.d_max + 0.001


@dataclass(frozen=True)
class RenderObject:
    """A mesh with its acceleration structure, placed by a rigid pose."""

    mesh: TriangleMesh
    bvh: Bvh
    pose: RigidPose

    @staticmethod
    def from_mesh(mesh: TriangleMesh, pose: RigidPose | None = None) -> "RenderObject":
        return RenderObject(mesh, build_bvh(mesh), identity_pose() if pose is None else pose)

    def with_pose(self, pose: RigidPose) -> "RenderObject":
        return RenderObject(self.mesh, self.bvh, pose)


@dataclass(frozen=True)
class SceneState:
    """Poses of the sensor and every object for one rendered frame."""

    sensor_pose: RigidPose
    objects: tuple[RenderObject, ...]

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))


@dataclass(frozen=True)
class DeformMap:
    """Per-pixel deformation depths in meters, shape (H, W), float64."""

    depths: np.ndarray
    d_max: float

    @property
    def H(self) -> int:
        return self.depths.shape[0]

    @property
    def W(self) -> int:
        return self.depths.shape[1]


def render_deform_map(grid: SensingGrid, scene: SceneState, cfg: RenderConfig | None = None) -> DeformMap:
    """Render one deformation map; no contact yields the zero map."""
    if cfg is None:
        cfg = RenderConfig()
    cfg.validate()
    t_max = cfg.resolve_t_max(grid)

    _kernels.configure_threads()
    facing_code = _kernels.FACING_BACK_ONLY if cfg.facing == "back_only" else _kernels.FACING_ANY

    n = grid.H * grid.W
    depths = np.zeros(n)
    out_t = np.empty(n)
    out_id = np.empty(n, dtype=np.int32)
    for obj in scene.objects:
        rel = compose(inverse(obj.pose), scene.sensor_pose)
        origins = np.ascontiguousarray(rel.apply_point(grid.points_flat))
        directions = np.ascontiguousarray(rel.apply_vector(grid.normals_flat))
        v0, v1, v2 = _triangle_corners(obj.mesh)
        _kernels.raycast_grid(
            obj.bvh.node_min,
            obj.bvh.node_max,
            obj.bvh.node_left,
            obj.bvh.node_right,
            obj.bvh.node_count,
            obj.bvh.tri_perm,
            v0,
            v1,
            v2,
            obj.mesh.twice_areas,
            origins,
            directions,
            t_max,
            facing_code,
            out_t,
            out_id,
        )
        hit = out_id >= 0
        obj_depth = np.where(hit, np.clip(out_t - grid.delta, 0.0, grid.d_max), 0.0)
        np.maximum(depths, obj_depth, out=depths)

    depths = depths.reshape(grid.H, grid.W)
    depths.setflags(write=False)
    return DeformMap(depths, grid.d_max)


def render_batch(grid: SensingGrid, scenes: Sequence[SceneState], cfg: RenderConfig | None = None) -> list[DeformMap]:
    """Render independent environments sharing one sensing grid.

    Result i is bit-identical to render_deform_map(grid, scenes[i], cfg);
    parallelism lives inside each render, so batch order cannot affect values.
    """
    return [render_deform_map(grid, scene, cfg) for scene in scenes]


def _triangle_corners(mesh: TriangleMesh) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    tri = mesh.triangles
    return (
        np.ascontiguousarray(mesh.vertices[tri[:, 0]]),
        np.ascontiguousarray(mesh.vertices[tri[:, 1]]),
        np.ascontiguousarray(mesh.vertices[tri[:, 2]]),
    )
