"""Geometry-based simulation of vision-based tactile sensors.

Renders per-pixel deformation maps by casting rays from a sensor's sensing
surface into posed object meshes, and provides the surrounding toolkit:
sensing-grid generation for flat and curved fingertips, contact signals,
map comparison metrics, trajectory replay, and a scaling bench.
"""

from ._version import __version__
from .bench import (
    DEFAULT_COUNTS,
    BenchConfig,
    BenchError,
    BenchResult,
    BenchRow,
    bench_summary,
    fit_linear_memory,
    linear_fit,
    map_checksum,
    random_scene_states,
    run_bench,
    write_bench_csv,
)
from .bvh import Bvh, Ray, RayHit, build_bvh, exhaustive_first_hit, raycast_first_hit
from .mesh import MeshLoadError, TriangleMesh, load_mesh, save_obj
from .metrics import (
    ComparisonReport,
    FrameComparison,
    MetricsError,
    compare_sequences,
    deform_iou,
    depth_error,
    force_l2,
    position_error,
    position_error_pixels,
)
from .render import (
    DeformMap,
    RenderConfig,
    RenderError,
    RenderObject,
    SceneState,
    render_batch,
    render_deform_map,
)
from .replay import ReplayError, ReplayOutput, replay
from .scene import LoadedScene, SceneError, load_scene, scene_from_config, scene_state
from .sensor import (
    CylindricalPatch,
    FlatRect,
    MeshSurface,
    SensingGrid,
    SensorModelError,
    SphericalCap,
    generate_sensing_grid,
    grid_world_points,
    save_grid_export,
)
from .shapes import box_mesh, cylinder_mesh, icosphere_mesh
from .signals import (
    DEFAULT_STIFFNESS,
    DEFAULT_TAU,
    ContactSignals,
    ForceModel,
    SignalsError,
    compute_signals,
    contact_mask,
    signals_record,
)
from .tmap import TmapFormatError, load_tmap, save_csv, save_pgm, save_tmap
from .trajectory import (
    Trajectory,
    TrajectoryError,
    TrajectoryFrame,
    load_trajectory,
    make_press_trajectory,
    pose_from_json,
    pose_to_json,
    save_trajectory,
)
from .transforms import (
    RigidPose,
    compose,
    identity_pose,
    inverse,
    quat_conj,
    quat_from_axis_angle,
    quat_mul,
    quat_to_matrix,
)

__all__ = [
    "__version__",
    "BenchConfig",
    "BenchError",
    "BenchResult",
    "BenchRow",
    "Bvh",
    "ComparisonReport",
    "ContactSignals",
    "CylindricalPatch",
    "DEFAULT_COUNTS",
    "DEFAULT_STIFFNESS",
    "DEFAULT_TAU",
    "DeformMap",
    "FlatRect",
    "ForceModel",
    "FrameComparison",
    "LoadedScene",
    "MeshLoadError",
    "MeshSurface",
    "MetricsError",
    "Ray",
    "RayHit",
    "RenderConfig",
    "RenderError",
    "RenderObject",
    "ReplayError",
    "ReplayOutput",
    "RigidPose",
    "SceneError",
    "SceneState",
    "SensingGrid",
    "SensorModelError",
    "SignalsError",
    "SphericalCap",
    "TmapFormatError",
    "Trajectory",
    "TrajectoryError",
    "TrajectoryFrame",
    "TriangleMesh",
    "bench_summary",
    "box_mesh",
    "build_bvh",
    "compare_sequences",
    "compose",
    "compute_signals",
    "contact_mask",
    "cylinder_mesh",
    "deform_iou",
    "depth_error",
    "exhaustive_first_hit",
    "fit_linear_memory",
    "force_l2",
    "generate_sensing_grid",
    "grid_world_points",
    "icosphere_mesh",
    "identity_pose",
    "inverse",
    "linear_fit",
    "load_mesh",
    "load_scene",
    "load_tmap",
    "load_trajectory",
    "make_press_trajectory",
    "map_checksum",
    "position_error",
    "position_error_pixels",
    "pose_from_json",
    "pose_to_json",
    "quat_conj",
    "quat_from_axis_angle",
    "quat_mul",
    "quat_to_matrix",
    "random_scene_states",
    "raycast_first_hit",
    "render_batch",
    "render_deform_map",
    "replay",
    "run_bench",
    "save_csv",
    "save_grid_export",
    "save_obj",
    "save_pgm",
    "save_tmap",
    "save_trajectory",
    "scene_from_config",
    "scene_state",
    "signals_record",
    "write_bench_csv",
]
