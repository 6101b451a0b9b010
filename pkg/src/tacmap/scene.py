"""Scene configuration files and prepared scenes.

A scene config is a JSON document:

    {
      "sensor": {"variant": "flat_rect", "dims": {"x_m": 0.02, "y_m": 0.02},
                 "H": 64, "W": 64, "delta_m": 0.0, "d_max_m": 0.002},
      "objects": [{"name": "cube", "mesh": "cube.obj", "unit_scale": 0.001}],
      "render": {"facing": "back_only", "t_max_m": null, "combine": "max"},
      "force": {"k_n_per_m3": 1e6},
      "tau_m": 5e-5
    }

All lengths are meters, angles radians. Mesh paths resolve relative to the
config file. Sensor variants: flat_rect (dims x_m, y_m), spherical_cap
(radius_m, half_angle_rad), cylindrical_patch (radius_m, length_m,
arc_half_angle_rad). Mesh-chart sensors carry arrays and are constructed in
code, not from config files.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .mesh import MeshLoadError, load_mesh
from .render import RenderConfig, RenderError, RenderObject, SceneState
from .sensor import (
    CylindricalPatch,
    FlatRect,
    SensingGrid,
    SensorModelError,
    SphericalCap,
    generate_sensing_grid,
)
from .signals import DEFAULT_TAU, ForceModel, SignalsError
from .transforms import RigidPose, identity_pose


class SceneError(Exception):
    """Unreadable, malformed, or unresolvable scene config."""


_MISSING = object()


def _field(mapping: dict, key: str, kind, ctx: str, default=_MISSING):
    if key not in mapping:
        if default is _MISSING:
            raise SceneError(f"{ctx}.{key}: missing required field")
        return default
    value = mapping[key]
    if value is None and default is not _MISSING:
        return default
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise SceneError(f"{ctx}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


@dataclass(frozen=True)
class LoadedScene:
    """A config with its grid generated, meshes loaded, and BVHs built."""

    grid: SensingGrid
    objects: dict[str, RenderObject]  # identity poses, declaration order
    render_cfg: RenderConfig
    force_model: ForceModel
    tau: float
    config_digest: str  # sha256 of the canonical config document
    source_path: Path | None = None

    @property
    def object_names(self) -> tuple[str, ...]:
        return tuple(self.objects)


def load_scene(path) -> LoadedScene:
    """Parse and prepare a scene config file."""
    path = Path(path)
    if not path.is_file():
        raise SceneError(f"scene config not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SceneError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return scene_from_config(doc, base_dir=path.parent, source_path=path)


def scene_from_config(doc: dict, base_dir, source_path: Path | None = None) -> LoadedScene:
    if not isinstance(doc, dict):
        raise SceneError(f"scene config must be a JSON object, got {type(doc).__name__}")
    base_dir = Path(base_dir)

    sensor = _field(doc, "sensor", dict, "scene")
    spec = _sensor_spec(sensor)
    h = _field(sensor, "H", int, "sensor")
    w = _field(sensor, "W", int, "sensor")
    delta = _field(sensor, "delta_m", float, "sensor", 0.0)
    d_max = _field(sensor, "d_max_m", float, "sensor", 0.002)
    try:
        grid = generate_sensing_grid(spec, h, w, delta, d_max)
    except SensorModelError as exc:
        raise SceneError(f"sensor: {exc}") from exc

    objects: dict[str, RenderObject] = {}
    for i, entry in enumerate(_field(doc, "objects", list, "scene", [])):
        ctx = f"objects[{i}]"
        if not isinstance(entry, dict):
            raise SceneError(f"{ctx}: expected an object entry")
        name = _field(entry, "name", str, ctx)
        if name in objects:
            raise SceneError(f"{ctx}.name: duplicate object name {name!r}")
        mesh_rel = _field(entry, "mesh", str, ctx)
        unit_scale = _field(entry, "unit_scale", float, ctx, 1.0)
        mesh_path = (base_dir / mesh_rel).resolve()
        try:
            mesh = load_mesh(mesh_path, unit_scale=unit_scale)
        except FileNotFoundError as exc:
            raise SceneError(f"{ctx}.mesh: mesh file not found: {mesh_path}") from exc
        except MeshLoadError as exc:
            raise SceneError(f"{ctx}.mesh: {exc}") from exc
        objects[name] = RenderObject.from_mesh(mesh, identity_pose())

    render = _field(doc, "render", dict, "scene", {})
    cfg = RenderConfig(
        facing=_field(render, "facing", str, "render", "back_only"),
        t_max=_field(render, "t_max_m", float, "render", None),
        combine=_field(render, "combine", str, "render", "max"),
    )
    try:
        cfg.validate()
    except RenderError as exc:
        raise SceneError(f"render: {exc}") from exc

    force = _field(doc, "force", dict, "scene", {})
    force_model = ForceModel(k=_field(force, "k_n_per_m3", float, "force", ForceModel().k))
    try:
        force_model.validate()
    except SignalsError as exc:
        raise SceneError(f"force: {exc}") from exc

    tau = _field(doc, "tau_m", float, "scene", DEFAULT_TAU)
    if tau < 0:
        raise SceneError(f"tau_m: must be >= 0, got {tau}")

    digest = hashlib.sha256(json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()).hexdigest()
    return LoadedScene(grid, objects, cfg, force_model, tau, digest, source_path)


def _sensor_spec(sensor: dict):
    variant = _field(sensor, "variant", str, "sensor")
    dims = _field(sensor, "dims", dict, "sensor")
    ctx = "sensor.dims"
    if variant == "flat_rect":
        return FlatRect(_field(dims, "x_m", float, ctx), _field(dims, "y_m", float, ctx))
    if variant == "spherical_cap":
        return SphericalCap(_field(dims, "radius_m", float, ctx), _field(dims, "half_angle_rad", float, ctx))
    if variant == "cylindrical_patch":
        return CylindricalPatch(
            _field(dims, "radius_m", float, ctx),
            _field(dims, "length_m", float, ctx),
            _field(dims, "arc_half_angle_rad", float, ctx),
        )
    raise SceneError(f"sensor.variant: unknown variant {variant!r} (expected flat_rect, spherical_cap, or cylindrical_patch)")


def scene_state(
    scene: LoadedScene,
    sensor_pose: RigidPose | None = None,
    object_poses: dict[str, RigidPose] | None = None,
) -> SceneState:
    """Pose the scene's objects for one frame; unnamed objects stay at identity."""
    if sensor_pose is None:
        sensor_pose = identity_pose()
    object_poses = dict(object_poses or {})
    unknown = set(object_poses) - set(scene.objects)
    if unknown:
        raise SceneError(f"pose given for unknown object(s): {', '.join(sorted(unknown))}")
    posed = tuple(
        obj.with_pose(object_poses[name]) if name in object_poses else obj for name, obj in scene.objects.items()
    )
    return SceneState(sensor_pose, posed)
