"""Timestamped pose sequences and the line-delimited JSON trajectory format.

One frame per line, append-friendly for recorded rig logs:

    {"ts": 0.0,
     "sensor_pose": {"q": [1, 0, 0, 0], "t": [0, 0, 0]},
     "objects": {"cube": {"q": [1, 0, 0, 0], "t": [0, 0, 0.002]}}}

Quaternions are wxyz, translations meters. Frames are rendered exactly as
recorded; there is no pose interpolation. Objects omitted from a frame stay
at their scene placement (identity).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .mesh import TriangleMesh
from .transforms import RigidPose, identity_pose


class TrajectoryError(Exception):
    """Malformed trajectory file or invalid frame sequence."""


def pose_to_json(pose: RigidPose) -> dict:
    return {"q": [float(v) for v in pose.q], "t": [float(v) for v in pose.t]}


def pose_from_json(doc, ctx: str) -> RigidPose:
    if not isinstance(doc, dict) or "q" not in doc or "t" not in doc:
        raise TrajectoryError(f"{ctx}: pose must be an object with q[4] (wxyz) and t[3] (m)")
    q, t = doc["q"], doc["t"]
    if not (isinstance(q, list) and len(q) == 4 and all(isinstance(v, (int, float)) for v in q)):
        raise TrajectoryError(f"{ctx}.q: expected 4 numbers (wxyz)")
    if not (isinstance(t, list) and len(t) == 3 and all(isinstance(v, (int, float)) for v in t)):
        raise TrajectoryError(f"{ctx}.t: expected 3 numbers (m)")
    try:
        return RigidPose(np.array(q, dtype=float), np.array(t, dtype=float))
    except ValueError as exc:
        raise TrajectoryError(f"{ctx}: {exc}") from exc


@dataclass(frozen=True)
class TrajectoryFrame:
    ts: float
    sensor_pose: RigidPose = field(default_factory=identity_pose)
    object_poses: dict[str, RigidPose] = field(default_factory=dict)


@dataclass(frozen=True)
class Trajectory:
    frames: tuple[TrajectoryFrame, ...]

    def __post_init__(self):
        frames = tuple(self.frames)
        object.__setattr__(self, "frames", frames)
        ts = [f.ts for f in frames]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise TrajectoryError("timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)

    def object_names(self) -> set[str]:
        names: set[str] = set()
        for f in self.frames:
            names.update(f.object_poses)
        return names


def load_trajectory(path) -> Trajectory:
    path = Path(path)
    if not path.is_file():
        raise TrajectoryError(f"trajectory file not found: {path}")
    frames = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        ctx = f"{path.name}:{lineno}"
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TrajectoryError(f"{ctx}: invalid JSON: {exc.msg}") from exc
        if not isinstance(doc, dict) or "ts" not in doc:
            raise TrajectoryError(f"{ctx}: frame must be an object with a ts field")
        ts = doc["ts"]
        if not isinstance(ts, (int, float)) or isinstance(ts, bool):
            raise TrajectoryError(f"{ctx}.ts: expected a number, got {ts!r}")
        sensor_pose = pose_from_json(doc["sensor_pose"], f"{ctx}.sensor_pose") if "sensor_pose" in doc else identity_pose()
        object_poses = {}
        for name, pdoc in (doc.get("objects") or {}).items():
            object_poses[name] = pose_from_json(pdoc, f"{ctx}.objects.{name}")
        frames.append(TrajectoryFrame(float(ts), sensor_pose, object_poses))
    if not frames:
        raise TrajectoryError(f"{path}: no frames")
    return Trajectory(tuple(frames))


def save_trajectory(path, trajectory: Trajectory) -> None:
    lines = []
    for f in trajectory:
        doc = {
            "ts": f.ts,
            "sensor_pose": pose_to_json(f.sensor_pose),
            "objects": {name: pose_to_json(p) for name, p in f.object_poses.items()},
        }
        lines.append(json.dumps(doc, sort_keys=True))
    Path(path).write_text("\n".join(lines) + "\n")


def make_press_trajectory(
    object_name: str,
    mesh: TriangleMesh,
    axis: np.ndarray,
    start_clearance: float,
    end_depth: float,
    steps: int,
    d_max: float,
    dwell: int = 0,
    dt: float = 0.1,
) -> Trajectory:
    """Linear press of one object along -axis, from clearance into the sensor.

    The object's tip (its lowest vertex along axis) moves linearly from
    height +start_clearance to -end_depth across `steps` frames, then holds
    the final height for `dwell` extra frames. Heights are measured along
    `axis` from the surface's zero level, so negative tip height means the
    tip has pressed end_depth past it.
    """
    if steps < 2:
        raise TrajectoryError(f"steps must be >= 2, got {steps}")
    if not start_clearance > 0:
        raise TrajectoryError(f"start_clearance must be positive, got {start_clearance}")
    if not 0 < end_depth <= d_max:
        raise TrajectoryError(f"end_depth must be in (0, d_max={d_max}], got {end_depth}")
    if dwell < 0:
        raise TrajectoryError(f"dwell must be >= 0, got {dwell}")
    if not dt > 0:
        raise TrajectoryError(f"dt must be positive, got {dt}")
    axis = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(axis)
    # Tolerate decimal truncation in hand-typed components, but reject
    # vectors that clearly carry a magnitude.
    if abs(norm - 1.0) > 1e-6:
        raise TrajectoryError(f"axis must be a unit vector, |axis| = {norm}")
    axis = axis / norm

    tip0 = float((mesh.vertices @ axis).min())
    heights = np.linspace(start_clearance, -end_depth, steps)
    heights = np.concatenate([heights, np.full(dwell, heights[-1])])
    frames = []
    for i, h in enumerate(heights):
        pose = RigidPose(np.array([1.0, 0.0, 0.0, 0.0]), (h - tip0) * axis)
        frames.append(TrajectoryFrame(ts=i * dt, object_poses={object_name: pose}))
    return Trajectory(tuple(frames))
