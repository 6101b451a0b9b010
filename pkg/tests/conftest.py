from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

import tacmap as tm

REPO_ROOT = Path(__file__).resolve().parent.parent
PRESS6_DIR = REPO_ROOT / "fixtures" / "press6"


@pytest.fixture(scope="session")
def flat_grid() -> tm.SensingGrid:
    return tm.generate_sensing_grid(tm.FlatRect(0.02, 0.02), 64, 64, delta=0.0, d_max=0.002)


@pytest.fixture(scope="session")
def sphere5mm() -> tm.TriangleMesh:
    return tm.icosphere_mesh(0.005, subdivisions=4)


@pytest.fixture(scope="session")
def pressed_sphere(sphere5mm) -> tm.SceneState:
    # tip 1 mm below the surface: center at z = R - press
    pose = tm.RigidPose(np.array([1.0, 0.0, 0.0, 0.0]), np.array([0.0, 0.0, 0.004]))
    return tm.SceneState(tm.identity_pose(), (tm.RenderObject.from_mesh(sphere5mm, pose),))


@pytest.fixture(scope="session")
def press6_scene() -> tm.LoadedScene:
    return tm.load_scene(PRESS6_DIR / "scene.json")


@pytest.fixture(scope="session")
def press6_trajectory() -> tm.Trajectory:
    return tm.load_trajectory(PRESS6_DIR / "press.jsonl")


def write_cube_scene(dir_path: Path, h: int = 64, w: int = 64, d_max: float = 0.002) -> Path:
    """Write a self-contained flat-sensor + 10 mm cube scene; returns the config path."""
    dir_path.mkdir(parents=True, exist_ok=True)
    tm.save_obj(dir_path / "cube.obj", tm.box_mesh(size=(0.01, 0.01, 0.01)), unit_scale=0.001)
    config = {
        "sensor": {
            "variant": "flat_rect",
            "dims": {"x_m": 0.02, "y_m": 0.02},
            "H": h,
            "W": w,
            "delta_m": 0.0,
            "d_max_m": d_max,
        },
        "objects": [{"name": "cube", "mesh": "cube.obj", "unit_scale": 0.001}],
        "force": {"k_n_per_m3": 1.0e6},
        "tau_m": 5.0e-5,
    }
    path = dir_path / "scene.json"
    path.write_text(json.dumps(config, indent=2) + "\n")
    return path


def random_pose(rng: np.random.Generator, span: float = 0.01) -> tm.RigidPose:
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    q = tm.quat_from_axis_angle(axis, rng.uniform(0.0, np.pi))
    return tm.RigidPose(q, rng.uniform(-span, span, size=3))
