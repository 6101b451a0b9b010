"""Command-line interface.

Subcommands: render, replay, compare, bench, grid, make-press. All lengths
are meters and quaternions are wxyz order. Machine-readable results go to
stdout as JSON; diagnostics go to stderr. Exit codes: 0 ok, 2 usage or
input error, 3 I/O error, 4 internal error. TACMAP_THREADS caps render
worker threads (0 or unset picks the host default).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ._version import __version__
from .bench import BenchConfig, BenchError, bench_summary, run_bench, write_bench_csv
from .mesh import MeshLoadError
from .metrics import MetricsError, compare_sequences
from .render import RenderError, render_deform_map
from .replay import ReplayError, replay
from .scene import SceneError, load_scene, scene_state
from .sensor import SensorModelError, save_grid_export
from .signals import SignalsError, compute_signals, signals_record
from .tmap import TmapFormatError, load_tmap, save_csv, save_pgm, save_tmap
from .trajectory import TrajectoryError, load_trajectory, make_press_trajectory, save_trajectory
from .transforms import RigidPose, identity_pose


class CliInputError(Exception):
    """Bad command-line value (reported with the offending option)."""


_INPUT_ERRORS = (
    CliInputError,
    SceneError,
    TrajectoryError,
    MeshLoadError,
    SensorModelError,
    RenderError,
    SignalsError,
    MetricsError,
    TmapFormatError,
    ReplayError,
    BenchError,
)


def entry() -> None:
    sys.exit(main(sys.argv[1:]))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - internal invariant violations
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tacmap",
        description="Geometry-based tactile sensor simulation: deformation-map rendering and analysis.",
    )
    parser.add_argument("--version", action="version", version=f"tacmap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render one deformation map to a TMAP file")
    p.add_argument("--scene", required=True, help="scene config JSON")
    p.add_argument("--sensor-pose", default=None, metavar="QW,QX,QY,QZ,TX,TY,TZ", help="sensor pose (default identity)")
    p.add_argument(
        "--object-pose",
        action="append",
        default=[],
        metavar="NAME=QW,QX,QY,QZ,TX,TY,TZ",
        help="pose one named object (repeatable; unnamed objects stay at identity)",
    )
    p.add_argument("--out", required=True, help="output TMAP path")
    p.add_argument("--pgm", default=None, help="also write a 16-bit PGM preview")
    p.add_argument("--csv", default=None, help="also write a CSV dump")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("replay", help="render every frame of a trajectory")
    p.add_argument("--scene", required=True)
    p.add_argument("--trajectory", required=True, help="trajectory JSONL")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--subsample", type=int, default=1, help="render every k-th frame")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("compare", help="compare two TMAP files or directories")
    p.add_argument("--a", required=True, help="TMAP file or directory")
    p.add_argument("--b", required=True, help="TMAP file or directory")
    p.add_argument("--tau", type=float, default=None, help="contact threshold, m (default from scene or 5e-5)")
    p.add_argument("--scene", default=None, help="scene config enabling position and force metrics")
    p.add_argument("--out", required=True, help="output directory for report.json and report.csv")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="throughput and memory scaling across environment counts")
    p.add_argument("--scene", required=True)
    p.add_argument("--counts", default="16,64,256,1024", help="comma-separated ascending environment counts")
    p.add_argument("--frames", type=int, default=4, help="timed frames per count")
    p.add_argument("--warmup", type=int, default=1, help="untimed warmup renders per count")
    p.add_argument("--seed", type=int, default=0, help="pose randomization seed")
    p.add_argument("--out", required=True, help="output directory for bench.csv and bench.json")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("grid", help="export the sensing grid (descriptor JSON + f32 blob)")
    p.add_argument("--scene", required=True)
    p.add_argument("--out", required=True, help="output directory for grid.json and grid.blob")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("make-press", help="generate a linear press trajectory for one object")
    p.add_argument("--scene", required=True)
    p.add_argument("--object", required=True, help="object name from the scene")
    p.add_argument("--axis", default="0,0,1", metavar="X,Y,Z", help="press axis, unit vector (default 0,0,1)")
    p.add_argument("--clearance", type=float, required=True, help="starting tip clearance, m")
    p.add_argument("--depth", type=float, required=True, help="final press depth, m (<= sensor d_max)")
    p.add_argument("--steps", type=int, required=True, help="number of frames (>= 2)")
    p.add_argument("--dwell", type=int, default=0, help="extra frames holding the final depth")
    p.add_argument("--dt", type=float, default=0.1, help="seconds between frames")
    p.add_argument("--out", required=True, help="output trajectory JSONL path")
    p.set_defaults(func=cmd_make_press)

    return parser


def _parse_pose(text: str, option: str) -> RigidPose:
    parts = text.split(",")
    if len(parts) != 7:
        raise CliInputError(f"{option}: expected 7 comma-separated numbers qw,qx,qy,qz,tx,ty,tz, got {len(parts)}")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise CliInputError(f"{option}: non-numeric component in {text!r}") from None
    try:
        return RigidPose(np.array(values[:4]), np.array(values[4:]))
    except ValueError as exc:
        raise CliInputError(f"{option}: {exc}") from exc


def _parse_vector(text: str, option: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise CliInputError(f"{option}: expected 3 comma-separated numbers, got {len(parts)}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        raise CliInputError(f"{option}: non-numeric component in {text!r}") from None


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True))


def cmd_render(args) -> int:
    scene = load_scene(args.scene)
    sensor_pose = _parse_pose(args.sensor_pose, "--sensor-pose") if args.sensor_pose else identity_pose()
    object_poses = {}
    for spec in args.object_pose:
        name, sep, pose_text = spec.partition("=")
        if not sep or not name:
            raise CliInputError(f"--object-pose: expected NAME=qw,qx,qy,qz,tx,ty,tz, got {spec!r}")
        object_poses[name] = _parse_pose(pose_text, f"--object-pose {name}")

    state = scene_state(scene, sensor_pose, object_poses)
    deform = render_deform_map(scene.grid, state, scene.render_cfg)
    save_tmap(args.out, deform)
    if args.pgm:
        save_pgm(args.pgm, deform)
    if args.csv:
        save_csv(args.csv, deform)
    sig = compute_signals(deform, scene.grid, scene.tau, scene.force_model)
    _emit(
        {
            "out": str(args.out),
            "H": deform.H,
            "W": deform.W,
            "max_depth_m": sig.max_depth,
            "contact_area_m2": sig.contact_area,
            "in_contact": sig.in_contact,
        }
    )
    return 0


def cmd_replay(args) -> int:
    scene = load_scene(args.scene)
    trajectory = load_trajectory(args.trajectory)
    output = replay(scene, trajectory, args.out, subsample=args.subsample)
    _emit(
        {
            "out_dir": str(output.out_dir),
            "num_frames": output.num_frames,
            "manifest": str(output.out_dir / "manifest.json"),
        }
    )
    return 0


def _load_map_sequence(path_text: str, option: str):
    path = Path(path_text)
    if path.is_dir():
        files = sorted(path.glob("*.tmap"))
        if not files:
            raise CliInputError(f"{option}: no .tmap files in directory {path}")
        return [load_tmap(f) for f in files]
    if not path.is_file():
        raise CliInputError(f"{option}: no such file or directory: {path}")
    return [load_tmap(path)]


def cmd_compare(args) -> int:
    maps_a = _load_map_sequence(args.a, "--a")
    maps_b = _load_map_sequence(args.b, "--b")
    scene = load_scene(args.scene) if args.scene else None
    if args.tau is not None:
        tau = args.tau
    else:
        tau = scene.tau if scene else None
    kwargs = {} if tau is None else {"tau": tau}
    if scene is not None:
        kwargs.update(grid=scene.grid, force_model=scene.force_model)
    report = compare_sequences(maps_a, maps_b, **kwargs)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = report.to_dict()
    (out_dir / "report.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    with (out_dir / "report.csv").open("w", newline="") as fh:
        fh.write("frame,iou,depth_error,position_error_m,force_l2_N\n")
        for f in report.frames:
            cells = [str(f.frame), f"{f.iou:.9g}"]
            for value in (f.depth_error, f.position_error, f.force_l2):
                cells.append("" if value is None else f"{value:.9g}")
            fh.write(",".join(cells) + "\n")
    _emit({"out_dir": str(out_dir), **doc["median"], "num_frames": doc["num_frames"]})
    return 0


def cmd_bench(args) -> int:
    scene = load_scene(args.scene)
    try:
        counts = tuple(int(c) for c in args.counts.split(","))
    except ValueError:
        raise CliInputError(f"--counts: expected comma-separated integers, got {args.counts!r}") from None
    cfg = BenchConfig(counts=counts, frames=args.frames, warmup=args.warmup, seed=args.seed)
    result = run_bench(scene, cfg)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = bench_summary(result)
    write_bench_csv(out_dir / "bench.csv", result)
    (out_dir / "bench.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _emit(
        {
            "out_dir": str(out_dir),
            "rows": len(result.rows),
            "partial": result.partial,
            "memory_fit": summary["memory_fit"],
        }
    )
    return 0


def cmd_grid(args) -> int:
    scene = load_scene(args.scene)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_grid_export(scene.grid, out_dir / "grid.json", out_dir / "grid.blob")
    _emit({"out_dir": str(out_dir), "descriptor": scene.grid.descriptor()})
    return 0


def cmd_make_press(args) -> int:
    scene = load_scene(args.scene)
    if args.object not in scene.objects:
        raise CliInputError(f"--object: {args.object!r} is not in the scene (objects: {', '.join(scene.objects) or 'none'})")
    axis = _parse_vector(args.axis, "--axis")
    trajectory = make_press_trajectory(
        object_name=args.object,
        mesh=scene.objects[args.object].mesh,
        axis=axis,
        start_clearance=args.clearance,
        end_depth=args.depth,
        steps=args.steps,
        d_max=scene.grid.d_max,
        dwell=args.dwell,
        dt=args.dt,
    )
    save_trajectory(args.out, trajectory)
    _emit({"out": str(args.out), "num_frames": len(trajectory)})
    return 0
