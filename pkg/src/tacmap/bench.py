"""Batched-rendering scalability harness.

For each environment count: draw seeded random poses, warm up, time
render_batch over the configured frames while holding every rendered map
live, then read the process peak resident memory. Holding the maps makes
peak memory a function of the environment count, which is what the linear
memory fit measures. Counts run in ascending order so the resident-set
high-water mark at each step is attributable to that step.

Timing fields vary run to run; poses, rendered values, and the first
environment's checksum are deterministic for a given seed.
"""

from __future__ import annotations

import csv
import ctypes
import hashlib
import os
import platform
import resource
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from ._version import __version__
from .render import SceneState, render_batch
from .scene import LoadedScene, scene_state
from .transforms import RigidPose, identity_pose, quat_from_axis_angle

DEFAULT_COUNTS = (16, 64, 256, 1024, 4096, 8192)


class BenchError(Exception):
    """Invalid bench configuration or an unfittable result."""


@dataclass(frozen=True)
class BenchConfig:
    counts: tuple[int, ...] = DEFAULT_COUNTS
    frames: int = 4
    warmup: int = 1
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not self.counts:
            raise BenchError("counts must be nonempty")
        if any(c < 1 for c in self.counts):
            raise BenchError(f"counts must be >= 1, got {self.counts}")
        if any(b <= a for a, b in zip(self.counts, self.counts[1:])):
            raise BenchError(f"counts must be strictly ascending, got {self.counts}")
        if self.frames < 1:
            raise BenchError(f"frames must be >= 1, got {self.frames}")
        if self.warmup < 0:
            raise BenchError(f"warmup must be >= 0, got {self.warmup}")


@dataclass(frozen=True)
class BenchRow:
    env_count: int
    frames: int
    wall_time_s: float | None
    total_renders_per_sec: float | None
    per_env_renders_per_sec: float | None
    peak_mem_bytes: int | None
    env0_checksum: str | None
    status: str  # "ok" or "failed: <reason>"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class BenchResult:
    rows: tuple[BenchRow, ...]
    env: dict
    config: BenchConfig

    @property
    def partial(self) -> bool:
        return any(not row.ok for row in self.rows)


def random_scene_states(scene: LoadedScene, count: int, frame: int, seed: int) -> list[SceneState]:
    """Deterministic random poses for one batch; stream keyed by (seed, count, frame)."""
    rng = np.random.default_rng([seed, count, frame])
    d_max = scene.grid.d_max
    states = []
    for _ in range(count):
        poses = {name: _random_pose(rng, d_max) for name in scene.objects}
        states.append(scene_state(scene, identity_pose(), poses))
    return states


def _random_pose(rng: np.random.Generator, d_max: float) -> RigidPose:
    axis = rng.normal(size=3)
    while np.linalg.norm(axis) < 1e-12:
        axis = rng.normal(size=3)
    q = quat_from_axis_angle(axis / np.linalg.norm(axis), rng.uniform(0.0, 0.2))
    t = np.array(
        [
            rng.uniform(-0.002, 0.002),
            rng.uniform(-0.002, 0.002),
            rng.uniform(-d_max, 0.0),
        ]
    )
    return RigidPose(q, t)


def map_checksum(deform_map) -> str:
    return hashlib.sha256(np.ascontiguousarray(deform_map.depths).tobytes()).hexdigest()


def _reset_peak_rss() -> bool:
    """Start a fresh peak-memory window: return freed allocator pages to the
    OS, then reset the kernel's peak-RSS counter so the next reading covers
    only allocations made after this call. Linux-only; returns False elsewhere."""
    try:
        ctypes.CDLL(None).malloc_trim(0)
    except (OSError, AttributeError):
        pass
    try:
        with open("/proc/self/clear_refs", "w") as fh:
            fh.write("5")
        return True
    except OSError:
        return False


def _peak_rss_bytes() -> int:
    try:
        with open("/proc/self/status") as fh:
            for line in fh:
                if line.startswith("VmHWM:"):
                    return int(line.split()[1]) * 1024
    except OSError:
        pass
    rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    # ru_maxrss is kilobytes on Linux, bytes on macOS
    return int(rss if sys.platform == "darwin" else rss * 1024)


def run_bench(scene: LoadedScene, cfg: BenchConfig | None = None) -> BenchResult:
    """Measure throughput and peak memory per environment count.

    A count that fails (for example allocation failure) is recorded with a
    failed status and the run continues, so earlier rows survive.
    """
    if cfg is None:
        cfg = BenchConfig()
    cfg.validate()
    threads = _kernels.configure_threads()
    # compile outside the measured counts so the first count's peak-memory
    # reading reflects its batch, not the jit allocator
    _kernels.warmup()

    rows = []
    resettable = _reset_peak_rss()
    for count in cfg.counts:
        try:
            rows.append(_bench_count(scene, count, cfg))
        except MemoryError:
            rows.append(BenchRow(count, cfg.frames, None, None, None, None, None, "failed: allocation"))

    env = {
        "cpu_count": os.cpu_count(),
        "render_threads": threads,
        "platform": platform.platform(),
        "python": platform.python_version(),
        "toolkit_version": __version__,
        "peak_mem_source": (
            "VmHWM, reset per count via /proc/self/clear_refs"
            if resettable
            else "getrusage ru_maxrss, process high-water (KB on linux, bytes on darwin)"
        ),
    }
    return BenchResult(tuple(rows), env, cfg)


def _bench_count(scene: LoadedScene, count: int, cfg: BenchConfig) -> BenchRow:
    batches = [random_scene_states(scene, count, frame, cfg.seed) for frame in range(cfg.frames)]
    for _ in range(cfg.warmup):
        render_batch(scene.grid, batches[0], scene.render_cfg)

    _reset_peak_rss()
    t0 = time.perf_counter()
    held = [render_batch(scene.grid, states, scene.render_cfg) for states in batches]
    wall = time.perf_counter() - t0

    checksum = map_checksum(held[0][0])
    peak = _peak_rss_bytes()
    del held
    renders = count * cfg.frames
    return BenchRow(
        env_count=count,
        frames=cfg.frames,
        wall_time_s=wall,
        total_renders_per_sec=renders / wall,
        per_env_renders_per_sec=cfg.frames / wall,
        peak_mem_bytes=peak,
        env0_checksum=checksum,
        status="ok",
    )


def linear_fit(x, y) -> tuple[float, float, float]:
    """Least-squares line through (x, y); returns (slope, intercept, r_squared)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise BenchError(f"need >= 3 points for a linear fit, got {x.size}")
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    ss_res = float((residuals**2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r_squared


def fit_linear_memory(result: BenchResult) -> tuple[float, float, float]:
    """Fit peak memory versus environment count over the successful rows."""
    ok = [row for row in result.rows if row.ok]
    if len(ok) < 3:
        raise BenchError(f"need >= 3 successful counts for the memory fit, got {len(ok)}")
    return linear_fit([row.env_count for row in ok], [row.peak_mem_bytes for row in ok])


def write_bench_csv(path, result: BenchResult) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["env_count", "frames", "total_renders_per_sec", "per_env_renders_per_sec", "peak_mem_bytes", "status"]
        )
        for row in result.rows:
            writer.writerow(
                [
                    row.env_count,
                    row.frames,
                    "" if row.total_renders_per_sec is None else f"{row.total_renders_per_sec:.6g}",
                    "" if row.per_env_renders_per_sec is None else f"{row.per_env_renders_per_sec:.6g}",
                    "" if row.peak_mem_bytes is None else row.peak_mem_bytes,
                    row.status,
                ]
            )


def bench_summary(result: BenchResult) -> dict:
    try:
        slope, intercept, r_squared = fit_linear_memory(result)
        fit = {"slope_bytes_per_env": slope, "intercept_bytes": intercept, "r_squared": r_squared}
    except BenchError:
        fit = None
    return {
        "env": result.env,
        "config": {
            "counts": list(result.config.counts),
            "frames": result.config.frames,
            "warmup": result.config.warmup,
            "seed": result.config.seed,
        },
        "partial": result.partial,
        "memory_fit": fit,
        "rows": [
            {
                "env_count": row.env_count,
                "frames": row.frames,
                "wall_time_s": row.wall_time_s,
                "total_renders_per_sec": row.total_renders_per_sec,
                "per_env_renders_per_sec": row.per_env_renders_per_sec,
                "peak_mem_bytes": row.peak_mem_bytes,
                "env0_checksum": row.env0_checksum,
                "status": row.status,
            }
            for row in result.rows
        ],
    }
