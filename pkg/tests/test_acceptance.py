"""End-to-end acceptance gate.

One test per shipped guarantee; each prints an ``[acceptance]`` line so a
plain ``pytest -v tests/test_acceptance.py`` shows one pass/fail verdict per
guarantee.
"""
from __future__ import annotations

import time

import numpy as np
import pytest

import tacmap as tm
from tacmap import _kernels
from conftest import PRESS6_DIR, random_pose


def announce(name: str) -> None:
    print(f"[acceptance] {name}: PASS")


@pytest.fixture(scope="module", autouse=True)
def compiled_kernels():
    # compile the ray-cast kernels once so timed sections measure steady-state
    _kernels.configure_threads()
    _kernels.warmup()


@pytest.fixture(scope="module")
def press6_scene():
    return tm.load_scene(PRESS6_DIR / "scene.json")


# --------------------------------------------------------------------------
# 1. sphere pressed into a flat pad matches the closed-form depth profile


def test_sphere_on_flat_pad_matches_closed_form():
    R, press = 5e-3, 1e-3
    grid = tm.generate_sensing_grid(tm.FlatRect(0.02, 0.02), 64, 64, delta=0.0, d_max=0.002)
    sphere = tm.icosphere_mesh(R, subdivisions=4)
    pose = tm.RigidPose(np.array([1.0, 0.0, 0.0, 0.0]), np.array([0.0, 0.0, R - press]))
    state = tm.SceneState(tm.identity_pose(), (tm.RenderObject.from_mesh(sphere, pose),))

    t0 = time.perf_counter()
    deform = tm.render_deform_map(grid, state)
    elapsed = time.perf_counter() - t0

    r = np.hypot(grid.points[..., 0], grid.points[..., 1])
    inside = r <= R
    analytic = np.where(inside, press - R + np.sqrt(np.where(inside, R * R - r * r, 0.0)), 0.0)
    analytic = np.clip(analytic, 0.0, None)

    core = r <= 2.7e-3  # inner 90% of the 3 mm contact circle
    assert np.all(np.abs(deform.depths[core] - analytic[core]) <= 0.02 * press), (
        f"max deviation {np.abs(deform.depths[core] - analytic[core]).max():.3e} m"
    )

    # contact boundary: outermost touched pixel within one pixel pitch of 3 mm
    pitch = 0.02 / 64
    r_boundary = r[deform.depths > 0].max()
    assert abs(r_boundary - 3e-3) <= pitch, f"boundary at {r_boundary:.4e} m"
    # and no contact appears clearly outside the analytic circle
    assert not (deform.depths[r > 3e-3 + pitch] > 0).any()

    assert elapsed < 1.0, f"render took {elapsed:.3f} s"
    announce("sphere-on-flat-pad closed-form fidelity")


# --------------------------------------------------------------------------
# 2. flat plate pressed onto a spherical-cap fingertip


def test_plate_on_spherical_cap_matches_closed_form():
    R, press = 10e-3, 0.5e-3
    grid = tm.generate_sensing_grid(
        tm.SphericalCap(radius=R, half_angle=np.pi / 3), 64, 64, delta=0.0, d_max=0.002
    )
    # plate bottom face is the exact plane z = -press
    plate = tm.box_mesh((0.04, 0.04, 0.01), center=(0.0, 0.0, 0.005 - press))
    state = tm.SceneState(tm.identity_pose(), (tm.RenderObject.from_mesh(plate),))
    deform = tm.render_deform_map(grid, state)

    # polar angle of each sensing point about the cap centre (0, 0, -R)
    rel = grid.points - np.array([0.0, 0.0, -R])
    theta = np.arccos(np.clip(rel[..., 2] / R, -1.0, 1.0))
    cos_c = (R - press) / R
    theta_c = np.arccos(cos_c)

    inner = theta <= 0.9 * theta_c
    assert inner.sum() > 500  # the inner region spans many pixels at 64x64
    analytic = R - (R - press) / np.cos(theta[inner])
    assert np.all(np.abs(deform.depths[inner] - analytic) <= 0.02 * press), (
        f"max deviation {np.abs(deform.depths[inner] - analytic).max():.3e} m"
    )
    # rays past the contact angle never reach the plate
    assert not (deform.depths[theta > theta_c + 0.02] > 0).any()
    announce("plate-on-spherical-cap closed-form fidelity")


# --------------------------------------------------------------------------
# 3. accelerated ray casting agrees with the exhaustive scan


def test_raycast_matches_exhaustive_scan():
    rng = np.random.default_rng(2024)
    centers = rng.uniform(-1.0, 1.0, size=(200, 3))
    tris = centers[:, None, :] + rng.normal(scale=0.25, size=(200, 3, 3))
    mesh = tm.TriangleMesh.from_arrays(tris.reshape(-1, 3), np.arange(600).reshape(-1, 3))
    bvh = tm.build_bvh(mesh)

    checked = 0
    for _ in range(1000):
        origin = rng.uniform(-2.0, 2.0, size=3)
        target = rng.uniform(-1.0, 1.0, size=3)
        d = target - origin
        ray = tm.Ray(origin, d / np.linalg.norm(d), t_max=8.0)
        fast = tm.raycast_first_hit(bvh, mesh, ray, facing_filter="any")
        slow = tm.exhaustive_first_hit(mesh, ray, facing_filter="any")
        assert (fast is None) == (slow is None)
        if fast is not None:
            assert fast.triangle_id == slow.triangle_id
            assert abs(fast.t - slow.t) <= 1e-9
            checked += 1
    assert checked > 300  # the soup is dense enough that many rays hit
    announce(f"accelerated ray casting = exhaustive scan on {checked} hits")


# --------------------------------------------------------------------------
# 4. depth-equation semantics over randomized scenes


def test_depth_equation_semantics_over_random_scenes():
    R, d_max = 3e-3, 1e-3
    grid = tm.generate_sensing_grid(tm.FlatRect(0.016, 0.016), 16, 16, delta=0.0, d_max=d_max)
    sphere = tm.icosphere_mesh(R, subdivisions=4)
    obj = tm.RenderObject.from_mesh(sphere)
    # a wide ray horizon so pixels engulfed deeper than d_max still see the
    # object's far surface instead of reading as misses
    cfg = tm.RenderConfig(t_max=0.05)
    margin = 5e-5  # tessellation sag of a subdivided sphere is ~2 um at R=3mm
    rng = np.random.default_rng(7)

    engulfed_checked = miss_checked = 0
    for _ in range(100):
        center = np.array(
            [rng.uniform(-6e-3, 6e-3), rng.uniform(-6e-3, 6e-3), rng.uniform(-4e-3, 1e-3)]
        )
        axis = rng.normal(size=3)
        q = tm.quat_from_axis_angle(axis / np.linalg.norm(axis), rng.uniform(0.0, np.pi))
        state = tm.SceneState(tm.identity_pose(), (obj.with_pose(tm.RigidPose(q, center)),))
        deform = tm.render_deform_map(grid, state, cfg)

        # clamp bounds hold everywhere
        assert np.all(deform.depths >= 0.0)
        assert np.all(deform.depths <= d_max)

        # per-pixel classification against the exact circumscribed sphere
        px = grid.points_flat
        ox, oy = px[:, 0] - center[0], px[:, 1] - center[1]
        rho2 = ox * ox + oy * oy
        depths = deform.depths.reshape(-1)

        definite_miss = rho2 >= R * R  # tessellation lies inside the sphere
        assert np.all(depths[definite_miss] == 0.0)
        miss_checked += int(definite_miss.sum())

        inside = rho2 < R * R
        half = np.zeros_like(rho2)
        half[inside] = np.sqrt(R * R - rho2[inside])
        exit_t = (px[:, 2] - center[2]) + half  # distance to the far surface
        entry_t = (px[:, 2] - center[2]) - half
        engulfed = inside & (entry_t <= -margin) & (exit_t >= d_max + margin)
        assert np.all(depths[engulfed] == d_max)
        engulfed_checked += int(engulfed.sum())

        # frame invariance: move the whole scene rigidly, nothing changes
        common = random_pose(rng, span=0.5)
        moved = tm.SceneState(
            tm.compose(common, state.sensor_pose),
            tuple(o.with_pose(tm.compose(common, o.pose)) for o in state.objects),
        )
        again = tm.render_deform_map(grid, moved, cfg)
        assert np.abs(again.depths - deform.depths).max() <= 1e-9

    assert engulfed_checked > 1000 and miss_checked > 1000
    announce(
        f"depth-equation semantics on 100 scenes ({engulfed_checked} engulfed, {miss_checked} miss pixels)"
    )


# --------------------------------------------------------------------------
# 5. batched rendering and replay are exactly reproducible


def test_batch_and_replay_reproducibility(press6_scene, tmp_path):
    states = tm.random_scene_states(press6_scene, count=1024, frame=0, seed=99)
    batched = tm.render_batch(press6_scene.grid, states, press6_scene.render_cfg)
    for i, state in enumerate(states):
        single = tm.render_deform_map(press6_scene.grid, state, press6_scene.render_cfg)
        assert np.array_equal(batched[i].depths, single.depths), f"scene {i} differs"

    trajectory = tm.load_trajectory(PRESS6_DIR / "press.jsonl")
    tm.replay(press6_scene, trajectory, tmp_path / "a")
    tm.replay(press6_scene, trajectory, tmp_path / "b")
    for path in sorted((tmp_path / "a").iterdir()):
        assert path.read_bytes() == (tmp_path / "b" / path.name).read_bytes(), path.name
    announce("1024-scene batch = sequential renders; replay reruns byte-identical")


# --------------------------------------------------------------------------
# 6. comparison metrics reproduce hand-computed oracle values


def test_metric_oracle_values():
    tau = tm.DEFAULT_TAU

    def block(rows, cols, depth=1e-3):
        depths = np.zeros((8, 8))
        depths[np.ix_(rows, cols)] = depth
        return tm.DeformMap(depths, 0.002)

    a = block(range(0, 2), range(0, 2))
    assert tm.deform_iou(a, a, tau) == pytest.approx(1.0, rel=1e-12)
    assert tm.deform_iou(a, block(range(4, 6), range(4, 6)), tau) == pytest.approx(0.0, abs=1e-12)
    assert tm.deform_iou(a, block(range(0, 2), range(1, 3)), tau) == pytest.approx(1.0 / 3.0, rel=1e-12)

    ref = block(range(0, 4), range(0, 4), depth=1.0e-3)
    scaled = block(range(0, 4), range(0, 4), depth=1.2e-3)
    assert tm.depth_error(scaled, ref, tau) == pytest.approx(0.20, rel=1e-12)

    at_origin = tm.ContactSignals((0.0, 0.0), np.zeros(3), 1e-6, 1e-3, 1e-3, np.zeros(3))
    offset = tm.ContactSignals((0.0, 0.0), np.array([3e-3, 4e-3, 0.0]), 1e-6, 1e-3, 1e-3, np.zeros(3))
    assert tm.position_error(at_origin, offset) == pytest.approx(5e-3, rel=1e-12)
    announce("metric oracle values exact to 1e-12")


# --------------------------------------------------------------------------
# 7. scaling from 16 to 1024 environments


def test_scaling_16_to_1024(press6_scene, tmp_path):
    cfg = tm.BenchConfig(counts=(16, 64, 256, 1024), frames=4, warmup=1, seed=0)
    t0 = time.perf_counter()
    result = tm.run_bench(press6_scene, cfg)
    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0, f"bench took {elapsed:.1f} s"
    assert all(row.ok for row in result.rows)

    slope, intercept, r_squared = tm.fit_linear_memory(result)
    assert r_squared >= 0.99, f"memory fit R^2 = {r_squared:.4f}"
    assert slope > 0

    # renders/sec normalized per environment's share of the batch: aggregate
    # throughput at 1024 environments stays within 2x of 16 environments
    by_count = {row.env_count: row for row in result.rows}
    ratio = by_count[1024].total_renders_per_sec / by_count[16].total_renders_per_sec
    assert ratio >= 0.5, f"throughput at 1024 envs fell to {ratio:.2f}x of 16 envs"

    tm.write_bench_csv(tmp_path / "bench.csv", result)
    assert (tmp_path / "bench.csv").exists()
    announce(
        f"scaling 16->1024: memory R^2={r_squared:.4f}, throughput ratio {ratio:.2f}, {elapsed:.0f}s"
    )
