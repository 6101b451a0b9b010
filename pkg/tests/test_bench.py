from __future__ import annotations

import csv
import json

import numpy as np
import pytest

import tacmap as tm
from conftest import write_cube_scene


@pytest.fixture(scope="module")
def cube_scene(tmp_path_factory):
    path = write_cube_scene(tmp_path_factory.mktemp("bench_scene"), h=16, w=16)
    return tm.load_scene(path)


def test_config_validation():
    with pytest.raises(tm.BenchError):
        tm.BenchConfig(counts=())
    with pytest.raises(tm.BenchError):
        tm.BenchConfig(counts=(64, 16))  # must ascend
    with pytest.raises(tm.BenchError):
        tm.BenchConfig(counts=(16,), frames=0)
    tm.BenchConfig(counts=(16, 64))  # valid


def test_random_scene_states_deterministic(cube_scene):
    a = tm.random_scene_states(cube_scene, count=8, frame=3, seed=7)
    b = tm.random_scene_states(cube_scene, count=8, frame=3, seed=7)
    for sa, sb in zip(a, b):
        assert np.array_equal(sa.objects[0].pose.q, sb.objects[0].pose.q)
        assert np.array_equal(sa.objects[0].pose.t, sb.objects[0].pose.t)
    c = tm.random_scene_states(cube_scene, count=8, frame=4, seed=7)
    assert not np.array_equal(a[0].objects[0].pose.t, c[0].objects[0].pose.t)


def test_random_scene_states_poses_valid(cube_scene):
    for state in tm.random_scene_states(cube_scene, count=16, frame=0, seed=1):
        q = state.objects[0].pose.q
        assert np.linalg.norm(q) == pytest.approx(1.0, abs=1e-12)
        t = state.objects[0].pose.t
        assert -cube_scene.grid.d_max <= t[2] <= 0.0
        assert abs(t[0]) <= 2e-3 and abs(t[1]) <= 2e-3


def test_run_bench_single_count(cube_scene):
    result = tm.run_bench(cube_scene, tm.BenchConfig(counts=(16,), frames=2, warmup=1, seed=0))
    assert len(result.rows) == 1
    row = result.rows[0]
    assert row.ok and row.status == "ok"
    assert row.env_count == 16 and row.frames == 2
    assert row.total_renders_per_sec > 0
    assert row.per_env_renders_per_sec == pytest.approx(row.total_renders_per_sec / 16)
    assert row.peak_mem_bytes > 0
    assert len(row.env0_checksum) == 64
    assert not result.partial
    assert result.env["render_threads"] >= 1
    assert result.env["peak_mem_source"]  # measurement mechanism is documented


def test_bench_checksum_matches_direct_render(cube_scene):
    cfg = tm.BenchConfig(counts=(4,), frames=1, warmup=0, seed=11)
    result = tm.run_bench(cube_scene, cfg)
    states = tm.random_scene_states(cube_scene, count=4, frame=0, seed=11)
    direct = tm.render_deform_map(cube_scene.grid, states[0], cube_scene.render_cfg)
    assert result.rows[0].env0_checksum == tm.map_checksum(direct)


def test_bench_rows_repeatable(cube_scene):
    cfg = tm.BenchConfig(counts=(4, 8), frames=1, warmup=0, seed=3)
    r1 = tm.run_bench(cube_scene, cfg)
    r2 = tm.run_bench(cube_scene, cfg)
    assert [r.env0_checksum for r in r1.rows] == [r.env0_checksum for r in r2.rows]


def test_linear_fit_recovers_line():
    x = [16.0, 64.0, 256.0, 1024.0]
    y = [100.0 + 2.0 * v for v in x]
    slope, intercept, r2 = tm.linear_fit(x, y)
    assert slope == pytest.approx(2.0, rel=1e-12)
    assert intercept == pytest.approx(100.0, rel=1e-9)
    assert r2 == pytest.approx(1.0, abs=1e-12)


def test_linear_fit_flags_curvature():
    x = [1.0, 2.0, 4.0, 8.0, 16.0]
    y = [v * v for v in x]
    *_, r2 = tm.linear_fit(x, y)
    assert r2 < 0.99


def test_linear_fit_needs_three_points():
    with pytest.raises(tm.BenchError):
        tm.linear_fit([1.0, 2.0], [1.0, 2.0])


def test_fit_linear_memory_requires_three_ok_rows(cube_scene):
    result = tm.run_bench(cube_scene, tm.BenchConfig(counts=(4, 8), frames=1, warmup=0))
    with pytest.raises(tm.BenchError):
        tm.fit_linear_memory(result)


def test_csv_columns_exact(cube_scene, tmp_path):
    result = tm.run_bench(cube_scene, tm.BenchConfig(counts=(4, 8), frames=1, warmup=0))
    path = tmp_path / "bench.csv"
    tm.write_bench_csv(path, result)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == [
        "env_count",
        "frames",
        "total_renders_per_sec",
        "per_env_renders_per_sec",
        "peak_mem_bytes",
        "status",
    ]
    assert len(rows) == 3
    assert rows[1][0] == "4" and rows[2][0] == "8"
    assert rows[1][5] == "ok"


def test_summary_structure(cube_scene):
    result = tm.run_bench(cube_scene, tm.BenchConfig(counts=(4, 8, 16), frames=1, warmup=0))
    summary = tm.bench_summary(result)
    text = json.dumps(summary)  # must be JSON-serializable
    doc = json.loads(text)
    assert doc["partial"] is False
    assert len(doc["rows"]) == 3
    assert {"env_count", "total_renders_per_sec", "wall_time_s", "env0_checksum"} <= set(doc["rows"][0])
    fit = doc["memory_fit"]
    assert set(fit) == {"slope_bytes_per_env", "intercept_bytes", "r_squared"}


def test_partial_flag_on_failed_row(cube_scene):
    ok = tm.BenchRow(16, 1, 0.5, 32.0, 2.0, 10**6, "a" * 64, "ok")
    bad = tm.BenchRow(32, 1, 0.0, 0.0, 0.0, 0, "", "failed: allocation")
    result = tm.BenchResult(rows=(ok, bad), env={}, config=tm.BenchConfig(counts=(16, 32), frames=1))
    assert result.partial
    assert not bad.ok
