"""Trajectory replay: render every recorded frame and persist the results.

Each kept frame produces one TMAP file plus one JSON signals record
(appended to signals.jsonl); manifest.json lists every emitted file along
with the scene digest and toolkit version. Output content is a pure
function of (scene, trajectory, subsample), so reruns are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ._version import __version__
from .render import DeformMap, render_deform_map
from .scene import LoadedScene, scene_state
from .signals import ContactSignals, compute_signals, signals_record
from .tmap import save_tmap
from .trajectory import Trajectory


class ReplayError(Exception):
    """Trajectory references objects the scene does not declare, or bad options."""


@dataclass(frozen=True)
class ReplayOutput:
    out_dir: Path
    manifest: dict
    maps: tuple[DeformMap, ...]
    signals: tuple[ContactSignals, ...]

    @property
    def num_frames(self) -> int:
        return len(self.maps)


def replay(scene: LoadedScene, trajectory: Trajectory, out_dir, subsample: int = 1) -> ReplayOutput:
    """Render frames [::subsample] of the trajectory into out_dir."""
    if subsample < 1:
        raise ReplayError(f"subsample must be >= 1, got {subsample}")
    unknown = trajectory.object_names() - set(scene.objects)
    if unknown:
        raise ReplayError(f"trajectory poses unknown object(s): {', '.join(sorted(unknown))}")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    maps = []
    sigs = []
    frame_entries = []
    signal_lines = []
    for j, i in enumerate(range(0, len(trajectory), subsample)):
        frame = trajectory.frames[i]
        state = scene_state(scene, frame.sensor_pose, frame.object_poses)
        deform = render_deform_map(scene.grid, state, scene.render_cfg)
        name = f"frame_{j:04d}.tmap"
        save_tmap(out_dir / name, deform)
        sig = compute_signals(deform, scene.grid, scene.tau, scene.force_model)
        record = {"frame": j, "source_frame": i, "ts": frame.ts}
        record.update(signals_record(sig))
        signal_lines.append(json.dumps(record, sort_keys=True))
        frame_entries.append({"frame": j, "source_frame": i, "ts": frame.ts, "tmap": name})
        maps.append(deform)
        sigs.append(sig)

    (out_dir / "signals.jsonl").write_text("\n".join(signal_lines) + "\n")
    manifest = {
        "format": "tacmap-replay",
        "version": __version__,
        "config_digest": scene.config_digest,
        "subsample": subsample,
        "num_frames": len(maps),
        "tau_m": scene.tau,
        "signals_file": "signals.jsonl",
        "frames": frame_entries,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return ReplayOutput(out_dir, manifest, tuple(maps), tuple(sigs))
