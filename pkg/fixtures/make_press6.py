"""Regenerate the bundled press6 fixture.

A 10 mm cube (millimeter-unit OBJ, unit_scale 0.001) pressed straight down
onto a flat 20 mm x 20 mm, 64 x 64 sensor: 2 mm starting clearance to 2 mm
final depth over six frames, so the first frames are contact-free and the
last reaches d_max exactly.

Run from the repository root:  python3 fixtures/make_press6.py
"""

import json
from pathlib import Path

from tacmap import box_mesh, make_press_trajectory, save_obj, save_trajectory

OUT = Path(__file__).parent / "press6"

SCENE = {
    "sensor": {
        "variant": "flat_rect",
        "dims": {"x_m": 0.02, "y_m": 0.02},
        "H": 64,
        "W": 64,
        "delta_m": 0.0,
        "d_max_m": 0.002,
    },
    "objects": [{"name": "cube", "mesh": "cube10mm.obj", "unit_scale": 0.001}],
    "render": {"facing": "back_only", "t_max_m": None, "combine": "max"},
    "force": {"k_n_per_m3": 1.0e6},
    "tau_m": 5.0e-5,
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    cube = box_mesh(size=(0.01, 0.01, 0.01))
    save_obj(OUT / "cube10mm.obj", cube, unit_scale=0.001)
    (OUT / "scene.json").write_text(json.dumps(SCENE, indent=2, sort_keys=True) + "\n")
    trajectory = make_press_trajectory(
        object_name="cube",
        mesh=cube,
        axis=(0.0, 0.0, 1.0),
        start_clearance=0.002,
        end_depth=0.002,
        steps=6,
        d_max=0.002,
    )
    save_trajectory(OUT / "press.jsonl", trajectory)
    print(f"wrote fixture to {OUT}")


if __name__ == "__main__":
    main()
