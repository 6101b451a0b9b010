"""
Comparing two deformation-map sequences
=======================================

The comparison metrics quantify how well one run reproduces another:
contact-mask IoU, relative depth error over the shared contact, contact
centroid distance, and net-force difference. Here a sphere press is
compared against the same press shifted sideways by half a millimetre.
"""
import numpy as np

import tacmap as tm

grid = tm.generate_sensing_grid(tm.FlatRect(0.02, 0.02), 64, 64, d_max=0.002)
sphere = tm.RenderObject.from_mesh(tm.icosphere_mesh(5e-3, subdivisions=4))


def press_sequence(shift_x: float) -> list[tm.DeformMap]:
    maps = []
    for press in np.linspace(0.2e-3, 1.0e-3, 5):
        pose = tm.RigidPose(np.array([1.0, 0.0, 0.0, 0.0]), np.array([shift_x, 0.0, 5e-3 - press]))
        state = tm.SceneState(tm.identity_pose(), (sphere.with_pose(pose),))
        maps.append(tm.render_deform_map(grid, state))
    return maps


reference = press_sequence(shift_x=0.0)
shifted = press_sequence(shift_x=0.5e-3)

# passing the grid enables the position and force metrics
report = tm.compare_sequences(shifted, reference, grid=grid)
print("frame   IoU     depth err   centroid err [mm]   force err [N]")
for f in report.frames:
    print(
        f"{f.frame:5d}   {f.iou:.3f}   {f.depth_error:9.3f}"
        f"   {f.position_error * 1e3:17.3f}   {f.force_l2:13.4f}"
    )
print(
    f"medians: IoU {report.median_iou:.3f}, depth error {report.median_depth_error:.3f}, "
    f"centroid error {report.median_position_error * 1e3:.3f} mm"
)

# an identical pair scores perfectly
self_report = tm.compare_sequences(reference, reference, grid=grid)
print(f"self comparison: IoU {self_report.median_iou}, depth error {self_report.median_depth_error}")
