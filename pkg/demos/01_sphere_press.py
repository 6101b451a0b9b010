"""
Pressing a sphere into a flat pad
=================================

Render a single deformation map for the classic calibration probe: a 5 mm
sphere pressed 1 mm into a 20 mm x 20 mm flat pad, and check the result
against the closed-form penetration profile.
"""
import numpy as np

import tacmap as tm

# a 64x64 sensing grid over the flat pad; depths saturate at 2 mm
grid = tm.generate_sensing_grid(tm.FlatRect(0.02, 0.02), 64, 64, d_max=0.002)

# the probe: an icosphere tessellated finely enough to act as a true sphere
R, press = 5e-3, 1e-3
sphere = tm.icosphere_mesh(R, subdivisions=4)

# place the sphere so its lowest point sits 1 mm below the sensing surface
pose = tm.RigidPose(np.array([1.0, 0.0, 0.0, 0.0]), np.array([0.0, 0.0, R - press]))
scene = tm.SceneState(tm.identity_pose(), (tm.RenderObject.from_mesh(sphere, pose),))
deform = tm.render_deform_map(grid, scene)

# compare the rendered center row against the analytic profile
r = np.hypot(grid.points[..., 0], grid.points[..., 1])
analytic = np.clip(press - R + np.sqrt(np.clip(R * R - r * r, 0.0, None)), 0.0, None)
row = grid.H // 2
print("radius [mm]   rendered [mm]   closed form [mm]")
for col in range(0, grid.W, 6):
    print(
        f"{r[row, col] * 1e3:10.3f}   {deform.depths[row, col] * 1e3:12.4f}"
        f"   {analytic[row, col] * 1e3:15.4f}"
    )
print(f"max |error| inside the contact circle: "
      f"{np.abs(deform.depths - analytic)[r <= 2.7e-3].max() * 1e6:.2f} um")

# summarize the contact and save the map for other tools
signals = tm.compute_signals(deform, grid)
print(f"contact area {signals.contact_area * 1e6:.2f} mm^2, "
      f"normal force {signals.net_force[2]:.3f} N")
tm.save_tmap("sphere_press.tmap", deform)
tm.save_pgm("sphere_press.pgm", deform)
print("wrote sphere_press.tmap and sphere_press.pgm")
