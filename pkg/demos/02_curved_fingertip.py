"""
A curved fingertip sensor
=========================

Sensing grids are not limited to flat pads. Here a spherical-cap fingertip
(10 mm radius, 60 degree half-angle) is pressed 0.5 mm onto a flat plate,
and every ray is checked against the closed-form cap-plane penetration.
"""
import numpy as np

import tacmap as tm

# rays start on the cap and point toward its center of curvature
R, press = 10e-3, 0.5e-3
grid = tm.generate_sensing_grid(tm.SphericalCap(radius=R, half_angle=np.pi / 3), 64, 64, d_max=0.002)

# a plate whose bottom face is the plane z = -0.5 mm, pressed onto the apex
plate = tm.box_mesh((0.04, 0.04, 0.01), center=(0.0, 0.0, 0.005 - press))
scene = tm.SceneState(tm.identity_pose(), (tm.RenderObject.from_mesh(plate),))
deform = tm.render_deform_map(grid, scene)

# polar angle of each sensing point about the cap center
rel = grid.points - np.array([0.0, 0.0, -R])
theta = np.arccos(np.clip(rel[..., 2] / R, -1.0, 1.0))

# contact ends where the plate no longer reaches the cap surface
theta_c = np.arccos((R - press) / R)
print(f"predicted contact half-angle: {np.degrees(theta_c):.2f} deg")

print("theta [deg]   rendered [mm]   closed form [mm]")
for i in range(0, 24, 3):
    t_i = theta[i, 0]
    analytic = max(0.0, R - (R - press) / np.cos(t_i))
    print(f"{np.degrees(t_i):11.2f}   {deform.depths[i, 0] * 1e3:12.4f}   {analytic * 1e3:15.4f}")

active = deform.depths > 0
print(f"{active.sum()} of {active.size} rays touch the plate; "
      f"deepest penetration {deform.depths.max() * 1e3:.4f} mm at the apex")
