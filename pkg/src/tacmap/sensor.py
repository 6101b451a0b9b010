"""Sensor surface specs and the precomputed sensing grid.

The sensing grid discretizes the measurement surface into H x W pixel-center
samples, each carrying a point, an inward unit normal (into the sensor body),
and the exact area of its parameter cell. Conventions shared by all analytic
variants: the contact apex sits near z = 0 and the sensor interior lies
below it, so the apex inward normal is (0, 0, -1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .mesh import TriangleMesh
from .transforms import RigidPose


class SensorModelError(Exception):
    """Invalid surface spec or grid parameters."""


@dataclass(frozen=True)
class FlatRect:
    """Flat rectangular pad spanning [-x/2, x/2] x [-y/2, y/2] at z = 0, interior at z < 0."""

    x_extent: float
    y_extent: float

    def validate(self):
        if not (self.x_extent > 0 and self.y_extent > 0):
            raise SensorModelError("FlatRect extents must be positive")

    def patch_area(self, delta: float) -> float:
        return self.x_extent * self.y_extent


@dataclass(frozen=True)
class SphericalCap:
    """Spherical fingertip cap with apex at the origin and sphere center at (0, 0, -radius)."""

    radius: float
    half_angle: float  # polar angle from the apex, radians

    def validate(self):
        if not self.radius > 0:
            raise SensorModelError("SphericalCap radius must be positive")
        if not (0.0 < self.half_angle <= np.pi / 2):
            raise SensorModelError("SphericalCap half_angle must be in (0, pi/2]")

    def center(self) -> np.ndarray:
        return np.array([0.0, 0.0, -self.radius])

    def patch_area(self, delta: float) -> float:
        r = self.radius + delta
        return 2.0 * np.pi * r * r * (1.0 - np.cos(self.half_angle))


@dataclass(frozen=True)
class CylindricalPatch:
    """Cylindrical pad, axis along x through (0, 0, -radius); apex line at z = 0."""

    radius: float
    length: float  # axial extent
    arc_half_angle: float  # radians either side of the apex line

    def validate(self):
        if not (self.radius > 0 and self.length > 0):
            raise SensorModelError("CylindricalPatch radius and length must be positive")
        if not (0.0 < self.arc_half_angle <= np.pi / 2):
            raise SensorModelError("CylindricalPatch arc_half_angle must be in (0, pi/2]")

    def patch_area(self, delta: float) -> float:
        return (self.radius + delta) * (2.0 * self.arc_half_angle) * self.length


@dataclass(frozen=True)
class MeshSurface:
    """Fingertip given as a mesh plus a rectangular parameter chart.

    The chart is a (Hc, Wc) grid of surface points and outward normals over
    the unit parameter square; sensing points are sampled from it bilinearly.
    Generation is rejected without a chart (no automatic parameterization).
    """

    mesh: TriangleMesh
    chart_points: np.ndarray | None = None  # (Hc, Wc, 3)
    chart_normals: np.ndarray | None = None  # (Hc, Wc, 3), outward

    def validate(self):
        if self.chart_points is None or self.chart_normals is None:
            raise SensorModelError("MeshSurface needs a rectangular parameter chart (chart_points + chart_normals)")
        pts = np.asarray(self.chart_points, dtype=float)
        nrm = np.asarray(self.chart_normals, dtype=float)
        if pts.ndim != 3 or pts.shape[2] != 3 or pts.shape[0] < 2 or pts.shape[1] < 2:
            raise SensorModelError("chart_points must have shape (Hc >= 2, Wc >= 2, 3)")
        if nrm.shape != pts.shape:
            raise SensorModelError("chart_normals shape must match chart_points")
        norms = np.linalg.norm(nrm, axis=2)
        if np.any(norms < 1e-9):
            raise SensorModelError("chart_normals must be nonzero")
        unit = nrm / norms[..., None]
        # neighboring normals flipping sign indicate an inconsistent outward orientation
        if np.any(np.sum(unit[1:] * unit[:-1], axis=2) <= 0) or np.any(np.sum(unit[:, 1:] * unit[:, :-1], axis=2) <= 0):
            raise SensorModelError("chart_normals do not have a consistent outward orientation")


SensorSurfaceSpec = FlatRect | SphericalCap | CylindricalPatch | MeshSurface


@dataclass(frozen=True)
class SensingGrid:
    """Precomputed sensing points, inward normals, and per-pixel areas.

    points[u, v] lies on the sensing surface, at distance delta exterior to
    the rest surface along the outward normal. Row index u varies the first
    surface parameter (y for FlatRect, polar angle for SphericalCap, axial
    coordinate for CylindricalPatch); column index v the second.
    """

    spec: SensorSurfaceSpec
    H: int
    W: int
    points: np.ndarray  # (H, W, 3)
    inward_normals: np.ndarray  # (H, W, 3), unit
    pixel_areas: np.ndarray  # (H, W), m^2
    delta: float  # exterior standoff of the sensing surface, m
    d_max: float  # maximum measurable deformation, m

    @property
    def points_flat(self) -> np.ndarray:
        return self.points.reshape(-1, 3)

    @property
    def normals_flat(self) -> np.ndarray:
        return self.inward_normals.reshape(-1, 3)

    def descriptor(self) -> dict:
        """JSON-able description (spec, H, W, delta, d_max) for grid exports."""
        spec = self.spec
        if isinstance(spec, FlatRect):
            sd = {"variant": "flat_rect", "dims": {"x_m": spec.x_extent, "y_m": spec.y_extent}}
        elif isinstance(spec, SphericalCap):
            sd = {"variant": "spherical_cap", "dims": {"radius_m": spec.radius, "half_angle_rad": spec.half_angle}}
        elif isinstance(spec, CylindricalPatch):
            sd = {
                "variant": "cylindrical_patch",
                "dims": {
                    "radius_m": spec.radius,
                    "length_m": spec.length,
                    "arc_half_angle_rad": spec.arc_half_angle,
                },
            }
        else:
            sd = {"variant": "mesh_surface", "dims": {}}
        sd.update({"H": self.H, "W": self.W, "delta_m": self.delta, "d_max_m": self.d_max})
        return sd


def generate_sensing_grid(spec: SensorSurfaceSpec, H: int, W: int, delta: float = 0.0, d_max: float = 0.002) -> SensingGrid:
    """Sample the sensing surface at the centers of a uniform H x W parameter grid.

    Args:
        spec: surface variant.
        H, W: pixel counts (>= 1).
        delta: exterior standoff of the sensing surface from the rest surface, m.
        d_max: maximum measurable deformation, m.
    """
    if H < 1 or W < 1:
        raise SensorModelError(f"grid needs H, W >= 1, got {H}x{W}")
    if delta < 0:
        raise SensorModelError(f"delta must be >= 0, got {delta}")
    if not d_max > 0:
        raise SensorModelError(f"d_max must be positive, got {d_max}")
    spec.validate()

    if isinstance(spec, FlatRect):
        points, normals, areas = _flat_rect_grid(spec, H, W, delta)
    elif isinstance(spec, SphericalCap):
        points, normals, areas = _spherical_cap_grid(spec, H, W, delta)
    elif isinstance(spec, CylindricalPatch):
        points, normals, areas = _cylindrical_patch_grid(spec, H, W, delta)
    else:
        points, normals, areas = _mesh_surface_grid(spec, H, W, delta)

    grid = SensingGrid(spec, H, W, points, normals, areas, float(delta), float(d_max))
    for arr in (grid.points, grid.inward_normals, grid.pixel_areas):
        arr.setflags(write=False)
    return grid


def _cell_centers(n: int) -> np.ndarray:
    return (np.arange(n) + 0.5) / n


def _flat_rect_grid(spec: FlatRect, H: int, W: int, delta: float):
    x = -spec.x_extent / 2.0 + spec.x_extent * _cell_centers(W)
    y = -spec.y_extent / 2.0 + spec.y_extent * _cell_centers(H)
    points = np.empty((H, W, 3))
    points[..., 0] = x[None, :]
    points[..., 1] = y[:, None]
    points[..., 2] = delta
    normals = np.broadcast_to(np.array([0.0, 0.0, -1.0]), (H, W, 3)).copy()
    areas = np.full((H, W), spec.x_extent * spec.y_extent / (H * W))
    return points, normals, areas


def _spherical_cap_grid(spec: SphericalCap, H: int, W: int, delta: float):
    theta = spec.half_angle * _cell_centers(H)
    phi = 2.0 * np.pi * _cell_centers(W)
    st, ct = np.sin(theta), np.cos(theta)
    outward = np.empty((H, W, 3))
    outward[..., 0] = st[:, None] * np.cos(phi)[None, :]
    outward[..., 1] = st[:, None] * np.sin(phi)[None, :]
    outward[..., 2] = ct[:, None]
    r = spec.radius + delta
    points = spec.center() + r * outward
    # exact integral of r^2 sin(theta) over each parameter cell
    theta_edges = spec.half_angle * np.arange(H + 1) / H
    band = r * r * (np.cos(theta_edges[:-1]) - np.cos(theta_edges[1:])) * (2.0 * np.pi / W)
    areas = np.repeat(band[:, None], W, axis=1)
    return points, -outward, areas


def _cylindrical_patch_grid(spec: CylindricalPatch, H: int, W: int, delta: float):
    s = -spec.length / 2.0 + spec.length * _cell_centers(H)
    psi = -spec.arc_half_angle + 2.0 * spec.arc_half_angle * _cell_centers(W)
    r = spec.radius + delta
    points = np.empty((H, W, 3))
    points[..., 0] = s[:, None]
    points[..., 1] = r * np.sin(psi)[None, :]
    points[..., 2] = -spec.radius + r * np.cos(psi)[None, :]
    outward = np.zeros((H, W, 3))
    outward[..., 1] = np.sin(psi)[None, :]
    outward[..., 2] = np.cos(psi)[None, :]
    areas = np.full((H, W), r * (2.0 * spec.arc_half_angle / W) * (spec.length / H))
    return points, -outward, areas


def _bilinear(chart: np.ndarray, pu: np.ndarray, pv: np.ndarray) -> np.ndarray:
    """Sample a (Hc, Wc, 3) chart at parameter coordinates in [0, 1]."""
    hc, wc = chart.shape[0], chart.shape[1]
    fu = np.clip(pu, 0.0, 1.0) * (hc - 1)
    fv = np.clip(pv, 0.0, 1.0) * (wc - 1)
    i0 = np.minimum(fu.astype(int), hc - 2)
    j0 = np.minimum(fv.astype(int), wc - 2)
    au = (fu - i0)[..., None]
    av = (fv - j0)[..., None]
    c00 = chart[i0, j0]
    c01 = chart[i0, j0 + 1]
    c10 = chart[i0 + 1, j0]
    c11 = chart[i0 + 1, j0 + 1]
    return (1 - au) * ((1 - av) * c00 + av * c01) + au * ((1 - av) * c10 + av * c11)


def _mesh_surface_grid(spec: MeshSurface, H: int, W: int, delta: float):
    cp = np.asarray(spec.chart_points, dtype=float)
    cn = np.asarray(spec.chart_normals, dtype=float)

    uu, vv = np.meshgrid(_cell_centers(H), _cell_centers(W), indexing="ij")
    surf = _bilinear(cp, uu, vv)
    normals = _bilinear(cn, uu, vv)
    norms = np.linalg.norm(normals, axis=2, keepdims=True)
    if np.any(norms < 0.5):
        raise SensorModelError("interpolated chart normals degenerate; chart orientation inconsistent")
    normals = normals / norms
    points = surf + delta * normals

    # per-cell area from the corner quad, split into two triangles
    ue, ve = np.meshgrid(np.arange(H + 1) / H, np.arange(W + 1) / W, indexing="ij")
    corners = _bilinear(cp, ue, ve) + delta * _unit(_bilinear(cn, ue, ve))
    p00 = corners[:-1, :-1]
    p01 = corners[:-1, 1:]
    p10 = corners[1:, :-1]
    p11 = corners[1:, 1:]
    a1 = 0.5 * np.linalg.norm(np.cross(p01 - p00, p10 - p00), axis=2)
    a2 = 0.5 * np.linalg.norm(np.cross(p01 - p11, p10 - p11), axis=2)
    return points, -normals, a1 + a2


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def grid_world_points(grid: SensingGrid, sensor_pose: RigidPose) -> tuple[np.ndarray, np.ndarray]:
    """Sensing points and inward normals transformed into the world frame."""
    pts = sensor_pose.apply_point(grid.points_flat).reshape(grid.H, grid.W, 3)
    nrm = sensor_pose.apply_vector(grid.normals_flat).reshape(grid.H, grid.W, 3)
    return pts, nrm


def save_grid_export(grid: SensingGrid, json_path, blob_path) -> None:
    """Write the descriptor JSON and the f32 little-endian blob.

    Blob layout: points, then inward normals, then areas; row-major over the
    H x W grid.
    """
    json_path = Path(json_path)
    blob_path = Path(blob_path)
    desc = grid.descriptor()
    desc["blob"] = {
        "file": blob_path.name,
        "dtype": "f32-le",
        "order": "row-major",
        "sections": ["points", "inward_normals", "pixel_areas"],
    }
    payload = np.concatenate(
        [
            grid.points_flat.astype("<f4").reshape(-1),
            grid.normals_flat.astype("<f4").reshape(-1),
            grid.pixel_areas.astype("<f4").reshape(-1),
        ]
    )
    blob_path.write_bytes(payload.tobytes())
    json_path.write_text(json.dumps(desc, indent=2, sort_keys=True) + "\n")
