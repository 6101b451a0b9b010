"""Contact signals derived from a deformation map and its sensing grid.

A pixel is in contact when its depth exceeds the threshold tau, which
rejects tessellation noise near the contact boundary while keeping shallow
contacts. Signals are the contact centroid (both in pixel coordinates and
as a sensor-frame point), contact area, depth statistics, and a net-force
estimate from an elastic-foundation model: local pressure proportional to
local depth, integrated over the contact patch and directed along the
outward surface normal (the push on the object).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .render import DeformMap
from .sensor import SensingGrid

DEFAULT_TAU = 5e-5  # m; contact threshold
DEFAULT_STIFFNESS = 1e6  # N/m^3; foundation pressure per unit depth


class SignalsError(Exception):
    """Mismatched map/grid shapes or invalid parameters."""


@dataclass(frozen=True)
class ForceModel:
    """Elastic-foundation stiffness: pressure = k * depth."""

    k: float = DEFAULT_STIFFNESS  # N/m^3

    def validate(self):
        if not self.k > 0:
            raise SignalsError(f"stiffness k must be positive, got {self.k}")


@dataclass(frozen=True)
class ContactSignals:
    """Per-frame contact summary; centroids are None iff nothing is in contact."""

    centroid_pixel: tuple[float, float] | None  # (u, v), real-valued
    centroid_point: np.ndarray | None  # (3,), m, sensor frame
    contact_area: float  # m^2
    max_depth: float  # m
    mean_depth: float  # m, over active pixels, 0 when none
    net_force: np.ndarray  # (3,), N

    @property
    def in_contact(self) -> bool:
        return self.contact_area > 0.0


def contact_mask(deform_map: DeformMap, tau: float = DEFAULT_TAU) -> np.ndarray:
    """Boolean H x W mask of pixels whose depth exceeds tau."""
    if tau < 0:
        raise SignalsError(f"tau must be >= 0, got {tau}")
    return np.asarray(deform_map.depths) > tau


def compute_signals(
    deform_map: DeformMap,
    grid: SensingGrid,
    tau: float = DEFAULT_TAU,
    force_model: ForceModel | None = None,
) -> ContactSignals:
    if force_model is None:
        force_model = ForceModel()
    force_model.validate()
    depths = np.asarray(deform_map.depths)
    if depths.shape != (grid.H, grid.W):
        raise SignalsError(f"map shape {depths.shape} does not match grid {grid.H}x{grid.W}")

    mask = contact_mask(deform_map, tau)
    max_depth = float(depths.max()) if depths.size else 0.0
    if not mask.any():
        return ContactSignals(None, None, 0.0, max_depth, 0.0, np.zeros(3))

    uu, vv = np.nonzero(mask)
    d = depths[mask]
    areas = grid.pixel_areas[mask]
    points = grid.points[mask]
    outward = -grid.inward_normals[mask]

    area = float(areas.sum())
    centroid_pixel = (float(uu.mean()), float(vv.mean()))
    centroid_point = (areas[:, None] * points).sum(axis=0) / area
    net_force = (force_model.k * d * areas)[:, None] * outward
    return ContactSignals(
        centroid_pixel=centroid_pixel,
        centroid_point=centroid_point,
        contact_area=area,
        max_depth=max_depth,
        mean_depth=float(d.mean()),
        net_force=net_force.sum(axis=0),
    )


def signals_record(signals: ContactSignals) -> dict:
    """JSON-able per-frame record, SI units."""
    return {
        "in_contact": signals.in_contact,
        "centroid_pixel": list(signals.centroid_pixel) if signals.centroid_pixel is not None else None,
        "centroid_point_m": signals.centroid_point.tolist() if signals.centroid_point is not None else None,
        "contact_area_m2": signals.contact_area,
        "max_depth_m": signals.max_depth,
        "mean_depth_m": signals.mean_depth,
        "net_force_N": signals.net_force.tolist(),
    }
