"""Pairwise comparison of deformation-map sequences.

Four per-frame metrics, aggregated by the median across frames:

    iou             overlap of thresholded contact masks; two empty masks
                    count as perfect agreement (1.0)
    depth_error     median per-pixel relative depth error against the
                    reference map, over the intersection mask (bounded,
                    scale-free, robust to boundary pixels)
    position_error  Euclidean distance between contact centroid points, m
                    (a pixel-space variant is also provided)
    force_l2        Euclidean distance between net-force vectors, N
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import median

import numpy as np

from .render import DeformMap
from .signals import DEFAULT_TAU, ContactSignals, ForceModel, SignalsError, compute_signals, contact_mask
from .sensor import SensingGrid


class MetricsError(Exception):
    """Shape mismatch or a metric evaluated outside its domain."""


def _masks(a: DeformMap, b: DeformMap, tau: float) -> tuple[np.ndarray, np.ndarray]:
    if a.depths.shape != b.depths.shape:
        raise MetricsError(f"map shapes differ: {a.depths.shape} vs {b.depths.shape}")
    return contact_mask(a, tau), contact_mask(b, tau)


def deform_iou(a: DeformMap, b: DeformMap, tau: float = DEFAULT_TAU) -> float:
    """Intersection over union of the two contact masks; both empty -> 1.0."""
    ma, mb = _masks(a, b, tau)
    union = int(np.count_nonzero(ma | mb))
    if union == 0:
        return 1.0
    return int(np.count_nonzero(ma & mb)) / union


def depth_error(a: DeformMap, ref: DeformMap, tau: float = DEFAULT_TAU) -> float:
    """Median relative depth error |a - ref| / ref over the intersection mask."""
    ma, mref = _masks(a, ref, tau)
    both = ma & mref
    if not both.any():
        raise MetricsError("empty intersection mask; depth error undefined")
    da = np.asarray(a.depths)[both]
    dr = np.asarray(ref.depths)[both]
    return float(np.median(np.abs(da - dr) / dr))


def position_error(a: ContactSignals, b: ContactSignals) -> float:
    """Euclidean distance between centroid points, meters."""
    if a.centroid_point is None or b.centroid_point is None:
        raise MetricsError("centroid absent (no contact); position error undefined")
    return float(np.linalg.norm(a.centroid_point - b.centroid_point))


def position_error_pixels(a: ContactSignals, b: ContactSignals) -> float:
    """Euclidean distance between pixel-space centroids."""
    if a.centroid_pixel is None or b.centroid_pixel is None:
        raise MetricsError("centroid absent (no contact); position error undefined")
    du = a.centroid_pixel[0] - b.centroid_pixel[0]
    dv = a.centroid_pixel[1] - b.centroid_pixel[1]
    return float(np.hypot(du, dv))


def force_l2(a: ContactSignals, b: ContactSignals) -> float:
    """Euclidean distance between net-force vectors, Newtons."""
    return float(np.linalg.norm(a.net_force - b.net_force))


@dataclass(frozen=True)
class FrameComparison:
    frame: int
    iou: float
    depth_error: float | None  # None when the intersection mask is empty
    position_error: float | None  # None without a grid or without contact
    position_error_px: float | None
    force_l2: float | None  # None without a grid


@dataclass(frozen=True)
class ComparisonReport:
    frames: tuple[FrameComparison, ...]
    median_iou: float
    median_depth_error: float | None
    median_position_error: float | None
    median_force_l2: float | None

    def to_dict(self) -> dict:
        return {
            "num_frames": len(self.frames),
            "median": {
                "iou": self.median_iou,
                "depth_error": self.median_depth_error,
                "position_error_m": self.median_position_error,
                "force_l2_N": self.median_force_l2,
            },
            "frames": [
                {
                    "frame": f.frame,
                    "iou": f.iou,
                    "depth_error": f.depth_error,
                    "position_error_m": f.position_error,
                    "position_error_px": f.position_error_px,
                    "force_l2_N": f.force_l2,
                }
                for f in self.frames
            ],
        }


def _median_or_none(values: list[float]) -> float | None:
    return median(values) if values else None


def compare_sequences(
    maps_a: list[DeformMap],
    maps_b: list[DeformMap],
    tau: float = DEFAULT_TAU,
    grid: SensingGrid | None = None,
    force_model: ForceModel | None = None,
) -> ComparisonReport:
    """Frame-by-frame comparison of two equal-length map sequences.

    Position and force metrics need sensing-grid geometry; without a grid
    those fields are None. Frames where a metric is undefined (empty
    intersection, no contact) carry None and are skipped by the medians.
    """
    if len(maps_a) != len(maps_b):
        raise MetricsError(f"sequence lengths differ: {len(maps_a)} vs {len(maps_b)}")
    if not maps_a:
        raise MetricsError("no frames to compare")

    frames = []
    for i, (a, b) in enumerate(zip(maps_a, maps_b)):
        iou = deform_iou(a, b, tau)
        try:
            derr = depth_error(a, b, tau)
        except MetricsError:
            derr = None
        perr = perr_px = fl2 = None
        if grid is not None:
            try:
                sa = compute_signals(a, grid, tau, force_model)
                sb = compute_signals(b, grid, tau, force_model)
            except SignalsError as exc:
                raise MetricsError(str(exc)) from exc
            fl2 = force_l2(sa, sb)
            if sa.centroid_point is not None and sb.centroid_point is not None:
                perr = position_error(sa, sb)
                perr_px = position_error_pixels(sa, sb)
        frames.append(FrameComparison(i, iou, derr, perr, perr_px, fl2))

    return ComparisonReport(
        frames=tuple(frames),
        median_iou=median(f.iou for f in frames),
        median_depth_error=_median_or_none([f.depth_error for f in frames if f.depth_error is not None]),
        median_position_error=_median_or_none([f.position_error for f in frames if f.position_error is not None]),
        median_force_l2=_median_or_none([f.force_l2 for f in frames if f.force_l2 is not None]),
    )
