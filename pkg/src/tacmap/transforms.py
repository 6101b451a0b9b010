"""Rigid transforms as unit quaternion (wxyz) + translation pairs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

QUAT_NORM_TOL = 1e-9


def quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product of two wxyz quaternions."""
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def quat_conj(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    """Rotation matrix of a unit wxyz quaternion."""
    w, x, y, z = q
    xx, yy, zz = x * x, y * y, z * z
    xy, xz, yz = x * y, x * z, y * z
    wx, wy, wz = w * x, w * y, w * z
    return np.array(
        [
            [1.0 - 2.0 * (yy + zz), 2.0 * (xy - wz), 2.0 * (xz + wy)],
            [2.0 * (xy + wz), 1.0 - 2.0 * (xx + zz), 2.0 * (yz - wx)],
            [2.0 * (xz - wy), 2.0 * (yz + wx), 1.0 - 2.0 * (xx + yy)],
        ]
    )


def quat_from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n == 0.0:
        raise ValueError("rotation axis must be nonzero")
    half = 0.5 * angle
    return np.concatenate(([np.cos(half)], np.sin(half) * axis / n))


@dataclass(frozen=True)
class RigidPose:
    """Rigid-body pose: rotation as a unit wxyz quaternion plus a translation in meters.

    The quaternion must be unit within 1e-9; it is renormalized on
    construction so long compose chains do not drift.
    """

    q: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0, 0.0]))
    t: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float).reshape(4)
        t = np.asarray(self.t, dtype=float).reshape(3)
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(t))):
            raise ValueError("pose components must be finite")
        norm = float(np.linalg.norm(q))
        if abs(norm - 1.0) > QUAT_NORM_TOL:
            raise ValueError(f"quaternion norm {norm} deviates from 1 by more than {QUAT_NORM_TOL}")
        object.__setattr__(self, "q", q / norm)
        object.__setattr__(self, "t", t)
        self.q.setflags(write=False)
        self.t.setflags(write=False)

    def rotation_matrix(self) -> np.ndarray:
        return quat_to_matrix(self.q)

    def apply_point(self, p) -> np.ndarray:
        """Transform one point or an (N, 3) stack of points."""
        p = np.asarray(p, dtype=float)
        return p @ self.rotation_matrix().T + self.t

    def apply_vector(self, v) -> np.ndarray:
        """Rotate one vector or an (N, 3) stack of vectors (no translation)."""
        v = np.asarray(v, dtype=float)
        return v @ self.rotation_matrix().T


def identity_pose() -> RigidPose:
    return RigidPose()


def compose(a: RigidPose, b: RigidPose) -> RigidPose:
    """Pose applying b first, then a: compose(a, b).apply_point(x) == a(b(x))."""
    return RigidPose(quat_mul(a.q, b.q), a.apply_point(b.t))


def inverse(p: RigidPose) -> RigidPose:
    qc = quat_conj(p.q)
    return RigidPose(qc, -(quat_to_matrix(qc) @ p.t))
