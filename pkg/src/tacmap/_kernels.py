"""Numba kernels for ray-triangle intersection and BVH first-hit traversal.

Compiled lazily on first use and cached on disk. The environment variable
TACMAP_THREADS caps the kernel thread pool (0 or unset = automatic).
"""

from __future__ import annotations

import os

# Probing the TBB layer emits a warning on hosts with an old TBB; prefer omp.
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

import numba
import numpy as np
from numba import njit, prange

# Parallel rejection threshold on the Moller-Trumbore determinant, scaled by
# twice the triangle area so the test is independent of mesh scale.
DET_EPS = 1e-9
# Barycentric slack: accepts hits marginally outside an edge so shared edges
# between adjacent triangles cannot both reject a ray.
BARY_EPS = 1e-9
# Hits with t < -T_EPS are behind the ray; t in [-T_EPS, 0) is grazing contact.
T_EPS = 1e-9

FACING_ANY = 0
FACING_BACK_ONLY = 1

_MISS = -1.0e308


def configure_threads() -> int:
    """Apply the TACMAP_THREADS cap (0 or unset = automatic). Returns the thread count."""
    raw = os.environ.get("TACMAP_THREADS", "0")
    try:
        requested = int(raw)
    except ValueError as exc:
        raise ValueError(f"TACMAP_THREADS must be an integer, got {raw!r}") from exc
    if requested < 0:
        raise ValueError(f"TACMAP_THREADS must be >= 0, got {requested}")
    if requested > 0:
        numba.set_num_threads(min(requested, numba.config.NUMBA_NUM_THREADS))
    return numba.get_num_threads()


@njit(cache=True, inline="always")
def _ray_triangle_t(ox, oy, oz, dx, dy, dz,
                    ax, ay, az, bx, by, bz, cx, cy, cz,
                    twice_area, facing):
    """Moller-Trumbore distance along the ray, or a large negative miss marker.

    det = -dot(direction, geometric_normal), so back-facing triangles
    (normal along the ray) have det < 0.
    """
    e1x = bx - ax
    e1y = by - ay
    e1z = bz - az
    e2x = cx - ax
    e2y = cy - ay
    e2z = cz - az

    px = dy * e2z - dz * e2y
    py = dz * e2x - dx * e2z
    pz = dx * e2y - dy * e2x
    det = e1x * px + e1y * py + e1z * pz

    limit = DET_EPS * twice_area
    if facing == FACING_BACK_ONLY:
        if det >= -limit:
            return _MISS
    elif det > -limit and det < limit:
        return _MISS

    inv = 1.0 / det
    tx = ox - ax
    ty = oy - ay
    tz = oz - az
    u = (tx * px + ty * py + tz * pz) * inv
    if u < -BARY_EPS or u > 1.0 + BARY_EPS:
        return _MISS

    qx = ty * e1z - tz * e1y
    qy = tz * e1x - tx * e1z
    qz = tx * e1y - ty * e1x
    v = (dx * qx + dy * qy + dz * qz) * inv
    if v < -BARY_EPS or u + v > 1.0 + BARY_EPS:
        return _MISS

    return (e2x * qx + e2y * qy + e2z * qz) * inv


@njit(cache=True, inline="always")
def _better_hit(t, tri_id, best_t, best_id):
    """First-hit ordering: smaller t wins; exact ties go to the lower triangle id."""
    if best_id < 0:
        return True
    if t < best_t:
        return True
    return t == best_t and tri_id < best_id


@njit(cache=True)
def brute_force_hit(v0, v1, v2, twice_areas,
                    ox, oy, oz, dx, dy, dz, t_max, facing):
    """Exhaustive first-hit scan over every triangle. Returns (t, triangle id or -1)."""
    best_t = np.inf
    best_id = -1
    for k in range(v0.shape[0]):
        t = _ray_triangle_t(ox, oy, oz, dx, dy, dz,
                            v0[k, 0], v0[k, 1], v0[k, 2],
                            v1[k, 0], v1[k, 1], v1[k, 2],
                            v2[k, 0], v2[k, 1], v2[k, 2],
                            twice_areas[k], facing)
        if t >= -T_EPS and t <= t_max and _better_hit(t, k, best_t, best_id):
            best_t = t
            best_id = k
    if best_id < 0:
        return np.inf, -1
    return best_t, best_id


@njit(cache=True, inline="always")
def _slab_entry(bmin, bmax, node, ox, oy, oz, dx, dy, dz, t_lo, t_hi):
    """Ray/AABB overlap test on [t_lo, t_hi]; returns entry distance or +inf.

    Zero direction components are handled by interval containment to avoid
    0 * inf NaNs when the origin sits exactly on a slab plane.
    """
    tn = t_lo
    tf = t_hi
    for axis in range(3):
        if axis == 0:
            o = ox
            d = dx
        elif axis == 1:
            o = oy
            d = dy
        else:
            o = oz
            d = dz
        lo = bmin[node, axis]
        hi = bmax[node, axis]
        if d == 0.0:
            if o < lo or o > hi:
                return np.inf
        else:
            inv = 1.0 / d
            t1 = (lo - o) * inv
            t2 = (hi - o) * inv
            if t1 > t2:
                tmp = t1
                t1 = t2
                t2 = tmp
            if t1 > tn:
                tn = t1
            if t2 < tf:
                tf = t2
            if tn > tf:
                return np.inf
    return tn


@njit(cache=True)
def bvh_first_hit(node_min, node_max, node_left, node_right, node_count, tri_perm,
                  v0, v1, v2, twice_areas,
                  ox, oy, oz, dx, dy, dz, t_max, facing):
    """First hit along one ray via ordered BVH traversal. Returns (t, triangle id or -1)."""
    best_t = np.inf
    best_id = -1
    stack = np.empty(128, dtype=np.int32)
    top = 0
    stack[0] = 0
    top = 1
    while top > 0:
        top -= 1
        node = stack[top]
        # prune with <= so equal-t candidates in sibling subtrees still resolve ties
        limit = t_max if best_id < 0 else min(t_max, best_t)
        if _slab_entry(node_min, node_max, node, ox, oy, oz, dx, dy, dz, -T_EPS, limit) == np.inf:
            continue
        count = node_count[node]
        if count > 0:
            start = node_left[node]
            for i in range(start, start + count):
                k = tri_perm[i]
                t = _ray_triangle_t(ox, oy, oz, dx, dy, dz,
                                    v0[k, 0], v0[k, 1], v0[k, 2],
                                    v1[k, 0], v1[k, 1], v1[k, 2],
                                    v2[k, 0], v2[k, 1], v2[k, 2],
                                    twice_areas[k], facing)
                if t >= -T_EPS and t <= t_max and _better_hit(t, k, best_t, best_id):
                    best_t = t
                    best_id = k
        else:
            left = node_left[node]
            right = node_right[node]
            limit = t_max if best_id < 0 else min(t_max, best_t)
            tl = _slab_entry(node_min, node_max, left, ox, oy, oz, dx, dy, dz, -T_EPS, limit)
            tr = _slab_entry(node_min, node_max, right, ox, oy, oz, dx, dy, dz, -T_EPS, limit)
            # push far child first so the near child is traversed next
            if tl <= tr:
                if tr != np.inf:
                    stack[top] = right
                    top += 1
                if tl != np.inf:
                    stack[top] = left
                    top += 1
            else:
                stack[top] = left
                top += 1
                stack[top] = right
                top += 1
    if best_id < 0:
        return np.inf, -1
    return best_t, best_id


@njit(cache=True, parallel=True)
def raycast_grid(node_min, node_max, node_left, node_right, node_count, tri_perm,
                 v0, v1, v2, twice_areas,
                 origins, directions, t_max, facing, out_t, out_id):
    """First hits for a batch of rays; each ray writes only its own slot."""
    n = origins.shape[0]
    for i in prange(n):
        t, tid = bvh_first_hit(node_min, node_max, node_left, node_right, node_count, tri_perm,
                               v0, v1, v2, twice_areas,
                               origins[i, 0], origins[i, 1], origins[i, 2],
                               directions[i, 0], directions[i, 1], directions[i, 2],
                               t_max, facing)
        out_t[i] = t
        out_id[i] = tid


def warmup() -> None:
    """Force-compile the kernels on a one-triangle scene (cached across runs)."""
    v0 = np.array([[0.0, 0.0, 0.0]])
    v1 = np.array([[1.0, 0.0, 0.0]])
    v2 = np.array([[0.0, 1.0, 0.0]])
    ta = np.array([1.0])
    nmin = np.array([[0.0, 0.0, 0.0]])
    nmax = np.array([[1.0, 1.0, 0.0]])
    left = np.array([0], dtype=np.int32)
    right = np.array([1], dtype=np.int32)
    count = np.array([1], dtype=np.int32)
    perm = np.array([0], dtype=np.int64)
    origins = np.array([[0.2, 0.2, 1.0]])
    dirs = np.array([[0.0, 0.0, -1.0]])
    out_t = np.empty(1)
    out_id = np.empty(1, dtype=np.int64)
    brute_force_hit(v0, v1, v2, ta, 0.2, 0.2, 1.0, 0.0, 0.0, -1.0, 10.0, FACING_ANY)
    raycast_grid(nmin, nmax, left, right, count, perm, v0, v1, v2, ta,
                 origins, dirs, 10.0, FACING_ANY, out_t, out_id)
