"""Pure-Python planar hull kernels (reference implementation and fallback)."""
import math

import numpy as np


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _chain(pts, order):
    n = len(order)
    if n == 1:
        return [order[0]]
    hull = []
    for p in order:
        while len(hull) >= 2 and _cross(pts[hull[-2]], pts[hull[-1]], pts[p]) <= 0.0:
            hull.pop()
        hull.append(p)
    lower = len(hull) + 1
    for p in reversed(order[:-1]):
        while len(hull) >= lower and _cross(pts[hull[-2]], pts[hull[-1]], pts[p]) <= 0.0:
            hull.pop()
        hull.append(p)
    return hull[:-1]


def hull2d(pts):
    """Indices of the strictly convex hull of planar points, counter-clockwise."""
    pts = np.asarray(pts, dtype=np.float64)
    if len(pts) == 0:
        return np.empty(0, dtype=np.intp)
    order = np.lexsort((pts[:, 1], pts[:, 0])).tolist()
    rows = pts.tolist()
    return np.asarray(_chain(rows, order), dtype=np.intp)


def polygon_measures(pts, idx):
    """Area and perimeter of the polygon visiting ``pts[idx]`` in order."""
    pts = np.asarray(pts, dtype=np.float64)
    k = len(idx)
    if k < 2:
        return 0.0, 0.0
    area = 0.0
    per = 0.0
    for i in range(k):
        ax, ay = pts[idx[i]]
        bx, by = pts[idx[(i + 1) % k]]
        area += ax * by - bx * ay
        per += math.hypot(bx - ax, by - ay)
    if k == 2:
        return 0.0, per
    return 0.5 * area, per


def batch_hull2d_area(proj):
    """Hull area of each planar point set ``proj[s]``; shape (S, m, 2) -> (S,)."""
    proj = np.asarray(proj, dtype=np.float64)
    out = np.zeros(proj.shape[0])
    if proj.shape[1] < 3:
        return out
    for s, pts in enumerate(proj):
        rows = pts.tolist()
        order = sorted(range(len(rows)), key=lambda i: (rows[i][0], rows[i][1]))
        hull = _chain(rows, order)
        if len(hull) >= 3:
            out[s] = polygon_measures(pts, hull)[0]
    return out
