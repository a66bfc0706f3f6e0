# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled planar hull kernels.

Same contracts as :mod:`gplab._pykernels`; the selector in
:mod:`gplab.kernels` decides which one is used.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef inline double _cross(double ox, double oy, double ax, double ay,
                          double bx, double by) noexcept nogil:
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


cdef Py_ssize_t _chain(const double[:, :] pts, const Py_ssize_t* order,
                       Py_ssize_t n, Py_ssize_t* hull) noexcept nogil:
    """Andrew's monotone chain over pre-sorted indices; returns hull size."""
    cdef Py_ssize_t k = 0, i, t, p
    if n == 1:
        hull[0] = order[0]
        return 1
    for i in range(n):
        p = order[i]
        while k >= 2 and _cross(pts[hull[k - 2], 0], pts[hull[k - 2], 1],
                                pts[hull[k - 1], 0], pts[hull[k - 1], 1],
                                pts[p, 0], pts[p, 1]) <= 0.0:
            k -= 1
        hull[k] = p
        k += 1
    t = k + 1
    i = n - 2
    while i >= 0:
        p = order[i]
        while k >= t and _cross(pts[hull[k - 2], 0], pts[hull[k - 2], 1],
                                pts[hull[k - 1], 0], pts[hull[k - 1], 1],
                                pts[p, 0], pts[p, 1]) <= 0.0:
            k -= 1
        hull[k] = p
        k += 1
        i -= 1
    return k - 1


def hull2d(const double[:, :] pts):
    """Indices of the strictly convex hull of planar points, counter-clockwise."""
    cdef Py_ssize_t n = pts.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.intp)
    order_arr = np.lexsort((np.asarray(pts[:, 1]), np.asarray(pts[:, 0]))).astype(np.intp)
    cdef Py_ssize_t[::1] order = order_arr
    out = np.empty(2 * n + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] hull = out
    cdef Py_ssize_t k
    with nogil:
        k = _chain(pts, &order[0], n, &hull[0])
    return out[:k].copy()


def polygon_measures(const double[:, :] pts, const Py_ssize_t[:] idx):
    """Area and perimeter of the polygon visiting ``pts[idx]`` in order."""
    cdef Py_ssize_t k = idx.shape[0], i, a, b
    cdef double area = 0.0, per = 0.0, dx, dy
    if k < 2:
        return 0.0, 0.0
    for i in range(k):
        a = idx[i]
        b = idx[(i + 1) % k]
        area += pts[a, 0] * pts[b, 1] - pts[b, 0] * pts[a, 1]
        dx = pts[b, 0] - pts[a, 0]
        dy = pts[b, 1] - pts[a, 1]
        per += sqrt(dx * dx + dy * dy)
    if k == 2:
        # a segment: both directions are counted above
        return 0.0, per
    return 0.5 * area, per


cdef void _isort(const double[:, :] pts, Py_ssize_t* order, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j, key
    for i in range(n):
        order[i] = i
    for i in range(1, n):
        key = order[i]
        j = i - 1
        while j >= 0 and (pts[order[j], 0] > pts[key, 0] or
                          (pts[order[j], 0] == pts[key, 0] and pts[order[j], 1] > pts[key, 1])):
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = key


def batch_hull2d_area(const double[:, :, :] proj):
    """Hull area of each planar point set ``proj[s]``; shape (S, m, 2) -> (S,)."""
    cdef Py_ssize_t S = proj.shape[0], m = proj.shape[1]
    out = np.zeros(S, dtype=np.float64)
    cdef double[::1] res = out
    cdef Py_ssize_t s, k, i, a, b
    cdef double area
    cdef Py_ssize_t* order
    cdef Py_ssize_t* hull
    if m < 3:
        return out
    order = <Py_ssize_t*> malloc(m * sizeof(Py_ssize_t))
    hull = <Py_ssize_t*> malloc((2 * m + 1) * sizeof(Py_ssize_t))
    try:
        with nogil:
            for s in range(S):
                _isort(proj[s], order, m)
                k = _chain(proj[s], order, m, hull)
                area = 0.0
                if k >= 3:
                    for i in range(k):
                        a = hull[i]
                        b = hull[(i + 1) % k]
                        area += proj[s, a, 0] * proj[s, b, 1] - proj[s, b, 0] * proj[s, a, 1]
                res[s] = 0.5 * area
    finally:
        free(order)
        free(hull)
    return out
