"""Intrinsic volumes of point-cloud hulls.

Exact for ell = d (volume) and ell = d - 1 (half the surface area); Monte
Carlo over the Grassmannian (Kubota's projection average) for any ell; a
support-function estimator for ell = 1; and the localised functional
restricted to subspaces meeting a given cone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionMismatch, EmptyCloud, MethodMismatch
from .geometry import (
    DegenerateInput,
    as_points,
    convex_hull,
    hull_volume_or_zero,
    polytope_volume,
    surface_area,
)
from .grassmann import CircularCone, Subspace, angle_to_subspace, sample_subspaces
from .sampling import as_stream

METHODS = ("exact-volume", "exact-surface", "kubota-mc", "support-mc")
DEFAULT_SUBSPACES = 2000
_CHUNK = 4096


@dataclass(frozen=True)
class IVEstimate:
    ell: int
    value: float
    std_error: float
    n_samples: int
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")


def kappa(j: int) -> float:
    """Volume of the j-dimensional unit ball."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    return math.pi ** (j / 2) / math.gamma(1 + j / 2)


def kubota_prefactor(d: int, ell: int) -> float:
    if not 0 <= ell <= d:
        raise ValueError("need 0 <= ell <= d")
    return math.comb(d, ell) * kappa(d) / (kappa(ell) * kappa(d - ell))


def _bases(subspaces) -> np.ndarray:
    if isinstance(subspaces, Subspace):
        return subspaces.basis[None]
    if isinstance(subspaces, (list, tuple)):
        return np.stack([s.basis if isinstance(s, Subspace) else np.asarray(s) for s in subspaces])
    return np.asarray(subspaces, dtype=np.float64)


def projected_volumes(points, subspaces) -> np.ndarray:
    """vol_ell of the hull of ``points`` projected onto each subspace.

    Lower-dimensional projections count as zero.  Passing hull vertices
    instead of the whole cloud gives the same values faster.
    """
    P = as_points(points)
    B = _bases(subspaces)
    S, ell, d = B.shape
    if P.shape[1] != d:
        raise DimensionMismatch(f"points in R^{P.shape[1]}, subspaces in R^{d}")
    out = np.empty(S)
    if ell == 1:
        proj = P @ B[:, 0, :].T
        return proj.max(axis=0) - proj.min(axis=0)
    if ell == 2:
        for s0 in range(0, S, _CHUNK):
            proj = np.ascontiguousarray(np.einsum("md,sld->sml", P, B[s0:s0 + _CHUNK]))
            out[s0:s0 + _CHUNK] = np.abs(kernels.batch_hull2d_area(proj))
        return out
    if ell == d:
        # an isometry keeps the face lattice: reuse the facet cones
        try:
            hull = convex_hull(P)
        except DegenerateInput:
            return np.zeros(S)
        V = hull.facet_vertices() - hull.vertices.mean(axis=0)
        for s0 in range(0, S, _CHUNK // 8):
            W = np.einsum("fkd,sld->sfkl", V, B[s0:s0 + _CHUNK // 8])
            out[s0:s0 + _CHUNK // 8] = np.abs(np.linalg.det(W)).sum(axis=1)
        return out / math.factorial(d)
    if ell == d - 1:
        # Cauchy: vol_{d-1}(P | u^perp) = 1/2 sum_F area(F) |<n_F, u>|
        try:
            hull = convex_hull(P)
        except DegenerateInput:
            hull = None
        if hull is not None:
            V = hull.facet_vertices()
            D = V[:, 1:, :] - V[:, :1, :]
            areas = np.sqrt(np.maximum(np.linalg.det(D @ np.transpose(D, (0, 2, 1))), 0.0))
            areas /= math.factorial(d - 1)
            u = np.linalg.svd(B, full_matrices=True)[2][:, -1, :]
            return 0.5 * np.abs(u @ hull.normals.T) @ areas
    for s in range(S):
        out[s] = hull_volume_or_zero(P @ B[s].T)
    return out


def kubota_estimate(points, ell: int, subspaces) -> IVEstimate:
    """Prefactor times the mean projected volume over the given subspaces."""
    B = _bases(subspaces)
    d = B.shape[2]
    vals = kubota_prefactor(d, ell) * projected_volumes(points, B)
    S = len(vals)
    se = float(vals.std(ddof=1)) / math.sqrt(S) if S > 1 else 0.0
    return IVEstimate(ell, float(vals.mean()), se, S, "kubota-mc")


def v1_support_estimate(cloud, n_directions: int, stream) -> IVEstimate:
    """V_1 from the sphere average of the support function:
    V_1 = d kappa_d / kappa_{d-1} * E h(u)."""
    P = as_points(cloud)
    if P.shape[0] == 0:
        raise EmptyCloud("support estimate of an empty cloud")
    d = P.shape[1]
    rng = as_stream(stream).rng
    u = rng.standard_normal((n_directions, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    if P.shape[0] > 4 * (d + 1):
        try:
            P = convex_hull(P).vertices
        except DegenerateInput:
            pass
    h = (P @ u.T).max(axis=0)
    c = d * kappa(d) / kappa(d - 1)
    vals = c * h
    se = float(vals.std(ddof=1)) / math.sqrt(n_directions) if n_directions > 1 else 0.0
    return IVEstimate(1, float(vals.mean()), se, n_directions, "support-mc")


def default_method(d: int, ell: int) -> str:
    if ell == d:
        return "exact-volume"
    if ell == d - 1:
        return "exact-surface"
    return "kubota-mc"


def intrinsic_volume(cloud, ell: int, method: str | None = None, *, n_subspaces: int = DEFAULT_SUBSPACES,
                     n_directions: int = 10_000, stream=None, subspaces=None) -> IVEstimate:
    """V_ell of the convex hull of ``cloud``.

    ``subspaces`` (a stack of bases) overrides sampling for kubota-mc, which
    is how callers share one Grassmannian sample across clouds.
    """
    P = as_points(cloud)
    d = P.shape[1]
    if not 1 <= ell <= d:
        raise ValueError(f"ell must be in 1..{d}")
    method = method or default_method(d, ell)
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if method == "exact-volume" and ell != d:
        raise MethodMismatch("exact-volume requires ell = d")
    if method == "exact-surface" and ell != d - 1:
        raise MethodMismatch("exact-surface requires ell = d - 1")
    if method == "support-mc" and ell != 1:
        raise MethodMismatch("support-mc requires ell = 1")

    hull = convex_hull(P)
    if method == "exact-volume":
        return IVEstimate(ell, polytope_volume(hull), 0.0, 0, method)
    if method == "exact-surface":
        return IVEstimate(ell, surface_area(hull) / 2.0, 0.0, 0, method)
    if method == "support-mc":
        return v1_support_estimate(hull.vertices, n_directions, stream)
    if subspaces is None:
        subspaces = sample_subspaces(d, ell, n_subspaces, stream)
    return kubota_estimate(hull.vertices, ell, subspaces)


def _cone_indicator(cone: CircularCone, B: np.ndarray) -> np.ndarray:
    return angle_to_subspace(cone.axis, B) <= cone.half_angle + 1e-12


def local_functional(z, F, cone: CircularCone, ell: int, subspaces) -> float:
    """Kubota average of vol_ell([z, F] | L), restricted to L meeting ``cone``."""
    return float(local_functional_batch(np.atleast_2d(z), F, cone, ell, subspaces)[0])


def local_functional_batch(Z, F, cone: CircularCone, ell: int, subspaces) -> np.ndarray:
    """local_functional for every row of Z on one shared subspace sample."""
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    Fp = as_points(F)
    B = _bases(subspaces)
    S, l2, d = B.shape
    if l2 != ell or Z.shape[1] != d or Fp.shape[1] != d:
        raise DimensionMismatch("inconsistent dimensions")
    if S == 0:
        raise ValueError("empty subspace list")
    ind = _cone_indicator(cone, B).astype(np.float64)
    pref = kubota_prefactor(d, ell)
    R = len(Z)
    out = np.empty(R)
    if ell == 1:
        fp = Fp @ B[:, 0, :].T                        # (|F|, S)
        fmax, fmin = fp.max(axis=0), fp.min(axis=0)
        for r0 in range(0, R, 256):
            zp = Z[r0:r0 + 256] @ B[:, 0, :].T        # (r, S)
            ln = np.maximum(fmax, zp) - np.minimum(fmin, zp)
            out[r0:r0 + 256] = ln @ ind / S
        return pref * out
    if ell == d:
        # projection onto R^d is an isometry and the indicator is identically 1
        for r in range(R):
            out[r] = hull_volume_or_zero(np.vstack([Z[r], Fp])) * ind.mean()
        return pref * out
    if ell == 2:
        fp = np.einsum("md,sld->sml", Fp, B)          # (S, |F|, 2)
        for r in range(R):
            zp = np.einsum("d,sld->sl", Z[r], B)[:, None, :]
            proj = np.ascontiguousarray(np.concatenate([zp, fp], axis=1))
            out[r] = np.abs(kernels.batch_hull2d_area(proj)) @ ind / S
        return pref * out
    for r in range(R):
        pts = np.vstack([Z[r], Fp])
        out[r] = projected_volumes(pts, B) @ ind / S
    return pref * out


def intrinsic_volumes(cloud, ells, subspaces: dict | None = None, stream=None,
                      n_subspaces: int = DEFAULT_SUBSPACES) -> dict:
    """Several V_ell of one hull with the default method per ell, hulling once.

    ``subspaces`` maps ell to a shared stack of bases for the Monte Carlo
    cases; missing entries are sampled from ``stream``.
    """
    P = as_points(cloud)
    d = P.shape[1]
    hull = convex_hull(P)
    out = {}
    for ell in ells:
        if not 1 <= ell <= d:
            raise ValueError(f"ell must be in 1..{d}")
        method = default_method(d, ell)
        if method == "exact-volume":
            out[ell] = IVEstimate(ell, polytope_volume(hull), 0.0, 0, method)
        elif method == "exact-surface":
            out[ell] = IVEstimate(ell, surface_area(hull) / 2.0, 0.0, 0, method)
        else:
            B = (subspaces or {}).get(ell)
            if B is None:
                B = sample_subspaces(d, ell, n_subspaces, stream)
            out[ell] = kubota_estimate(hull.vertices, ell, B)
    return out
