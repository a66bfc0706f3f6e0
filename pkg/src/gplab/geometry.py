"""Exact convex geometry in R^d for small d: hulls, volumes, facet areas and
half-space predicates.

Hulls of planar clouds go through the monotone-chain kernel; everything else
uses an incremental beneath-beyond construction on a symbolically perturbed
copy of the input.  Combinatorics come from the perturbed copy, all reported
coordinates, normals and measures from the original points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import kernels
from .errors import DegenerateInput, EmptyCloud

#: Absolute tolerance for facet membership and containment tests.
TOL = 1e-9

_PERTURB_SCALE = 1e-12
_PERTURB_SEED = 0x5EED_CAFE
# below these sizes the candidate filter costs more than it saves
_FILTER_MIN = {2: 4096, 3: 400, 4: 300}


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PointCloud:
    """Ordered list of points in R^dim (possibly empty)."""

    dim: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.size == 0:
            pts = pts.reshape(0, self.dim)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError(f"points must have shape (n, {self.dim}), got {pts.shape}")
        object.__setattr__(self, "points", _readonly(pts))

    @classmethod
    def of(cls, points) -> "PointCloud":
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        return cls(pts.shape[1], pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def scaled(self, c: float) -> "PointCloud":
        return PointCloud(self.dim, c * self.points)


def as_points(obj) -> np.ndarray:
    """Coordinates of a PointCloud, Polytope or array-like as an (n, d) array."""
    if isinstance(obj, PointCloud):
        return obj.points
    if isinstance(obj, Polytope):
        return obj.vertices
    pts = np.asarray(obj, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    return pts


@dataclass(frozen=True)
class HalfSpace:
    """The closed set {x : <x, normal> <= offset}."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.array(self.normal, dtype=np.float64)
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError("half-space normal must be a unit vector")
        object.__setattr__(self, "normal", _readonly(n))
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_normal(cls, normal, offset: float) -> "HalfSpace":
        """Build from a non-normalised normal, rescaling the offset to match."""
        n = np.asarray(normal, dtype=np.float64)
        s = np.linalg.norm(n)
        if s == 0:
            raise ValueError("zero normal")
        return cls(n / s, offset / s)

    def signed_distance(self, x) -> np.ndarray | float:
        return np.asarray(x, dtype=np.float64) @ self.normal - self.offset

    def contains(self, x, tol: float = TOL):
        return self.signed_distance(x) <= tol


@dataclass(frozen=True)
class Simplex:
    """Convex hull of d+1 affinely independent points in R^d."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1] + 1:
            raise ValueError("a d-simplex needs d+1 vertices in R^d")
        object.__setattr__(self, "vertices", _readonly(v))
        object.__setattr__(self, "_inv", np.linalg.inv((v[1:] - v[0]).T))
        d = v.shape[1]
        vol = simplex_volume(v)
        # height of vertex k above the opposite facet
        h = np.array([d * vol / max(facet_area(np.delete(v, k, axis=0)), 1e-300) for k in range(d + 1)])
        object.__setattr__(self, "_heights", h)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def volume(self) -> float:
        return simplex_volume(self.vertices)

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def barycentric(self, x) -> np.ndarray:
        """Barycentric coordinates; rows for each point in ``x``."""
        x = np.asarray(x, dtype=np.float64)
        lam = (x - self.vertices[0]) @ self._inv.T
        lam0 = 1.0 - lam.sum(axis=-1, keepdims=True)
        return np.concatenate([lam0, lam], axis=-1)

    def contains(self, x, tol: float = TOL):
        # relative tolerance in barycentric terms is not what we want for
        # tiny simplices, so compare distances to facet hyperplanes instead
        return np.all(self.facet_distances(x) <= tol, axis=-1)

    def facet_distances(self, x) -> np.ndarray:
        """Signed distances to the d+1 facet hyperplanes (positive = outside)."""
        x = np.asarray(x, dtype=np.float64)
        lam = self.barycentric(x)
        return -lam * self._heights

    def homothet(self, centre, factor: float) -> "Simplex":
        c = np.asarray(centre, dtype=np.float64)
        return Simplex(c + factor * (self.vertices - c))

    def uniform(self, count: int, rng: np.random.Generator) -> np.ndarray:
        w = rng.dirichlet(np.ones(self.dim + 1), size=count)
        return w @ self.vertices


@dataclass(frozen=True)
class Facet:
    vertices: tuple
    normal: np.ndarray
    offset: float


@dataclass(frozen=True)
class Polytope:
    """Full-dimensional convex polytope with simplicial facet list.

    ``vertices`` are input points; ``source_index`` maps them back to their
    rows in the input cloud.  Facet vertex tuples index into ``vertices``.
    """

    dim: int
    vertices: np.ndarray
    facets: tuple
    source_index: np.ndarray = field(default=None)

    @property
    def normals(self) -> np.ndarray:
        return np.array([f.normal for f in self.facets]).reshape(-1, self.dim)

    @property
    def offsets(self) -> np.ndarray:
        return np.array([f.offset for f in self.facets])

    def facet_vertices(self) -> np.ndarray:
        """Coordinates of each facet's vertices, shape (F, d, d)."""
        idx = np.array([f.vertices for f in self.facets], dtype=np.intp)
        return self.vertices[idx]

    def contains(self, x, tol: float = TOL):
        x = np.asarray(x, dtype=np.float64)
        return np.all(x @ self.normals.T - self.offsets <= tol, axis=-1)

    def scaled(self, c: float) -> "Polytope":
        facets = tuple(Facet(f.vertices, f.normal, c * f.offset) for f in self.facets)
        return Polytope(self.dim, c * self.vertices, facets, self.source_index)


def simplex_volume(vertices) -> float:
    """|det(v_1 - v_0, ..., v_d - v_0)| / d!; zero for degenerate input."""
    v = np.asarray(vertices, dtype=np.float64)
    d = v.shape[1]
    if v.shape[0] != d + 1:
        raise ValueError("need d+1 vertices")
    return abs(float(np.linalg.det(v[1:] - v[0]))) / math.factorial(d)


def facet_area(vertices) -> float:
    """(k-1)-volume of the simplex spanned by k points (Gram determinant)."""
    v = np.asarray(vertices, dtype=np.float64)
    k = v.shape[0] - 1
    if k == 0:
        return 1.0
    D = v[1:] - v[0]
    g = np.linalg.det(D @ D.T)
    return math.sqrt(max(g, 0.0)) / math.factorial(k)


def _facet_normals(V: np.ndarray) -> np.ndarray:
    """Unnormalised normals of hyperplanes through rows of V, shape (h, d, d)."""
    h, d, _ = V.shape
    D = V[:, 1:, :] - V[:, :1, :]
    if d == 2:
        return np.stack([D[:, 0, 1], -D[:, 0, 0]], axis=1)
    if d == 3:
        return np.cross(D[:, 0], D[:, 1])
    n = np.empty((h, d))
    cols = np.arange(d)
    for j in range(d):
        n[:, j] = (-1) ** j * np.linalg.det(D[:, :, cols != j])
    return n


def _perturbation(m: int, d: int, scale: float) -> np.ndarray:
    # the i-th row is a fixed function of i: draws are prefix-consistent
    rng = np.random.Generator(np.random.PCG64(_PERTURB_SEED))
    u = rng.standard_normal((m, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return u * (_PERTURB_SCALE * scale * np.arange(1, m + 1))[:, None]


def _initial_simplex(P: np.ndarray, tol: float) -> list:
    n, d = P.shape
    chosen = [int(np.argmin(P[:, 0]))]
    dist = np.linalg.norm(P - P[chosen[0]], axis=1)
    chosen.append(int(np.argmax(dist)))
    if dist[chosen[1]] <= tol:
        raise DegenerateInput("all points coincide")
    for _ in range(2, d + 1):
        base = P[chosen[0]]
        Q, _ = np.linalg.qr((P[chosen[1:]] - base).T)
        rel = P - base
        res = rel - (rel @ Q) @ Q.T
        rn = np.linalg.norm(res, axis=1)
        k = int(np.argmax(rn))
        if rn[k] <= tol:
            raise DegenerateInput(f"affine dimension {len(chosen) - 1} < {d}")
        chosen.append(k)
    return chosen


def _beneath_beyond(P: np.ndarray, init: list) -> list:
    """Facets (sorted vertex-index tuples) of the hull of P, general position."""
    n, d = P.shape
    c = P[init].mean(axis=0)
    cap = 64
    N = np.zeros((cap, d))
    B = np.zeros(cap)
    alive = np.zeros(cap, dtype=bool)
    fverts: list = []
    ridges: dict = {}

    def add(faces):
        nonlocal cap, N, B, alive
        V = P[np.array(faces)]
        nrm = _facet_normals(V)
        nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
        off = np.einsum("hd,hd->h", nrm, V[:, 0])
        flip = nrm @ c - off > 0
        nrm[flip] *= -1
        off[flip] *= -1
        need = len(fverts) + len(faces)
        if need > cap:
            while cap < need:
                cap *= 2
            N = np.resize(N, (cap, d))
            B = np.resize(B, cap)
            alive = np.concatenate([alive, np.zeros(cap - len(alive), dtype=bool)])
        for f, nn, bb in zip(faces, nrm, off):
            fid = len(fverts)
            fverts.append(f)
            N[fid] = nn
            B[fid] = bb
            alive[fid] = True
            for k in range(d):
                ridges.setdefault(f[:k] + f[k + 1:], []).append(fid)

    add([tuple(sorted(f)) for f in combinations(sorted(init), d)])

    rest = np.setdiff1d(np.arange(n), init)
    order = rest[np.argsort(-np.linalg.norm(P[rest] - c, axis=1), kind="stable")]
    for idx in order:
        p = P[idx]
        cnt = len(fverts)
        vis = alive[:cnt] & (N[:cnt] @ p - B[:cnt] > 0.0)
        if not vis.any():
            continue
        vis_ids = np.flatnonzero(vis)
        horizon = []
        for f in vis_ids:
            vs = fverts[f]
            for k in range(d):
                key = vs[:k] + vs[k + 1:]
                pair = ridges[key]
                other = pair[0] if pair[0] != f else pair[-1]
                if other == f or not vis[other]:
                    horizon.append(key)
        for f in vis_ids:
            alive[f] = False
            vs = fverts[f]
            for k in range(d):
                key = vs[:k] + vs[k + 1:]
                pair = ridges[key]
                pair.remove(f)
                if not pair:
                    del ridges[key]
        add([tuple(sorted(key + (int(idx),))) for key in horizon])
    return [fverts[f] for f in np.flatnonzero(alive[: len(fverts)])]


def _assemble(P: np.ndarray, faces: list, src: np.ndarray, pert_normals=None):
    """Build a Polytope from facet tuples over rows of P (original coords).

    Returns (polytope, redundant_rows): rows that came out as vertices of the
    perturbed hull but are not extreme points of the original one.
    """
    n, d = P.shape
    verts = sorted({v for f in faces for v in f})
    remap = {v: i for i, v in enumerate(verts)}
    V = P[np.array(faces)]
    c = P[verts].mean(axis=0)
    nrm = _facet_normals(V)
    norms = np.linalg.norm(nrm, axis=1)
    scale = max(1.0, float(np.abs(P[verts]).max()))
    bad = norms <= 1e-12 * scale ** (d - 1)
    nrm[~bad] /= norms[~bad, None]
    if bad.any():
        if pert_normals is None:
            raise DegenerateInput("degenerate facet")
        nrm[bad] = pert_normals[bad]
    flip = np.einsum("hd,hd->h", nrm, V[:, 0] - c) < 0
    nrm[flip] *= -1
    off = np.einsum("hd,hdk->hk", nrm, np.transpose(V, (0, 2, 1))).max(axis=1)

    redundant = []
    if d > 2:
        incident: dict = {}
        for fi, f in enumerate(faces):
            for v in f:
                incident.setdefault(v, []).append(fi)
        for v, fl in incident.items():
            s = np.linalg.svd(nrm[fl], compute_uv=False)
            if len(s) < d or s[d - 1] < 1e-10:
                redundant.append(v)
    facets = tuple(
        Facet(tuple(remap[v] for v in f), _readonly(nrm[i].copy()), float(off[i]))
        for i, f in enumerate(faces)
    )
    poly = Polytope(d, _readonly(P[verts].copy()), facets, _readonly(src[verts].copy()))
    return poly, redundant


def _hull_subset(P: np.ndarray, src: np.ndarray) -> Polytope:
    """Hull of the rows of P (d >= 2); ``src`` maps rows to input indices."""
    # drop exact duplicates, keeping first occurrences
    _, first = np.unique(P, axis=0, return_index=True)
    if len(first) < len(P):
        first = np.sort(first)
        P, src = P[first], src[first]
    n, d = P.shape
    scale = max(1.0, float(np.abs(P).max()))
    if d == 2:
        hidx = kernels.hull2d(np.ascontiguousarray(P))
        if len(hidx) < 3:
            raise DegenerateInput("planar points are collinear")
        area, _ = kernels.polygon_measures(P, hidx)
        if area <= TOL * TOL * scale * scale:
            raise DegenerateInput("planar points are collinear")
        V = P[hidx]
        E = np.roll(V, -1, axis=0) - V
        nrm = np.stack([E[:, 1], -E[:, 0]], axis=1)
        nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
        off = np.einsum("hd,hd->h", nrm, V)
        k = len(hidx)
        facets = tuple(
            Facet((i, (i + 1) % k), _readonly(nrm[i].copy()), float(off[i])) for i in range(k)
        )
        return Polytope(2, _readonly(V.copy()), facets, _readonly(src[hidx].copy()))

    keep = np.arange(n)
    while True:
        Q = P[keep]
        init = _initial_simplex(Q, TOL * scale)
        Qp = Q + _perturbation(len(Q), d, scale)
        faces = _beneath_beyond(Qp, init)
        Vp = Qp[np.array(faces)]
        pn = _facet_normals(Vp)
        pn /= np.linalg.norm(pn, axis=1, keepdims=True)
        poly, redundant = _assemble(Q, faces, src[keep], pn)
        if not redundant:
            return poly
        keep = np.delete(keep, redundant)


def convex_hull(cloud) -> Polytope:
    """Convex hull of a full-dimensional point cloud.

    Raises DegenerateInput when the affine hull of the points is not R^d.
    """
    P = as_points(cloud)
    n = P.shape[0]
    if n == 0:
        raise DegenerateInput("empty cloud")
    d = P.shape[1]
    if d == 1:
        lo, hi = int(np.argmin(P[:, 0])), int(np.argmax(P[:, 0]))
        if P[hi, 0] - P[lo, 0] <= TOL * max(1.0, float(np.abs(P).max())):
            raise DegenerateInput("all points coincide")
        facets = (
            Facet((0,), _readonly(np.array([-1.0])), float(-P[lo, 0])),
            Facet((1,), _readonly(np.array([1.0])), float(P[hi, 0])),
        )
        return Polytope(1, _readonly(P[[lo, hi]].copy()), facets, _readonly(np.array([lo, hi])))
    if n < d + 1:
        raise DegenerateInput(f"{n} points cannot span R^{d}")

    P_u, src = P, np.arange(n)
    m = n
    if m > _FILTER_MIN.get(d, 200):
        # Hull the farthest points from the centroid; accept when the result
        # contains the ball holding every discarded point.
        # any centre is valid; a cheap one near the bulk keeps k small
        c = P_u[:1024].mean(axis=0)
        dist2 = np.zeros(m)
        for j in range(d):
            dist2 += (P_u[:, j] - c[j]) ** 2
        k = min(m, 64 * d * d)
        while k < m:
            part = np.argpartition(dist2, m - k - 1)
            cand = np.sort(part[m - k:])
            rho = math.sqrt(float(dist2[part[m - k - 1]]))
            try:
                poly = _hull_subset(P_u[cand], src[cand])
            except DegenerateInput:
                poly = None
            if poly is not None:
                inradius = float((poly.offsets - poly.normals @ c).min())
                if inradius > rho + TOL:
                    return poly
            k *= 4
    return _hull_subset(P_u, src)


def polytope_volume(p: Polytope) -> float:
    """Lebesgue measure via facet cones from the vertex centroid."""
    if p.dim == 1:
        return float(p.vertices[1, 0] - p.vertices[0, 0])
    c = p.vertices.mean(axis=0)
    V = p.facet_vertices() - c
    return float(np.abs(np.linalg.det(V)).sum()) / math.factorial(p.dim)


def surface_area(p: Polytope) -> float:
    """Sum of the (d-1)-volumes of the facets; V_{d-1} is half of this."""
    if p.dim == 1:
        return 2.0
    V = p.facet_vertices()
    D = V[:, 1:, :] - V[:, :1, :]
    G = np.linalg.det(D @ np.transpose(D, (0, 2, 1)))
    return float(np.sqrt(np.maximum(G, 0.0)).sum()) / math.factorial(p.dim - 1)


def support_value(cloud, direction):
    """max over points of <x, u>; vectorised over rows of ``direction``."""
    P = as_points(cloud)
    if P.shape[0] == 0:
        raise EmptyCloud("support value of an empty cloud")
    u = np.asarray(direction, dtype=np.float64)
    return (P @ u.T).max(axis=0) if u.ndim == 2 else float((P @ u).max())


def contains_point(region, x, tol: float = TOL) -> bool:
    """Membership in a polytope or in an intersection of half-spaces."""
    x = np.asarray(x, dtype=np.float64)
    if isinstance(region, Polytope):
        return bool(region.contains(x, tol))
    return all(bool(h.contains(x, tol)) for h in region)


def vertex_set(p: Polytope) -> set:
    return {tuple(v) for v in p.vertices.tolist()}


def hull_volume_or_zero(points) -> float:
    """Volume of the hull, counting lower-dimensional hulls as zero."""
    try:
        return polytope_volume(convex_hull(points))
    except DegenerateInput:
        return 0.0
