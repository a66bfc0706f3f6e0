"""The local construction behind the variance lower bound.

For a given n: the radius r(n), a maximal 2*c1-separated set y_1..y_m on the
sphere S(r), one simplex Delta_i per site with its homothets Delta_i^j, the
half-spaces H_i^+ and H_i^j, the cones D_i, C_i^1, C_i^2, the events A_i and
the regions used to bound the local variance.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ConstructionFailure, InvalidDimension, InvalidN
from .geometry import HalfSpace, Simplex, as_points
from .grassmann import CircularCone, angle_to_subspace, sample_subspaces
from .intrinsic import local_functional_batch
from .sampling import (
    RandomStream,
    as_stream,
    gaussian_cloud,
    gaussian_restricted,
    halfspace_union_measure,
    simplex_gaussian_measure,
)
from .stats import bootstrap_ci

DEFAULT_C1 = 4.0
DEFAULT_C2 = 0.1
FORMAT_TAG = "gplab-scaffold 1"
TANGENCY_TOL = 1e-7


def radius_r(n) -> float:
    """r(n) = sqrt(2 ln n - ln ln n)."""
    if n < 3:
        raise InvalidN(f"r(n) needs n >= 3, got {n}")
    ln = math.log(n)
    return math.sqrt(2.0 * ln - math.log(ln))


def _sphere_points(count: int, d: int, r: float, rng) -> np.ndarray:
    g = rng.standard_normal((count, d))
    return r * g / np.linalg.norm(g, axis=1, keepdims=True)


def pack_sphere(d: int, r: float, c1: float, stream, patience: int | None = None) -> np.ndarray:
    """Greedy maximal 2*c1-separated subset of S(r).

    Uniform candidates are accepted when at distance >= 2*c1 from every
    accepted point; the search stops after ``patience`` (default 10^4 * d)
    consecutive rejections.  When c1 >= r no two points of S(r) are far
    enough apart and the maximal set is a single point.
    """
    if not (r > 0 and c1 > 0):
        raise ValueError("need r > 0 and c1 > 0")
    rng = as_stream(stream).rng
    patience = 10**4 * d if patience is None else patience
    sep2 = (2.0 * c1) ** 2
    pts = np.empty((0, d))
    misses = 0
    while misses < patience:
        cand = _sphere_points(1024, d, r, rng)
        if len(pts):
            ok = (((cand[:, None, :] - pts[None]) ** 2).sum(-1) >= sep2).all(axis=1)
        else:
            ok = np.ones(len(cand), dtype=bool)
        for k in range(len(cand)):
            if ok[k] and (not len(pts) or (((pts - cand[k]) ** 2).sum(1) >= sep2).all()):
                pts = np.vstack([pts, cand[k]])
                misses = 0
            else:
                misses += 1
                if misses >= patience:
                    break
    return pts


def packing_witness(points, r: float, c1: float, stream, count: int | None = None) -> bool:
    """True when every one of ``count`` fresh uniform candidates lies within
    2*c1 of an accepted point (maximality witness)."""
    P = as_points(points)
    d = P.shape[1]
    rng = as_stream(stream).rng
    count = 10**4 * d if count is None else count
    cand = _sphere_points(count, d, r, rng)
    near = np.zeros(count, dtype=bool)
    for p in P:
        near |= ((cand - p) ** 2).sum(1) < (2.0 * c1) ** 2
    return bool(near.all())


def _tangent_frame(u: np.ndarray) -> np.ndarray:
    """Orthonormal basis of u^perp from Gram-Schmidt on (u, e_1, e_2, ...)."""
    d = len(u)
    basis = [u]
    for k in range(d):
        v = np.zeros(d)
        v[k] = 1.0
        for b in basis:
            v = v - (v @ b) * b
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
        if len(basis) == d:
            break
    T = np.array(basis[1:])
    # orient: first nonzero component of each frame vector positive
    first = np.argmax(np.abs(T) > 1e-12, axis=1)
    sign = np.sign(T[np.arange(len(T)), first])
    return T * sign[:, None]


def _regular_simplex(d: int, radius: float) -> np.ndarray:
    """d vertices of a regular simplex in R^(d-1), centred, on a sphere of the
    given radius (Helmert coordinates of the centred standard basis)."""
    if d == 2:
        # the 0-sphere: two points on a line
        return np.array([[radius], [-radius]])
    E = np.eye(d) - 1.0 / d
    H = np.zeros((d - 1, d))
    for k in range(1, d):
        H[k - 1, :k] = 1.0
        H[k - 1, k] = -k
        H[k - 1] /= math.sqrt(k * (k + 1))
    coords = E @ H.T
    return coords * (radius / math.sqrt(1.0 - 1.0 / d))


@dataclass(frozen=True, eq=False)
class SiteFrame:
    y: np.ndarray
    y0: np.ndarray
    simplex_vertices: np.ndarray     # y^1..y^d
    delta: Simplex
    delta_j: tuple                   # Delta^0..Delta^d
    H_plus: HalfSpace
    H_j: tuple                       # H^1..H^d
    D_generators: np.ndarray
    C1: CircularCone
    C2: CircularCone
    z: np.ndarray                    # canonical z^0..z^d
    w: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    r: float
    c2: float

    @property
    def dim(self) -> int:
        return len(self.y)

    @property
    def axis(self) -> np.ndarray:
        return self.C2.axis

    @property
    def no_point_region(self) -> tuple:
        return (self.H_plus,) + tuple(self.H_j)

    def in_no_point_region(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        out = np.zeros(len(x), dtype=bool)
        for h in self.no_point_region:
            out |= h.contains(x)
        return out

    def R1(self, x) -> np.ndarray:
        """(w1 - C2) intersected with Delta^0."""
        x = np.asarray(x, dtype=np.float64)
        return self.C2.contains_direction(self.w1 - x) & self.delta_j[0].contains(x)

    def R2(self, x) -> np.ndarray:
        """(w2 + C2) intersected with Delta^0."""
        x = np.asarray(x, dtype=np.float64)
        return self.C2.contains_direction(x - self.w2) & self.delta_j[0].contains(x)


def _homothet_halfspace(j: int, deltas, tol: float) -> HalfSpace:
    """H^j: contains Delta^k (k not in {0, j}); Delta^0 and Delta^j outside;
    the bounding hyperplane touches every Delta^k with k != j.

    All homothets are translates of one simplex, so a common supporting
    hyperplane passes through one vertex of each touched simplex.  Every such
    vertex choice is tried and the admissible hyperplanes are kept; among them
    the one farthest from the origin is returned.
    """
    d = deltas[0].dim
    others = [k for k in range(1, d + 1) if k != j]
    inside = np.vstack([deltas[k].vertices for k in others]) if others else np.empty((0, d))
    V0 = deltas[0].vertices
    Vj = deltas[j].vertices
    scale = max(1.0, float(np.abs(V0).max()))
    best = None
    for b in range(d + 1):
        for choice in itertools.product(range(d + 1), repeat=len(others)):
            pts = np.vstack([V0[b]] + [deltas[k].vertices[a] for k, a in zip(others, choice)])
            A = pts[1:] - pts[0]
            # normal = null vector of the d-1 difference vectors
            _, s, vt = np.linalg.svd(A.reshape(d - 1, d) if d > 1 else A, full_matrices=True)
            if d > 1 and s.min() < 1e-12 * scale:
                continue
            n = vt[-1]
            off = float(pts[0] @ n)
            # orient so Delta^j lies on the positive side; H^j = {<x, n> <= off}
            if (Vj @ n - off).min() < 0:
                n, off = -n, -off
            if inside.size and (inside @ n - off).max() > tol:
                continue
            if (V0 @ n - off).min() < -tol:
                continue
            if (Vj @ n - off).min() <= tol:
                continue
            if off > -tol:
                # the origin would lie in H^j
                continue
            h = HalfSpace(n, off)
            if best is None or h.offset < best.offset - 1e-12:
                best = h
    if best is None:
        raise ConstructionFailure(f"no supporting half-space H^{j}")
    return best


def build_site(y, d: int, r: float, c1: float, c2: float, halfspaces: bool = True) -> SiteFrame:
    """All per-site objects for a packing point y on S(r).

    ``halfspaces=False`` skips H^1..H^d, for cone audits at constants where
    they do not exist.
    """
    y = np.asarray(y, dtype=np.float64)
    if d < 2:
        raise InvalidDimension("the construction needs d >= 2")
    if len(y) != d:
        raise InvalidDimension("y has the wrong dimension")
    if abs(np.linalg.norm(y) - r) > 1e-9 * max(1.0, r):
        raise ValueError("y must lie on S(r)")
    if not 0 < c2 < 1:
        raise ValueError("c2 must be in (0, 1)")
    u = y / r
    y0 = (1.0 + r ** -2) * y
    T = _tangent_frame(u)
    S = _regular_simplex(d, math.sqrt(2.0))
    yj = y + S @ T
    delta = Simplex(np.vstack([y0, yj]))
    deltas = tuple(delta.homothet(delta.vertices[j], c2) for j in range(d + 1))
    H_plus = HalfSpace(-u, -r)
    H_j = tuple(_homothet_halfspace(j, deltas, TANGENCY_TOL) for j in range(1, d + 1)) if halfspaces else ()
    z = np.array([s.centroid for s in deltas])
    axis = y - z[0]
    axis = axis / np.linalg.norm(axis)
    C1 = CircularCone(z[0], axis, math.atan(r / (d - 1)))
    C2 = CircularCone(z[0], axis, math.atan(2.0 * r))
    V0 = deltas[0].vertices
    w = V0[1:].mean(axis=0)
    w1 = (2.0 * V0[0] + w) / 3.0
    w2 = (V0[0] + 2.0 * w) / 3.0
    return SiteFrame(y, y0, yj, delta, deltas, H_plus, H_j, yj - y0, C1, C2, z, w, w1, w2, r, c2)


@dataclass(frozen=True, eq=False)
class Scaffold:
    n: int
    d: int
    r: float
    c1: float
    c2: float
    sites: tuple

    @property
    def m(self) -> int:
        return len(self.sites)


def build_scaffold(n: int, d: int, c1: float = DEFAULT_C1, c2: float = DEFAULT_C2,
                   stream=None, points=None, halfspaces: bool = True) -> Scaffold:
    """Packing plus site frames.  ``points`` skips the packing step."""
    r = radius_r(n)
    if points is None:
        points = pack_sphere(d, r, c1, stream if stream is not None else RandomStream(0, 0))
    sites = tuple(build_site(p, d, r, c1, c2, halfspaces) for p in as_points(points))
    if not sites:
        raise ConstructionFailure("empty packing")
    return Scaffold(int(n), d, r, float(c1), float(c2), sites)


# ---------------------------------------------------------------- invariants

def in_positive_hull(gens: np.ndarray, v, tol: float = 1e-9) -> np.ndarray:
    """Whether rows of v lie in pos(gens) for d independent generators."""
    v = np.atleast_2d(np.asarray(v, dtype=np.float64))
    coef = np.linalg.solve(np.asarray(gens).T, v.T).T
    scale = np.maximum(1.0, np.abs(coef).max(axis=1, keepdims=True))
    return np.all(coef >= -tol * scale, axis=1)


def site_invariant_report(site: SiteFrame, stream=None, n_dirs: int = 10_000) -> dict:
    """Numerical residuals of the per-site invariants (all should be ~0 or True)."""
    d = site.dim
    r = site.r
    rep = {
        "apex_offset": abs(np.linalg.norm(site.y - site.y0) - 1.0 / r),
        "frame_radius": float(np.abs(np.linalg.norm(site.simplex_vertices - site.y, axis=1) - math.sqrt(2)).max()),
        "homothets_inside": all(bool(site.delta.contains(s.vertices).all()) for s in site.delta_j),
        "delta_in_H_plus": bool(site.H_plus.contains(site.delta.vertices).all()),
    }
    rep["tangency"] = _tangency_residual(site)
    if stream is not None:
        rep.update(_sandwich(site, stream, n_dirs))
    return rep


def _tangency_residual(site: SiteFrame) -> float:
    worst = 0.0
    d = site.dim
    for j, h in enumerate(site.H_j, start=1):
        for k in range(d + 1):
            if k == j:
                continue
            sd = h.signed_distance(site.delta_j[k].vertices)
            # touching: the extreme vertex lies on the hyperplane
            worst = max(worst, float(np.abs(sd).min()) if k == 0 else float(abs(sd.max())))
    return worst


def _cone_directions(axis: np.ndarray, angle_lo: float, angle_hi: float, count: int, rng) -> np.ndarray:
    """Unit vectors whose angle with ``axis`` is uniform in [angle_lo, angle_hi]."""
    d = len(axis)
    g = rng.standard_normal((count, d))
    g -= np.outer(g @ axis, axis)
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    t = rng.uniform(angle_lo, angle_hi, size=count)
    return np.cos(t)[:, None] * axis + np.sin(t)[:, None] * g


def _sandwich(site: SiteFrame, stream, count: int) -> dict:
    rng = as_stream(stream).rng
    d, r = site.dim, site.r
    ax3 = site.y - site.y0
    ax3 = ax3 / np.linalg.norm(ax3)
    a_in = math.atan(math.sqrt(2) * r / (d - 1))
    a_out = math.atan(math.sqrt(2) * r)
    gens = site.D_generators
    inner = _cone_directions(ax3, 0.0, a_in, count, rng)
    outer = _cone_directions(ax3, a_out + 1e-9, math.pi, count, rng)
    eq3 = bool(in_positive_hull(gens, inner).all() and not in_positive_hull(gens, outer, tol=-1e-12).any())
    gz = site.z[1:] - site.z[0]
    inner4 = _cone_directions(site.C1.axis, 0.0, site.C1.half_angle, count, rng)
    outer4 = _cone_directions(site.C2.axis, site.C2.half_angle + 1e-9, math.pi, count, rng)
    eq4 = bool(in_positive_hull(gz, inner4).all() and not in_positive_hull(gz, outer4, tol=-1e-12).any())
    return {"eq3_sandwich": eq3, "eq4_sandwich": eq4}


def _cone_violations(scaffold: Scaffold, i: int, zi: np.ndarray) -> list:
    gens = zi[1:] - zi[0]
    if abs(np.linalg.det(gens)) < 1e-14 * max(1.0, float(np.abs(gens).max())) ** len(zi[0]):
        # a degenerate cone contains no full-dimensional simplex
        return [k for k in range(scaffold.m) if k != i]
    return [k for k, sk in enumerate(scaffold.sites)
            if k != i and not in_positive_hull(gens, sk.delta.vertices - zi[0]).all()]


def check_cone_containment(scaffold: Scaffold, z=None, mode: str = "centroid") -> list:
    """Pairs (i, k) for which a vertex of Delta_k is outside z_i^0 + C_i.

    ``mode="centroid"`` uses the canonical z_i^j; ``mode="vertices"`` tries
    every choice of z_i^j among the vertices of Delta_i^j (the lemma allows
    arbitrary points), a worst-case stress of the constants.  ``z`` overrides
    both with one (d+1, d) array per site.  An empty list means the audit
    passed.
    """
    bad = set()
    for i, si in enumerate(scaffold.sites):
        if z is not None:
            cands = [np.asarray(z[i])]
        elif mode == "centroid":
            cands = [si.z]
        elif mode == "vertices":
            d = si.dim
            cands = (np.array([si.delta_j[j].vertices[c] for j, c in enumerate(ch)])
                     for ch in itertools.product(range(d + 1), repeat=d + 1))
        else:
            raise ValueError(f"unknown mode {mode!r}")
        for zi in cands:
            bad.update((i, k) for k in _cone_violations(scaffold, i, zi))
    return sorted(bad)


# ---------------------------------------------------------------- events A_i

def event_indicator(cloud, site: SiteFrame) -> bool:
    """Exactly one point in each Delta^j and exactly d+1 points in the union
    H^+ u H^1 u ... u H^d."""
    P = as_points(cloud)
    if P.shape[1] != site.dim:
        raise InvalidDimension("cloud and site dimensions differ")
    if not len(P):
        return False
    sel = site.in_no_point_region(P)
    Q = P[sel]
    if len(Q) != site.dim + 1:
        return False
    return all(int(np.count_nonzero(s.contains(Q))) == 1 for s in site.delta_j)


def _union_floor(site: SiteFrame) -> float:
    # every point of the union is at least this far from the origin
    return min(-h.offset for h in site.no_point_region)


@dataclass
class EventAuditReport:
    n: int
    d: int
    c1: float
    c2: float
    m: int
    method: str
    p_hat: float
    p_se: float
    p_ci: tuple
    per_site: list
    gamma_delta_n: float
    gamma_delta_n_se: float
    counts: list = field(default_factory=list)
    reps: int = 0
    local_variance: dict = field(default_factory=dict)


def multinomial_log_probability(n: int, cells, q: float) -> float:
    """log P(one point in each cell, none elsewhere in a region of mass q that
    contains the cells), for n i.i.d. points."""
    k = len(cells)
    if n < k:
        return -math.inf
    return (sum(math.log(n - t) for t in range(k)) + sum(math.log(p) for p in cells)
            + (n - k) * math.log1p(-q))


def _site_probability(n: int, site: SiteFrame, samples: int, stream) -> tuple:
    """P(A_i) from its multinomial form, with delta-method standard error of
    log P."""
    d = site.dim
    ps = [simplex_gaussian_measure(s, samples, stream) for s in site.delta_j]
    q = halfspace_union_measure(site.no_point_region, samples, stream)
    k = n - d - 1
    logp = multinomial_log_probability(n, [p.value for p in ps], q.value)
    var = sum((p.std_error / p.value) ** 2 for p in ps) + (k * q.std_error / (1 - q.value)) ** 2
    return logp, math.sqrt(var)


def estimate_event_probability(n: int, d: int, c1: float, c2: float, reps: int, stream,
                               method: str = "multinomial", samples: int = 20_000,
                               scaffold: Scaffold | None = None) -> EventAuditReport:
    """Estimate P(A_i).

    ``direct`` counts A_i over ``reps`` Gaussian clouds of size n.
    ``multinomial`` evaluates n!/(n-d-1)! * prod_j gamma(Delta^j) *
    (1 - gamma(U))^(n-d-1), U the no-point union, with both Gaussian measures
    importance sampled (``samples`` draws each, ``reps`` repetitions pooled);
    this reaches the very small probabilities that frequency counting cannot.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    st = as_stream(stream)
    sc = scaffold or build_scaffold(n, d, c1, c2, st.child(st.stream_id * 7 + 1 + (1 << 40)))
    gd = simplex_gaussian_measure(sc.sites[0].delta, samples, st)
    gdn, gdn_se = n * gd.value, n * gd.std_error
    if method == "direct":
        counts = [0] * sc.m
        floor2 = min(_union_floor(s) for s in sc.sites) ** 2
        for t in range(reps):
            P = gaussian_cloud(n, d, st.child((1 << 41) + t)).points
            far = P[np.einsum("ij,ij->i", P, P) >= floor2 - 1e-9]
            for i, s in enumerate(sc.sites):
                counts[i] += event_indicator(far, s)
        per = [c / reps for c in counts]
        total = reps * sc.m
        p = sum(counts) / total
        # sites within one cloud are not independent; treat the per-cloud
        # site average as the unit of replication
        se = math.sqrt(p * (1 - p) / reps)
        return EventAuditReport(n, d, c1, c2, sc.m, method, p, se, (max(0.0, p - 1.96 * se), p + 1.96 * se),
                                per, gdn, gdn_se, counts, reps)
    if method != "multinomial":
        raise ValueError(f"unknown method {method!r}")
    per = []
    logs = []
    for i, s in enumerate(sc.sites):
        vals = [_site_probability(n, s, samples, st) for _ in range(reps)]
        lp = np.array([v[0] for v in vals])
        lse = math.sqrt(sum(v[1] ** 2 for v in vals)) / reps
        logs.append((float(lp.mean()), lse))
        per.append(math.exp(lp.mean()))
    # congruent sites: pool on the log scale
    lp = float(np.mean([x[0] for x in logs]))
    lse = math.sqrt(sum(x[1] ** 2 for x in logs)) / len(logs)
    p = math.exp(lp)
    ci = (math.exp(lp - 1.96 * lse), math.exp(lp + 1.96 * lse))
    return EventAuditReport(n, d, c1, c2, sc.m, method, p, p * lse, ci, per, gdn, gdn_se, [], reps)


# ---------------------------------------------------------------- local variance

def admissible_subspaces(site: SiteFrame, ell: int, count: int, stream, budget: int = 10**7) -> np.ndarray:
    """Haar subspaces meeting the interior of the polar of C2 (rejection)."""
    d = site.dim
    limit = math.pi / 2 - site.C2.half_angle
    out = []
    got = drawn = 0
    while got < count:
        if drawn >= budget:
            raise ConstructionFailure("no admissible subspace within budget")
        B = sample_subspaces(d, ell, 4096, stream)
        drawn += 4096
        keep = B[angle_to_subspace(site.axis, B) < limit]
        out.append(keep[: count - got])
        got += len(out[-1])
    return np.concatenate(out)


@dataclass(frozen=True)
class Lemma7Regions:
    site: SiteFrame
    ell: int

    def R1(self, x):
        return self.site.R1(x)

    def R2(self, x):
        return self.site.R2(x)

    def e1(self, basis) -> np.ndarray:
        """Unit vector of L closest to the cone axis."""
        B = np.asarray(basis, dtype=np.float64)
        p = B.T @ (B @ self.site.axis)
        return p / np.linalg.norm(p)

    def H0(self, basis) -> HalfSpace:
        """H_{i,0}^+: the side of {<x, e1> = <w2, e1>} away from the origin."""
        e1 = self.e1(basis)
        return HalfSpace(e1, float(self.site.w2 @ e1))

    def G(self, basis, rays: int = 64) -> np.ndarray:
        """Vertices approximating G = H_{i,0}^+ n (w1 + C2).

        Exact in d = 2 (a triangle); in higher d the cone is replaced by
        ``rays`` boundary rays, an inner approximation.
        """
        s = self.site
        e1 = self.e1(basis)
        if np.arccos(min(1.0, float(s.axis @ e1))) >= math.pi / 2 - s.C2.half_angle:
            raise ValueError("subspace does not meet the interior of the polar cone")
        d = s.dim
        a = s.C2.half_angle
        if d == 2:
            perp = np.array([-s.axis[1], s.axis[0]])
            dirs = np.array([math.cos(a) * s.axis + math.sin(a) * perp,
                             math.cos(a) * s.axis - math.sin(a) * perp])
        else:
            T = _tangent_frame(s.axis)
            ang = np.linspace(0, 2 * math.pi, rays, endpoint=False)
            if d == 3:
                ring = np.cos(ang)[:, None] * T[0] + np.sin(ang)[:, None] * T[1]
            else:
                g = np.random.default_rng(rays).standard_normal((rays, d - 1))
                ring = (g / np.linalg.norm(g, axis=1, keepdims=True)) @ T
            dirs = math.cos(a) * s.axis + math.sin(a) * ring
        t = float((s.w2 - s.w1) @ e1) / (dirs @ e1)
        return np.vstack([s.w1, s.w1 + t[:, None] * dirs])


def lemma7_regions(site: SiteFrame, ell: int) -> Lemma7Regions:
    if not 1 <= ell <= site.dim:
        raise ValueError("ell out of range")
    return Lemma7Regions(site, ell)


@dataclass(frozen=True)
class LocalVarianceEstimate:
    variance: float
    ci: tuple
    reps: int
    n_subspaces: int
    values: np.ndarray = field(repr=False)


def local_values(site: SiteFrame, ell: int, Z, subspaces) -> np.ndarray:
    """Local functional at each row of Z with F = [z^1, ..., z^d]."""
    return local_functional_batch(Z, site.z[1:], site.C2, ell, subspaces)


def local_variance_estimate(site: SiteFrame, ell: int, reps: int, n_subspaces: int, stream,
                            fixed_point=None) -> LocalVarianceEstimate:
    """Sample variance of the local functional over Z ~ gamma_d restricted to
    Delta^0, on one shared subspace sample, with a bootstrap CI.

    ``fixed_point`` replaces every Z by one point (a degenerate hook whose
    variance must be 0).
    """
    if reps < 2:
        raise ValueError("reps must be >= 2")
    st = as_stream(stream)
    B = sample_subspaces(site.dim, ell, n_subspaces, st)
    if fixed_point is not None:
        Z = np.repeat(np.asarray(fixed_point, dtype=np.float64)[None], reps, axis=0)
    else:
        Z = gaussian_restricted(site.delta_j[0], st, count=reps)
    vals = local_values(site, ell, Z, B)
    var = float(vals.var(ddof=1))
    if var == 0.0:
        ci = (0.0, 0.0)
    else:
        ci = bootstrap_ci(vals, seed=st.stream_id & 0xFFFFFFFF)
    return LocalVarianceEstimate(var, ci, reps, n_subspaces, vals)


def paired_monotonicity(site: SiteFrame, ell: int, pairs: int, n_subspaces: int, stream) -> dict:
    """Draw Z1 in R1 and Z2 in R2 (Gaussian restricted to Delta^0, then
    conditioned on the region) and compare the local functional on shared
    subspaces; also report how often Z2 lies in [Z1, F]."""
    st = as_stream(stream)
    Z1 = _region_sample(site, site.R1, pairs, st)
    Z2 = _region_sample(site, site.R2, pairs, st)
    B = sample_subspaces(site.dim, ell, n_subspaces, st)
    v1 = local_values(site, ell, Z1, B)
    v2 = local_values(site, ell, Z2, B)
    F = site.z[1:]
    inside = np.array([_in_hull(np.vstack([a, F]), b) for a, b in zip(Z1, Z2)])
    return {"pairs": pairs, "monotone_fraction": float(np.mean(v1 >= v2 - 1e-12)),
            "nested_fraction": float(inside.mean()), "min_gap": float((v1 - v2).min()),
            "v1": v1, "v2": v2}


def _region_sample(site: SiteFrame, pred, count: int, stream) -> np.ndarray:
    out = []
    got = 0
    tries = 0
    while got < count:
        Z = gaussian_restricted(site.delta_j[0], stream, count=max(256, 4 * count))
        Z = Z[pred(Z)]
        out.append(Z[: count - got])
        got += len(out[-1])
        tries += 1
        if tries > 1000:
            raise ConstructionFailure("region has negligible mass")
    return np.concatenate(out)


def _in_hull(vertices, x, tol: float = 1e-12) -> bool:
    """x in the simplex spanned by d+1 vertices."""
    V = np.asarray(vertices)
    lam = np.linalg.solve(np.vstack([V.T, np.ones(len(V))]), np.append(x, 1.0))
    return bool((lam >= -tol).all())


def g_inclusion_report(site: SiteFrame, ell: int, pairs: int, stream, n_subspaces: int = 32) -> dict:
    """Fractions of sampled (Z1, Z2, L) for which G is inside [Z1, F] and
    G meets [Z2, F] only near w2."""
    st = as_stream(stream)
    reg = lemma7_regions(site, ell)
    Ls = admissible_subspaces(site, ell, n_subspaces, st)
    Z1 = _region_sample(site, site.R1, pairs, st)
    Z2 = _region_sample(site, site.R2, pairs, st)
    F = site.z[1:]
    inc = sep = 0
    scale = site.c2 / site.r
    for t in range(pairs):
        G = reg.G(Ls[t % len(Ls)])
        S1 = np.vstack([Z1[t], F])
        inc += all(_in_hull(S1, g, tol=1e-9) for g in G)
        h = reg.H0(Ls[t % len(Ls)])
        # [Z2, F] lies in the closed complement of H_{i,0}^+ apart from w2's slab
        sd = h.signed_distance(np.vstack([Z2[t], F]))
        sep += bool(sd.min() >= -1e-9 * scale)
    return {"pairs": pairs, "G_in_hull_fraction": inc / pairs, "separated_fraction": sep / pairs}


def g_projection_volumes(site: SiteFrame, ell: int, count: int, stream) -> np.ndarray:
    """vol_ell(G | L) for ``count`` admissible L."""
    from .intrinsic import projected_volumes

    reg = lemma7_regions(site, ell)
    Ls = admissible_subspaces(site, ell, count, stream)
    return np.array([projected_volumes(reg.G(B), B[None])[0] for B in Ls])


# ---------------------------------------------------------------- serialization

def _fmt(v) -> str:
    return " ".join("%.17g" % x for x in np.ravel(v))


def dump_scaffold(scaffold: Scaffold, fh) -> None:
    """Write the versioned plain-text form."""
    w = fh.write
    w(FORMAT_TAG + "\n")
    w(f"n {scaffold.n}\nd {scaffold.d}\nc1 {scaffold.c1:.17g}\nc2 {scaffold.c2:.17g}\n")
    w(f"r {scaffold.r:.17g}\nm {scaffold.m}\n")
    for i, s in enumerate(scaffold.sites):
        w(f"site {i}\n")
        w(f"y {_fmt(s.y)}\n")
        for j, h in enumerate(s.H_j, start=1):
            w(f"H{j} {_fmt(h.normal)} {h.offset:.17g}\n")
        w("end\n")


def load_scaffold(fh) -> Scaffold:
    """Read a scaffold and rebuild its geometry from the stored sites."""
    lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0] != FORMAT_TAG:
        raise ConfigError("not a gplab scaffold file")
    head = {}
    k = 1
    for key in ("n", "d", "c1", "c2", "r", "m"):
        name, val = lines[k].split()
        if name != key:
            raise ConfigError(f"expected {key!r}, found {name!r}")
        head[key] = val
        k += 1
    n, d, m = int(head["n"]), int(head["d"]), int(head["m"])
    c1, c2 = float(head["c1"]), float(head["c2"])
    ys, stored = [], []
    while k < len(lines):
        if not lines[k].startswith("site"):
            raise ConfigError(f"unexpected line {lines[k]!r}")
        k += 1
        y = np.array([float(t) for t in lines[k].split()[1:]])
        k += 1
        hs = []
        while lines[k] != "end":
            vals = [float(t) for t in lines[k].split()[1:]]
            hs.append((np.array(vals[:-1]), vals[-1]))
            k += 1
        k += 1
        ys.append(y)
        stored.append(hs)
    if len(ys) != m:
        raise ConfigError("site count does not match header")
    sc = build_scaffold(n, d, c1, c2, points=np.array(ys))
    if abs(sc.r - float(head["r"])) > 1e-12 * sc.r:
        raise ConfigError("stored r does not match r(n)")
    for s, hs in zip(sc.sites, stored):
        for h, (nv, off) in zip(s.H_j, hs):
            if np.abs(h.normal - nv).max() > 1e-9 or abs(h.offset - off) > 1e-9:
                raise ConfigError("stored half-space differs from the rebuilt one")
    return sc


__all__ = [
    "DEFAULT_C1", "DEFAULT_C2", "radius_r", "pack_sphere", "packing_witness", "build_site",
    "build_scaffold", "Scaffold", "SiteFrame", "check_cone_containment", "event_indicator",
    "estimate_event_probability", "EventAuditReport", "lemma7_regions", "Lemma7Regions",
    "local_variance_estimate", "LocalVarianceEstimate", "paired_monotonicity", "g_inclusion_report",
    "g_projection_volumes", "admissible_subspaces", "dump_scaffold", "load_scaffold",
    "site_invariant_report", "in_positive_hull", "multinomial_log_probability",
]
