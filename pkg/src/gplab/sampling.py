"""Seeded random sources, Gaussian and Poisson-Gaussian clouds, and Gaussian
measures of regions (plain and importance-sampled)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import RejectionBudgetExceeded
from .geometry import HalfSpace, PointCloud, Simplex

REJECTION_BUDGET = 10**6


class RandomStream:
    """Deterministic random source identified by (master_seed, stream_id).

    Streams with different ids are independent (they are distinct spawn keys
    of one ``SeedSequence``).  Each stream owns its generator state, so a
    stream must not be shared between workers.
    """

    __slots__ = ("master_seed", "stream_id", "rng")

    def __init__(self, master_seed: int, stream_id: int = 0):
        self.master_seed = int(master_seed)
        self.stream_id = int(stream_id)
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id,))
        self.rng = np.random.Generator(np.random.PCG64(seq))

    def __repr__(self):
        return f"RandomStream(master_seed={self.master_seed}, stream_id={self.stream_id})"

    def __getstate__(self):
        return (self.master_seed, self.stream_id, self.rng.bit_generator.state)

    def __setstate__(self, state):
        seed, sid, bg = state
        self.__init__(seed, sid)
        self.rng.bit_generator.state = bg

    def child(self, stream_id: int) -> "RandomStream":
        """Fresh stream with the same master seed and another id."""
        return RandomStream(self.master_seed, stream_id)


def as_stream(stream) -> RandomStream:
    if isinstance(stream, RandomStream):
        return stream
    if stream is None:
        raise ValueError("a RandomStream (or integer seed) is required")
    return RandomStream(int(stream), 0)


def gaussian_density(x) -> float | np.ndarray:
    """Standard Gaussian density in R^d; rows of ``x`` are points."""
    x = np.asarray(x, dtype=np.float64)
    d = x.shape[-1]
    sq = np.einsum("...i,...i->...", x, x)
    return (2.0 * math.pi) ** (-d / 2.0) * np.exp(-0.5 * sq)


def gaussian_cloud(n: int, d: int, stream) -> PointCloud:
    if n < 0:
        raise ValueError("n must be nonnegative")
    rng = as_stream(stream).rng
    return PointCloud(d, rng.standard_normal((n, d)))


def poisson_gaussian_cloud(intensity: float, d: int, stream) -> PointCloud:
    """Points of a Poisson process with intensity measure ``intensity * gamma_d``."""
    if not intensity > 0:
        raise ValueError("intensity must be positive")
    rng = as_stream(stream).rng
    count = int(rng.poisson(intensity))
    return PointCloud(d, rng.standard_normal((count, d)))


@dataclass(frozen=True)
class MeasureEstimate:
    value: float
    std_error: float
    n_samples: int

    def ci(self, z: float = 1.96) -> tuple:
        return self.value - z * self.std_error, self.value + z * self.std_error


def estimate_gaussian_measure(region: Callable, samples: int, stream, d: int | None = None,
                              batch: int = 1 << 20) -> MeasureEstimate:
    """Fraction of ``samples`` standard Gaussian points for which ``region``
    (a vectorised predicate on an (m, d) array) is true."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if d is None:
        d = getattr(region, "dim", None)
        if d is None:
            raise ValueError("dimension required")
    rng = as_stream(stream).rng
    hits = 0
    left = samples
    while left:
        m = min(batch, left)
        hits += int(np.count_nonzero(region(rng.standard_normal((m, d)))))
        left -= m
    p = hits / samples
    return MeasureEstimate(p, math.sqrt(p * (1 - p) / samples), samples)


def complementary_measures(region: Callable, samples: int, stream, d: int):
    """Measures of a region and of its complement on one shared sample."""
    rng = as_stream(stream).rng
    x = rng.standard_normal((samples, d))
    inside = np.asarray(region(x), dtype=bool)
    p = np.count_nonzero(inside) / samples
    q = np.count_nonzero(~inside) / samples
    se = math.sqrt(p * (1 - p) / samples)
    return MeasureEstimate(p, se, samples), MeasureEstimate(q, se, samples)


def simplex_gaussian_measure(simplex: Simplex, samples: int, stream) -> MeasureEstimate:
    """Importance-sampled gamma_d(simplex): uniform points inside, mean density
    times volume."""
    rng = as_stream(stream).rng
    x = simplex.uniform(samples, rng)
    f = gaussian_density(x) * simplex.volume
    se = float(f.std(ddof=1)) / math.sqrt(samples) if samples > 1 else 0.0
    return MeasureEstimate(float(f.mean()), se, samples)


def _halfspace_tail(h: HalfSpace):
    # {<x,n> <= b} = {<x,a> >= t} with a = -n, t = -b
    return -h.normal, -h.offset


def halfspace_measure(h: HalfSpace) -> float:
    return float(special.ndtr(h.offset))


def truncated_gaussian_halfspace(h: HalfSpace, count: int, rng: np.random.Generator) -> np.ndarray:
    """Exact samples from gamma_d conditioned on a half-space."""
    a, t = _halfspace_tail(h)
    # inverse CDF on the upper tail, accurate far out: s = -ndtri(u * Phi(-t))
    u = rng.random(count)
    s = -special.ndtri(u * special.ndtr(-t))
    g = rng.standard_normal((count, len(a)))
    g -= np.outer(g @ a, a)
    return g + np.outer(s, a)


def halfspace_union_measure(halfspaces: Sequence[HalfSpace], samples: int, stream) -> MeasureEstimate:
    """Gaussian measure of a union of half-spaces by mixture importance sampling.

    gamma(U H_k) = sum_k gamma(H_k) E[1 / N(X) | X ~ gamma restricted to H_k],
    where N(X) counts the half-spaces containing X.
    """
    rng = as_stream(stream).rng
    total = 0.0
    var = 0.0
    for h in halfspaces:
        mass = halfspace_measure(h)
        x = truncated_gaussian_halfspace(h, samples, rng)
        cover = np.zeros(samples)
        for g in halfspaces:
            cover += g.contains(x, tol=0.0)
        # points sampled from h lie in h; guard against rounding at the boundary
        w = 1.0 / np.maximum(cover, 1.0)
        total += mass * w.mean()
        if samples > 1:
            var += mass**2 * w.var(ddof=1) / samples
    return MeasureEstimate(float(total), math.sqrt(var), samples * len(halfspaces))


def _density_bound(simplex: Simplex) -> float:
    """Upper bound of the Gaussian density on a simplex."""
    v = simplex.vertices
    c = v.mean(axis=0)
    nc = np.linalg.norm(c)
    if nc == 0:
        return gaussian_density(np.zeros(simplex.dim))
    # ||x|| >= <x, c/|c|> >= min over vertices, by linearity
    lo = max(0.0, float((v @ (c / nc)).min()))
    return float((2 * math.pi) ** (-simplex.dim / 2) * math.exp(-0.5 * lo * lo))


def gaussian_restricted(region: Simplex, stream, count: int | None = None,
                        budget: int = REJECTION_BUDGET) -> np.ndarray:
    """Samples of gamma_d conditioned on a simplex (uniform proposal, density-
    ratio acceptance).  Returns one vector, or an array of ``count`` rows."""
    rng = as_stream(stream).rng
    want = 1 if count is None else int(count)
    bound = _density_bound(region)
    out = []
    got = 0
    used = 0
    while got < want:
        m = max(64, 2 * (want - got))
        m = min(m, budget - used)
        if m <= 0:
            raise RejectionBudgetExceeded(f"more than {budget} proposals")
        x = region.uniform(m, rng)
        u = rng.random(m)
        acc = x[u * bound <= gaussian_density(x)]
        used += m
        if len(acc):
            acc = acc[: want - got]
            out.append(acc)
            got += len(acc)
    res = np.concatenate(out)
    return res[0] if count is None else res
