"""Haar-random linear subspaces, projections, angles and circular cones."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidAngle, InvalidDimension, ZeroVector
from .geometry import PointCloud, as_points
from .sampling import MeasureEstimate, as_stream


def _readonly(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Subspace:
    """An element of G(d, ell) given by an orthonormal basis (rows)."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=np.float64)
        if b.ndim != 2 or not 1 <= b.shape[0] <= b.shape[1]:
            raise InvalidDimension(f"basis shape {b.shape}")
        if not np.allclose(b @ b.T, np.eye(b.shape[0]), atol=1e-10, rtol=0):
            raise ValueError("basis is not orthonormal")
        object.__setattr__(self, "basis", _readonly(b))

    @property
    def dim_ambient(self) -> int:
        return self.basis.shape[1]

    @property
    def dim_sub(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def span(cls, *vectors) -> "Subspace":
        q, _ = np.linalg.qr(np.asarray(vectors, dtype=np.float64).T)
        return cls(_sign_fix(q.T[None])[0])

    def project(self, x) -> np.ndarray:
        """Coordinates of the orthogonal projection in this basis."""
        return np.asarray(x, dtype=np.float64) @ self.basis.T


@dataclass(frozen=True)
class CircularCone:
    """C(axis, half_angle) translated to ``apex``."""

    apex: np.ndarray
    axis: np.ndarray
    half_angle: float

    def __post_init__(self):
        a = np.array(self.axis, dtype=np.float64)
        if abs(np.linalg.norm(a) - 1.0) > 1e-12:
            raise ValueError("cone axis must be a unit vector")
        if not 0.0 <= self.half_angle <= math.pi / 2:
            raise InvalidAngle(f"half angle {self.half_angle} outside [0, pi/2]")
        object.__setattr__(self, "axis", _readonly(a))
        object.__setattr__(self, "apex", _readonly(np.array(self.apex, dtype=np.float64)))

    def contains_direction(self, v, tol: float = 1e-12):
        """Whether vectors lie in the cone of directions (apex at origin)."""
        v = np.asarray(v, dtype=np.float64)
        nv = np.linalg.norm(v, axis=-1)
        cos = np.einsum("...i,i->...", v, self.axis)
        return (nv <= tol) | (cos >= nv * math.cos(self.half_angle) - tol)

    def contains(self, x, tol: float = 1e-12):
        """Affine membership: x in apex + cone."""
        return self.contains_direction(np.asarray(x, dtype=np.float64) - self.apex, tol)


def _sign_fix(bases: np.ndarray) -> np.ndarray:
    # first nonzero component of every basis vector made positive
    first = np.argmax(np.abs(bases) > 1e-300, axis=-1)
    lead = np.take_along_axis(bases, first[..., None], axis=-1)
    return bases * np.where(lead < 0, -1.0, 1.0)


def sample_subspaces(d: int, ell: int, count: int, stream) -> np.ndarray:
    """``count`` Haar subspaces of G(d, ell) as bases of shape (count, ell, d)."""
    if not 1 <= ell <= d:
        raise InvalidDimension(f"need 1 <= ell <= d, got ell={ell}, d={d}")
    rng = as_stream(stream).rng
    g = rng.standard_normal((count, d, ell))
    q, _ = np.linalg.qr(g)
    return _sign_fix(np.transpose(q, (0, 2, 1)))


def sample_subspace(d: int, ell: int, stream) -> Subspace:
    return Subspace(sample_subspaces(d, ell, 1, stream)[0])


def _as_bases(L) -> np.ndarray:
    if isinstance(L, Subspace):
        return L.basis
    return np.asarray(L, dtype=np.float64)


def project_cloud(cloud, L) -> PointCloud:
    P = as_points(cloud)
    B = _as_bases(L)
    if P.shape[1] != B.shape[-1]:
        raise DimensionMismatch(f"cloud in R^{P.shape[1]}, subspace in R^{B.shape[-1]}")
    return PointCloud(B.shape[0], P @ B.T)


def angle_to_subspace(z, L) -> float | np.ndarray:
    """Minimal angle between z and the vectors of L, in [0, pi/2].

    ``L`` may be a Subspace or a stack of bases (count, ell, d); the latter
    returns one angle per subspace.
    """
    z = np.asarray(z, dtype=np.float64)
    nz = np.linalg.norm(z)
    if nz == 0:
        raise ZeroVector("angle with the zero vector")
    B = _as_bases(L)
    if B.shape[-1] != z.shape[0]:
        raise DimensionMismatch("ambient dimensions differ")
    c = np.linalg.norm(B @ z, axis=-1) / nz
    ang = np.arccos(np.clip(c, 0.0, 1.0))
    return float(ang) if np.ndim(ang) == 0 else ang


def subspace_meets_cone(L, cone: CircularCone):
    """Whether L contains a nonzero direction of the cone (apex ignored)."""
    return angle_to_subspace(cone.axis, L) <= cone.half_angle + 1e-12


def cap_measure_estimate(z, a: float, d: int, ell: int, samples: int, stream) -> MeasureEstimate:
    """Monte Carlo nu_ell({L : angle(z, L) <= a}) with binomial standard error."""
    if not 0 < a < math.pi / 2:
        raise InvalidAngle(f"a={a} outside (0, pi/2)")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    z = np.asarray(z, dtype=np.float64)
    hits = 0
    left = samples
    while left:
        m = min(left, 1 << 16)
        hits += int(np.count_nonzero(angle_to_subspace(z, sample_subspaces(d, ell, m, stream)) <= a))
        left -= m
    p = hits / samples
    return MeasureEstimate(p, math.sqrt(p * (1 - p) / samples), samples)


def cap_fractions(angles: np.ndarray, thresholds) -> np.ndarray:
    """Fractions of a fixed angle sample at or below each threshold."""
    s = np.sort(np.asarray(angles))
    return np.searchsorted(s, np.asarray(thresholds), side="right") / len(s)
