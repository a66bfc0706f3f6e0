"""Independent reference values used by the tests.

Nothing here imports gplab: each oracle is computed from first principles
with numpy/scipy so that it can check the library rather than echo it.
"""
import math

import numpy as np
from scipy import integrate, optimize, special, stats


def expected_max_normal(n: int) -> float:
    """E[max of n standard normals] by quadrature of x n phi(x) Phi(x)^(n-1)."""
    def f(x):
        return x * n * math.exp(stats.norm.logpdf(x) + (n - 1) * stats.norm.logcdf(x))
    # the integrand is concentrated near sqrt(2 log n)
    mode = math.sqrt(2 * math.log(n))
    lo, hi = -10.0, mode + 12.0
    val, _ = integrate.quad(f, lo, hi, points=[0.0, mode], limit=400, epsabs=1e-13, epsrel=1e-12)
    return val


def expected_range_normal(n: int) -> float:
    return 2.0 * expected_max_normal(n)


def in_hull_lp(others: np.ndarray, x: np.ndarray) -> bool:
    """Is x a convex combination of the rows of ``others``? (LP feasibility)"""
    k = others.shape[0]
    A_eq = np.vstack([others.T, np.ones((1, k))])
    b_eq = np.concatenate([x, [1.0]])
    res = optimize.linprog(np.zeros(k), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * k, method="highs")
    return res.status == 0


def brute_force_vertices(points: np.ndarray) -> set:
    """Indices of points that are not convex combinations of the others."""
    out = set()
    for i in range(len(points)):
        if not in_hull_lp(np.delete(points, i, axis=0), points[i]):
            out.add(i)
    return out


def two_cap_fraction(a: float, d: int) -> float:
    """Normalised measure of lines within angle a of a fixed axis in R^d."""
    t = np.linspace(0.0, a, 20001)
    num = integrate.trapezoid(np.sin(t) ** (d - 2), t)
    den = special.beta((d - 1) / 2, 0.5) / 2
    return float(num / den)


def radius(n: float) -> float:
    return math.sqrt(2 * math.log(n) - math.log(math.log(n)))


def random_rotation(d: int, rng) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def unit_cube(d: int = 3) -> np.ndarray:
    return np.array(np.meshgrid(*[[0.0, 1.0]] * d, indexing="ij")).reshape(d, -1).T
