"""Mergeable moments, bootstrap intervals, log-log-n scaling fits and
distributional diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .errors import DegenerateSample, InvalidN, NonPositiveValue, TooFewSamples
from .sampling import MeasureEstimate

N_BOOT = 1000
BOOT_SEED = 20240917


@dataclass(frozen=True)
class SummaryStats:
    """Count, mean, M2 (sum of squared deviations), min and max."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    min: float = math.inf
    max: float = -math.inf

    @property
    def variance(self) -> float:
        """Unbiased sample variance; NaN below two observations."""
        if self.count < 2:
            return math.nan
        return max(self.m2, 0.0) / (self.count - 1)

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    @property
    def std_error(self) -> float:
        """Standard error of the mean."""
        return self.std / math.sqrt(self.count) if self.count >= 2 else math.nan

    def variance_std_error(self) -> float:
        """Normal-theory standard error of the variance, sqrt(2/(k-1)) * s^2."""
        if self.count < 2:
            return math.nan
        return self.variance * math.sqrt(2.0 / (self.count - 1))

    @classmethod
    def of(cls, values) -> "SummaryStats":
        x = np.asarray(values, dtype=np.float64).ravel()
        if x.size == 0:
            return cls()
        mu = float(x.mean())
        return cls(int(x.size), mu, float(((x - mu) ** 2).sum()), float(x.min()), float(x.max()))


def accumulate(s: SummaryStats, x: float) -> SummaryStats:
    """Welford update with one observation."""
    x = float(x)
    k = s.count + 1
    delta = x - s.mean
    mean = s.mean + delta / k
    m2 = s.m2 + delta * (x - mean)
    return SummaryStats(k, mean, m2, min(s.min, x), max(s.max, x))


def merge(a: SummaryStats, b: SummaryStats) -> SummaryStats:
    """Chan et al. pairwise combination."""
    if a.count == 0:
        return b
    if b.count == 0:
        return a
    k = a.count + b.count
    delta = b.mean - a.mean
    # weighted form keeps merge symmetric in a and b
    mean = (a.count * a.mean + b.count * b.mean) / k
    m2 = a.m2 + b.m2 + delta * delta * a.count * b.count / k
    return SummaryStats(k, mean, m2, min(a.min, b.min), max(a.max, b.max))


def merge_all(parts) -> SummaryStats:
    out = SummaryStats()
    for p in parts:
        out = merge(out, p)
    return out


def bootstrap_ci(sample, statistic=None, n_boot: int = N_BOOT, seed: int = BOOT_SEED,
                 level: float = 0.95) -> tuple:
    """Percentile bootstrap interval.

    ``statistic`` maps an array of shape (B, N) to B values along axis 1; the
    default is the unbiased variance.
    """
    x = np.asarray(sample, dtype=np.float64).ravel()
    if x.size < 2:
        raise TooFewSamples("bootstrap needs at least 2 observations")
    if statistic is None:
        def statistic(a):
            return a.var(axis=1, ddof=1)
    rng = np.random.default_rng(seed)
    vals = np.empty(n_boot)
    step = max(1, (1 << 22) // x.size)
    for b0 in range(0, n_boot, step):
        b1 = min(n_boot, b0 + step)
        idx = rng.integers(0, x.size, size=(b1 - b0, x.size))
        vals[b0:b1] = statistic(x[idx])
    a = (1 - level) / 2
    lo, hi = np.quantile(vals, [a, 1 - a])
    return float(lo), float(hi)


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r_squared: float
    slope_ci: tuple
    n_points: int

    def __post_init__(self):
        if not (0.0 <= self.r_squared <= 1.0 or math.isnan(self.r_squared)):
            raise ValueError("r_squared outside [0, 1]")


def _ols(x: np.ndarray, y: np.ndarray):
    xm, ym = x.mean(), y.mean()
    sxx = ((x - xm) ** 2).sum()
    slope = ((x - xm) * (y - ym)).sum() / sxx
    return slope, ym - slope * xm


def scaling_fit(pairs, n_boot: int = N_BOOT, seed: int = BOOT_SEED) -> ScalingFit:
    """Least squares of log y on log log n, with a pair-resampling bootstrap CI
    for the slope (percentile interval, widened by sqrt(k/(k-2)))."""
    pairs = list(pairs)
    if len(pairs) < 3:
        raise TooFewSamples("scaling fit needs at least 3 (n, y) pairs")
    n = np.array([p[0] for p in pairs], dtype=np.float64)
    y = np.array([p[1] for p in pairs], dtype=np.float64)
    if np.any(n < 3):
        raise InvalidN("all n must be >= 3")
    if not np.all(y > 0):
        raise NonPositiveValue("scaling fit needs positive y")
    x = np.log(np.log(n))
    ly = np.log(y)
    if np.ptp(x) == 0:
        raise InvalidN("need at least two distinct n")
    slope, icpt = _ols(x, ly)
    resid = ly - (slope * x + icpt)
    sst = ((ly - ly.mean()) ** 2).sum()
    r2 = 1.0 if sst == 0 else float(min(1.0, max(0.0, 1 - (resid ** 2).sum() / sst)))

    rng = np.random.default_rng(seed)
    k = len(x)
    boots = []
    while len(boots) < n_boot:
        idx = rng.integers(0, k, size=k)
        if np.ptp(x[idx]) == 0:
            continue
        boots.append(_ols(x[idx], ly[idx])[0])
    lo, hi = np.quantile(boots, [0.025, 0.975])
    # pair resampling shrinks the spread by about (k-2)/k with few points;
    # widen about the estimate as in the HC1 correction
    f = math.sqrt(k / (k - 2)) if k > 2 else 1.0
    lo, hi = slope - f * (slope - lo), slope + f * (hi - slope)
    return ScalingFit(float(slope), float(icpt), r2, (float(lo), float(hi)), k)


def _standardise(sample) -> np.ndarray:
    x = np.asarray(sample, dtype=np.float64).ravel()
    sd = x.std(ddof=1) if x.size > 1 else 0.0
    if not sd > 0:
        raise DegenerateSample("sample has zero spread")
    return (x - x.mean()) / sd


def normality_diagnostic(sample) -> float:
    """KS distance between the standardised sample and the standard normal."""
    if np.size(sample) < 30:
        raise TooFewSamples("normality diagnostic needs at least 30 values")
    z = _standardise(sample)
    return float(sps.kstest(z, "norm").statistic)


def tail_frequency(sample, y: float) -> MeasureEstimate:
    """Fraction of the sample with |x - mean| >= y * stdev."""
    if np.size(sample) < 2:
        raise TooFewSamples("tail frequency needs at least 2 values")
    z = _standardise(sample)
    k = z.size
    p = float(np.count_nonzero(np.abs(z) >= y)) / k
    return MeasureEstimate(p, math.sqrt(p * (1 - p) / k), k)
