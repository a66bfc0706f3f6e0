"""Experiment configuration, replication scheduling and the per-claim
experiments.  Every experiment returns a list of ResultRow."""
from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import construction as cons
from .errors import ConfigError, ConstructionFailure, DegenerateInput
from .grassmann import cap_measure_estimate, sample_subspaces
from .intrinsic import default_method, intrinsic_volumes, kappa, local_functional_batch
from .sampling import RandomStream, gaussian_cloud, gaussian_restricted, poisson_gaussian_cloud
from .stats import (
    SummaryStats,
    bootstrap_ci,
    normality_diagnostic,
    scaling_fit,
    tail_frequency,
)

HEADER = ("experiment", "n", "d", "ell", "statistic", "value", "std_error", "extra")
STREAM_STRIDE = 1 << 32
# reserved slots at the top of each grid block; replications use 0..MAX_REPS-1
MAX_REPS = 1 << 24
SCAFFOLD_SLOT = STREAM_STRIDE - 2
AUX_SLOT = STREAM_STRIDE - 3
SUBSPACE_SLOT = STREAM_STRIDE - 32         # minus ell
PACKING_SLOT = STREAM_STRIDE - (1 << 20)   # minus packing run
SITE_SLOT = STREAM_STRIDE - (1 << 21)      # minus site index
EVENT_SLOT = STREAM_STRIDE - (1 << 22) - MAX_REPS  # plus replication
MODELS = ("binomial", "poisson")


@dataclass
class ExperimentConfig:
    dim: int = 2
    ell: int = 2
    n_grid: tuple = (100, 1000, 10000)
    reps: int = 100
    model: str = "binomial"
    subspaces: int = 2000
    c1: float = cons.DEFAULT_C1
    c2: float = cons.DEFAULT_C2
    seed: int = 1
    out: str = "-"
    samples: int = 100_000
    a_list: tuple = (0.05, 0.1, 0.2)
    z: tuple = ()
    pairs: int = 100
    packings: int = 1
    y_list: tuple = (0.0, 1.0, 2.0, 3.0)
    local_reps: int = 1000
    event_reps: int = 4

    def validate(self, minimum_reps: int = 1) -> "ExperimentConfig":
        if self.dim < 1:
            raise ConfigError("dim must be >= 1")
        if not 1 <= self.ell <= self.dim:
            raise ConfigError(f"ell must be in 1..{self.dim} (V_0 is identically 1)")
        if not self.n_grid:
            raise ConfigError("n_grid is empty")
        if any(n < self.dim + 1 for n in self.n_grid):
            raise ConfigError(f"every n must be >= d+1 = {self.dim + 1}")
        if not max(1, minimum_reps) <= self.reps < MAX_REPS:
            raise ConfigError(f"reps must be >= {max(1, minimum_reps)} for this experiment")
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}")
        if self.subspaces < 1 or self.samples < 1 or self.pairs < 1 or self.packings < 1:
            raise ConfigError("subspaces, samples, pairs and packings must be positive")
        if not 0 < self.c2 < 1 or self.c1 <= 0:
            raise ConfigError("need c1 > 0 and 0 < c2 < 1")
        if self.z and len(self.z) != self.dim:
            raise ConfigError("z must have dim coordinates")
        return self

    def items(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(_num(x) for x in v)
            yield f.name, v


def _num(x) -> str:
    return str(int(x)) if isinstance(x, (int, np.integer)) else repr(float(x))


_TUPLE_INT = {"n_grid"}
_TUPLE_FLOAT = {"a_list", "z", "y_list"}


def parse_value(key: str, raw: str):
    """Convert a config string to the field's type."""
    names = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    if key not in names:
        raise ConfigError(f"unknown config key {key!r}")
    raw = raw.strip()
    try:
        if key in _TUPLE_INT:
            return tuple(int(float(t)) for t in raw.split(",") if t.strip())
        if key in _TUPLE_FLOAT:
            return tuple(float(t) for t in raw.split(",") if t.strip())
        default = names[key].default
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def read_config_file(path: str) -> dict:
    out = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            k, v = line.split("=", 1)
            k = k.strip().replace("-", "_")
            out[k] = parse_value(k, v)
    return out


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    n: int | None
    d: int
    ell: int | None
    statistic: str
    value: float
    std_error: float = math.nan
    extra: str = ""

    def cells(self) -> list:
        extra = self.extra.replace(",", ";").replace("\n", " ")
        return [self.experiment, "" if self.n is None else str(self.n), str(self.d),
                "" if self.ell is None else str(self.ell), self.statistic,
                _fmt(self.value), _fmt(self.std_error), extra]


def _fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return "%.17g" % x


def _kv(**kw) -> str:
    return ";".join(f"{k}={_fmt(v) if isinstance(v, float) else v}" for k, v in kw.items())


def write_csv(rows, fh) -> None:
    fh.write(",".join(HEADER) + "\n")
    for r in rows:
        fh.write(",".join(r.cells()) + "\n")


# ---------------------------------------------------------------- replication

def stream_for(seed: int, g: int, r: int) -> RandomStream:
    return RandomStream(seed, g * STREAM_STRIDE + r)


def _threads() -> int:
    try:
        t = int(os.environ.get("GPLAB_THREADS", "1"))
    except ValueError:
        t = 1
    return max(1, min(t, os.cpu_count() or 1))


def _draw(model: str, n: int, d: int, stream):
    if model == "poisson":
        return poisson_gaussian_cloud(float(n), d, stream)
    return gaussian_cloud(n, d, stream)


def _rep_block(args):
    seed, g, n, d, ells, model, bases, r0, r1 = args
    vals = np.full((r1 - r0, len(ells)), np.nan)
    errs = np.zeros((r1 - r0, len(ells)))
    for t, r in enumerate(range(r0, r1)):
        cloud = _draw(model, n, d, stream_for(seed, g, r))
        try:
            est = intrinsic_volumes(cloud, ells, subspaces=bases)
        except DegenerateInput:
            continue
        for k, ell in enumerate(ells):
            vals[t, k] = est[ell].value
            errs[t, k] = est[ell].std_error
    return r0, vals, errs


def shared_subspaces(seed: int, g: int, d: int, ells, count: int) -> dict:
    """One Grassmannian sample per Monte Carlo ell at grid index g."""
    out = {}
    for ell in ells:
        if default_method(d, ell) == "kubota-mc":
            out[ell] = sample_subspaces(d, ell, count, RandomStream(seed, g * STREAM_STRIDE + SUBSPACE_SLOT - ell))
    return out


def simulate(cfg: ExperimentConfig, g: int, n: int, ells, reps: int | None = None):
    """Per-replication V_ell values and their MC standard errors at one grid
    point.  Returns (values, errors) of shape (reps, len(ells)); NaN marks a
    degenerate (lower-dimensional) Poisson sample."""
    reps = cfg.reps if reps is None else reps
    ells = tuple(ells)
    bases = shared_subspaces(cfg.seed, g, cfg.dim, ells, cfg.subspaces)
    threads = _threads()
    chunk = max(1, -(-reps // (4 * threads)))
    tasks = [(cfg.seed, g, n, cfg.dim, ells, cfg.model, bases, r0, min(reps, r0 + chunk))
             for r0 in range(0, reps, chunk)]
    vals = np.empty((reps, len(ells)))
    errs = np.empty((reps, len(ells)))
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_rep_block, tasks))
    else:
        results = [_rep_block(t) for t in tasks]
    for r0, v, e in results:
        vals[r0:r0 + len(v)] = v
        errs[r0:r0 + len(e)] = e
    return vals, errs


def _clean(v: np.ndarray) -> tuple:
    ok = ~np.isnan(v)
    return v[ok], int((~ok).sum())


# ---------------------------------------------------------------- experiments

def run_moments(cfg: ExperimentConfig, tag: str = "moments", ells=None) -> list:
    ells = (cfg.ell,) if ells is None else tuple(ells)
    rows = []
    for g, n in enumerate(cfg.n_grid):
        vals, errs = simulate(cfg, g, n, ells)
        for k, ell in enumerate(ells):
            v, bad = _clean(vals[:, k])
            s = SummaryStats.of(v)
            method = default_method(cfg.dim, ell)
            extra = _kv(method=method, model=cfg.model, reps=s.count, degenerate=bad)
            rows.append(ResultRow(tag, n, cfg.dim, ell, "mean", s.mean, s.std_error, extra))
            if s.count < 2:
                rows.append(ResultRow(tag, n, cfg.dim, ell, "variance", math.nan, math.nan,
                                      extra + ";flag=single-replication"))
            else:
                rows.append(ResultRow(tag, n, cfg.dim, ell, "variance", s.variance, s.variance_std_error(), extra))
            if method == "kubota-mc":
                noise = float(np.mean(errs[:, k][~np.isnan(vals[:, k])] ** 2))
                rows.append(ResultRow(tag, n, cfg.dim, ell, "mc_noise_variance", noise, math.nan, extra))
    return rows


def expectation_rows(cfg: ExperimentConfig, means: dict, ell: int, tag: str) -> list:
    d = cfg.dim
    rows = []
    limit = math.comb(d, ell) * kappa(d) / kappa(d - ell)
    for n, (m, se) in means.items():
        L = math.log(n)
        rows.append(ResultRow(tag, n, d, ell, "mean_over_logn", m * L ** (-ell / 2), se * L ** (-ell / 2),
                              _kv(limit=limit)))
        rows.append(ResultRow(tag, n, d, ell, "mean_over_2logn", m * (2 * L) ** (-ell / 2),
                              se * (2 * L) ** (-ell / 2), _kv(limit=limit)))
    fit = scaling_fit([(n, m) for n, (m, _) in means.items()])
    rows.append(_fit_row(tag, d, ell, fit, ell / 2))
    return rows


def _fit_row(tag, d, ell, fit, target) -> ResultRow:
    lo, hi = fit.slope_ci
    return ResultRow(tag, None, d, ell, "slope", fit.slope, (hi - lo) / (2 * 1.96),
                     _kv(ci_low=lo, ci_high=hi, r2=fit.r_squared, intercept=fit.intercept,
                         target=float(target), points=fit.n_points))


def run_expectation_scaling(cfg: ExperimentConfig) -> list:
    if max(cfg.n_grid) < 1000 * min(cfg.n_grid) or len(set(cfg.n_grid)) < 3:
        raise ConfigError("expectation-scaling needs >= 3 grid points spanning >= 3 decades")
    rows = run_moments(cfg, "expectation-scaling")
    means = {r.n: (r.value, r.std_error) for r in rows if r.statistic == "mean"}
    return rows + expectation_rows(cfg, means, cfg.ell, "expectation-scaling")


def variance_rows(cfg: ExperimentConfig, samples: dict, ell: int, tag: str) -> list:
    """Variance per n with bootstrap CI, the normalised variance, the fit and
    the positivity report.  ``samples`` maps n to the V_ell sample."""
    d = cfg.dim
    expo = (d + 3) / 2 - ell
    rows = []
    pts = []
    norm = []
    for g, (n, v) in enumerate(samples.items()):
        s = SummaryStats.of(v)
        lo, hi = bootstrap_ci(v, seed=cfg.seed + g)
        f = math.log(n) ** expo
        rows.append(ResultRow(tag, n, d, ell, "variance", s.variance, s.variance_std_error(),
                              _kv(ci_low=lo, ci_high=hi, reps=s.count)))
        rows.append(ResultRow(tag, n, d, ell, "normalized_variance", s.variance * f, s.variance_std_error() * f,
                              _kv(ci_low=lo * f, ci_high=hi * f, exponent=expo)))
        pts.append((n, s.variance))
        norm.append((n, s.variance * f, lo * f, hi * f))
    fit = scaling_fit(pts)
    rows.append(_fit_row(tag, d, ell, fit, -expo))
    worst = min(norm, key=lambda t: t[1])
    rows.append(ResultRow(tag, worst[0], d, ell, "positivity_min", worst[1], math.nan,
                          _kv(ci_low=worst[2], ci_high=worst[3], excludes_zero=str(worst[2] > 0).lower())))
    return rows


def run_variance_scaling(cfg: ExperimentConfig) -> list:
    samples = {}
    for g, n in enumerate(cfg.n_grid):
        vals, _ = simulate(cfg, g, n, (cfg.ell,))
        samples[n] = _clean(vals[:, 0])[0]
    return variance_rows(cfg, samples, cfg.ell, "variance-scaling")


def _packing_counts(cfg, g, n) -> list:
    r = cons.radius_r(n)
    return [len(cons.pack_sphere(cfg.dim, r, cfg.c1, stream_for(cfg.seed, g, PACKING_SLOT - k)))
            for k in range(cfg.packings)]


def run_construction_audit(cfg: ExperimentConfig) -> tuple:
    """Lemma 1-5 audit rows and the number of grid points that failed."""
    d = cfg.dim
    tag = "construction-audit"
    rows = []
    failures = 0
    for g, n in enumerate(cfg.n_grid):
        L = math.log(n)
        try:
            sc = cons.build_scaffold(n, d, cfg.c1, cfg.c2, stream_for(cfg.seed, g, SCAFFOLD_SLOT))
            ms = _packing_counts(cfg, g, n) if cfg.packings > 1 else [sc.m]
            m_med = float(np.median(ms))
            rows.append(ResultRow(tag, n, d, None, "m", m_med, math.nan,
                                  _kv(runs="|".join(str(x) for x in ms), r=sc.r)))
            rows.append(ResultRow(tag, n, d, None, "m_normalized", m_med / L ** ((d - 1) / 2), math.nan,
                                  _kv(exponent=(d - 1) / 2)))
            vol = sc.sites[0].delta.volume
            rows.append(ResultRow(tag, n, d, None, "delta_volume", vol, 0.0, ""))
            rows.append(ResultRow(tag, n, d, None, "delta_volume_sqrt_logn", vol * math.sqrt(L), 0.0, ""))
            rep = cons.estimate_event_probability(n, d, cfg.c1, cfg.c2, cfg.event_reps,
                                                  stream_for(cfg.seed, g, AUX_SLOT),
                                                  samples=min(cfg.samples, 50_000), scaffold=sc)
            rows.append(ResultRow(tag, n, d, None, "gamma_delta_n", rep.gamma_delta_n, rep.gamma_delta_n_se,
                                  "method=importance"))
            rows.append(ResultRow(tag, n, d, None, "p_event", rep.p_hat, rep.p_se,
                                  _kv(ci_low=rep.p_ci[0], ci_high=rep.p_ci[1], method=rep.method, m=rep.m)))
            bad = cons.check_cone_containment(sc)
            rows.append(ResultRow(tag, n, d, None, "cone_violations", float(len(bad)), 0.0,
                                  _kv(pairs="|".join(f"{i}-{k}" for i, k in bad) or "none")))
        except ConstructionFailure as exc:
            failures += 1
            rows.append(ResultRow(tag, n, d, None, "construction_failure", math.nan, math.nan, f"error={exc}"))
    return rows, failures


def cap_exact(a: float, d: int, ell: int) -> float:
    """nu_ell(angle(z, L) <= a) for ell = 1: two antipodal caps of angular
    radius a, I_{sin^2 a}((d-1)/2, 1/2)."""
    if ell != 1:
        raise ValueError("closed form only for ell = 1")
    return float(special.betainc((d - 1) / 2, 0.5, math.sin(a) ** 2))


def run_angle_measure(cfg: ExperimentConfig) -> list:
    d, ell = cfg.dim, cfg.ell
    z = np.array(cfg.z, dtype=np.float64) if cfg.z else np.eye(d)[0]
    z = z / np.linalg.norm(z)
    rows = []
    for k, a in enumerate(cfg.a_list):
        est = cap_measure_estimate(z, a, d, ell, cfg.samples, stream_for(cfg.seed, k, 0))
        ratio = est.value / a ** (d - ell)
        extra = _kv(a=float(a))
        if ell == 1 and d > 1:
            extra += ";" + _kv(exact=cap_exact(a, d, ell))
        rows.append(ResultRow("angle-measure", None, d, ell, "cap_estimate", est.value, est.std_error, extra))
        rows.append(ResultRow("angle-measure", None, d, ell, "ratio", ratio, est.std_error / a ** (d - ell), extra))
    return rows


def run_local_variance(cfg: ExperimentConfig) -> tuple:
    d, ell = cfg.dim, cfg.ell
    tag = "local-variance"
    rows = []
    failures = 0
    for g, n in enumerate(cfg.n_grid):
        try:
            sc = cons.build_scaffold(n, d, cfg.c1, cfg.c2, stream_for(cfg.seed, g, SCAFFOLD_SLOT))
            site = sc.sites[0]
            lv = cons.local_variance_estimate(site, ell, cfg.reps, cfg.subspaces, stream_for(cfg.seed, g, 0))
            f = math.log(n) ** (d - ell + 1)
            se = lv.variance * math.sqrt(2 / (cfg.reps - 1))
            rows.append(ResultRow(tag, n, d, ell, "local_variance", lv.variance, se,
                                  _kv(ci_low=lv.ci[0], ci_high=lv.ci[1])))
            rows.append(ResultRow(tag, n, d, ell, "normalized_local_variance", lv.variance * f, se * f,
                                  _kv(ci_low=lv.ci[0] * f, ci_high=lv.ci[1] * f, exponent=float(d - ell + 1))))
            pm = cons.paired_monotonicity(site, ell, cfg.pairs, cfg.subspaces, stream_for(cfg.seed, g, 1))
            rows.append(ResultRow(tag, n, d, ell, "monotone_fraction", pm["monotone_fraction"], math.nan,
                                  _kv(pairs=cfg.pairs, nested_fraction=pm["nested_fraction"],
                                      min_gap=pm["min_gap"])))
        except ConstructionFailure as exc:
            failures += 1
            rows.append(ResultRow(tag, n, d, ell, "construction_failure", math.nan, math.nan, f"error={exc}"))
    return rows, failures


def _direct_local_term(cloud: np.ndarray, site, ell: int, cfg, stream) -> float:
    """V_i of the local functional with F from the sampled points of an A_i
    realisation (0 when A_i fails)."""
    if not cons.event_indicator(cloud, site):
        return 0.0
    pts = [cloud[site.delta_j[j].contains(cloud)][0] for j in range(site.dim + 1)]
    B = sample_subspaces(site.dim, ell, cfg.subspaces, stream)
    Z = gaussian_restricted(site.delta_j[0], stream, count=max(2, cfg.local_reps))
    vals = local_functional_batch(Z, np.array(pts[1:]), site.C2, ell, B)
    return float(vals.var(ddof=1))


def run_lower_bound_audit(cfg: ExperimentConfig) -> tuple:
    d, ell = cfg.dim, cfg.ell
    tag = "lower-bound-audit"
    rows = []
    failures = 0
    expo = (d + 3) / 2 - ell
    for g, n in enumerate(cfg.n_grid):
        try:
            sc = cons.build_scaffold(n, d, cfg.c1, cfg.c2, stream_for(cfg.seed, g, SCAFFOLD_SLOT))
        except ConstructionFailure as exc:
            failures += 1
            rows.append(ResultRow(tag, n, d, ell, "construction_failure", math.nan, math.nan, f"error={exc}"))
            continue
        bases = shared_subspaces(cfg.seed, g, d, (ell,), cfg.subspaces)
        floor2 = min(cons._union_floor(s) for s in sc.sites) ** 2
        vals = np.empty(cfg.reps)
        direct = np.zeros(cfg.reps)
        events = 0
        for r in range(cfg.reps):
            cloud = _draw(cfg.model, n, d, stream_for(cfg.seed, g, r)).points
            vals[r] = intrinsic_volumes(cloud, (ell,), subspaces=bases)[ell].value
            far = cloud[np.einsum("ij,ij->i", cloud, cloud) >= floor2 - 1e-9]
            for i, s in enumerate(sc.sites):
                t = _direct_local_term(far, s, ell, cfg, stream_for(cfg.seed, g, EVENT_SLOT + r))
                direct[r] += t
                events += t > 0
        s = SummaryStats.of(vals)
        lhs, lhs_se = s.variance, s.variance_std_error()
        rd = SummaryStats.of(direct)
        rows.append(ResultRow(tag, n, d, ell, "lhs_variance", lhs, lhs_se, _kv(reps=cfg.reps)))
        rows.append(ResultRow(tag, n, d, ell, "rhs_direct", rd.mean, rd.std_error, _kv(events=events)))
        # semi-analytic right-hand side: sum_i P(A_i) * V_i with canonical F
        rep = cons.estimate_event_probability(n, d, cfg.c1, cfg.c2, cfg.event_reps,
                                              stream_for(cfg.seed, g, AUX_SLOT), scaffold=sc,
                                              samples=min(cfg.samples, 50_000))
        lvs = [cons.local_variance_estimate(site, ell, cfg.local_reps, cfg.subspaces,
                                            stream_for(cfg.seed, g, SITE_SLOT - i))
               for i, site in enumerate(sc.sites)]
        v_sum = sum(lv.variance for lv in lvs)
        v_se = math.sqrt(sum((lv.variance * math.sqrt(2 / (lv.reps - 1))) ** 2 for lv in lvs))
        rhs = rep.p_hat * v_sum
        rhs_se = rhs * math.sqrt((rep.p_se / rep.p_hat) ** 2 + (v_se / v_sum) ** 2) if rhs > 0 else 0.0
        rows.append(ResultRow(tag, n, d, ell, "rhs_semi_analytic", rhs, rhs_se,
                              _kv(p_event=rep.p_hat, local_variance_sum=v_sum, m=sc.m)))
        if rhs > 0:
            ratio = lhs / rhs
            ratio_se = ratio * math.sqrt((lhs_se / lhs) ** 2 + (rhs_se / rhs) ** 2)
        else:
            ratio, ratio_se = math.inf, math.nan
        rows.append(ResultRow(tag, n, d, ell, "ratio", ratio, ratio_se, "lhs/rhs_semi_analytic"))
        rows.append(ResultRow(tag, n, d, ell, "rhs_normalized", rhs * math.log(n) ** expo,
                              rhs_se * math.log(n) ** expo, _kv(exponent=expo)))
    return rows, failures


def run_clt_diagnostic(cfg: ExperimentConfig) -> list:
    rows = []
    for g, n in enumerate(cfg.n_grid):
        vals, _ = simulate(cfg, g, n, (cfg.ell,))
        v = _clean(vals[:, 0])[0]
        ks = normality_diagnostic(v)
        rows.append(ResultRow("clt-diagnostic", n, cfg.dim, cfg.ell, "ks_distance", ks, 0.87 / math.sqrt(len(v)),
                              _kv(reps=len(v))))
    return rows


def concentration_bound(y: float, n: int, d: int, ell: int, c: float = 1.0) -> float:
    """2 exp(-1/4 min{y^2 / 2^(2d+l+5), c (log n)^((d-1)/(4(2d+l+5))) y^(1/(2d+l+5))})."""
    k = 2 * d + ell + 5
    inner = min(y * y / 2.0 ** k, c * math.log(n) ** ((d - 1) / (4 * k)) * y ** (1.0 / k))
    return 2.0 * math.exp(-inner / 4.0)


def run_concentration_report(cfg: ExperimentConfig) -> list:
    rows = []
    for g, n in enumerate(cfg.n_grid):
        vals, _ = simulate(cfg, g, n, (cfg.ell,))
        v = _clean(vals[:, 0])[0]
        for y in cfg.y_list:
            t = tail_frequency(v, y)
            rows.append(ResultRow("concentration-report", n, cfg.dim, cfg.ell, f"tail_y{_fmt(y)}", t.value,
                                  t.std_error, _kv(y=float(y), bound_shape_c1=concentration_bound(y, n, cfg.dim, cfg.ell))))
    return rows


EXPERIMENTS = {
    "moments": (run_moments, 1),
    "expectation-scaling": (run_expectation_scaling, 1),
    "variance-scaling": (run_variance_scaling, 500),
    "construction-audit": (run_construction_audit, 1),
    "angle-measure": (run_angle_measure, 1),
    "local-variance": (run_local_variance, 1000),
    "lower-bound-audit": (run_lower_bound_audit, 1000),
    "clt-diagnostic": (run_clt_diagnostic, 2000),
    "concentration-report": (run_concentration_report, 2000),
}
