"""Compare the compiled and pure-Python planar hull kernels.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--csv PATH]

Both backends run the same inputs; results are checked for agreement before
the timings are reported.  Rows go to stdout as CSV.
"""
import argparse
import csv
import sys
import timeit

import numpy as np

from gplab import _pykernels

try:
    from gplab import _ckernels
except ImportError:
    _ckernels = None

CASES = [
    # (kernel, points per set, number of sets)
    ("hull2d", 1_000, 1),
    ("hull2d", 100_000, 1),
    ("batch_hull2d_area", 50, 2_000),
    ("batch_hull2d_area", 400, 500),
]


def _inputs(kernel, m, sets, seed=7):
    rng = np.random.default_rng(seed)
    if kernel == "hull2d":
        return (rng.standard_normal((m, 2)),)
    return (np.ascontiguousarray(rng.standard_normal((sets, m, 2))),)


def _same(a, b):
    a, b = np.asarray(a), np.asarray(b)
    if a.dtype.kind == "f":
        return np.allclose(a, b, rtol=1e-12, atol=1e-12)
    return np.array_equal(a, b)


def bench(repeat):
    rows = []
    for kernel, m, sets in CASES:
        args = _inputs(kernel, m, sets)
        py = getattr(_pykernels, kernel)
        t_py = min(timeit.repeat(lambda: py(*args), number=1, repeat=repeat))
        row = {"kernel": kernel, "points": m, "sets": sets, "python_s": t_py,
               "cython_s": float("nan"), "speedup": float("nan"), "agree": ""}
        if _ckernels is not None:
            cy = getattr(_ckernels, kernel)
            t_cy = min(timeit.repeat(lambda: cy(*args), number=1, repeat=repeat))
            row.update(cython_s=t_cy, speedup=t_py / t_cy, agree=str(_same(py(*args), cy(*args))).lower())
        rows.append(row)
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--csv", default="-")
    ns = ap.parse_args(argv)
    rows = bench(ns.repeat)
    fh = sys.stdout if ns.csv == "-" else open(ns.csv, "w", newline="")
    w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in r.items()})
    if fh is not sys.stdout:
        fh.close()
    if _ckernels is None:
        sys.stderr.write("compiled extension not built; python timings only\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
