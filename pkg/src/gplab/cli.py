"""Command-line runner: one subcommand per experiment, CSV on stdout or --out.

Exit codes: 0 success, 2 configuration error, 3 when every grid point of a
construction-based run failed with ConstructionFailure.
"""
from __future__ import annotations

import argparse
import dataclasses
import io
import sys

from . import experiments as ex
from .errors import ConfigError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONSTRUCTION = 3

# flag name -> config key
_FLAGS = {
    "dim": "dim", "ell": "ell", "n-grid": "n_grid", "reps": "reps", "model": "model",
    "subspaces": "subspaces", "c1": "c1", "c2": "c2", "seed": "seed", "out": "out",
    "samples": "samples", "a-list": "a_list", "z": "z", "pairs": "pairs", "packings": "packings",
    "y-list": "y_list", "local-reps": "local_reps", "event-reps": "event_reps",
}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    for flag in _FLAGS:
        kw = {"choices": ex.MODELS} if flag == "model" else {}
        common.add_argument(f"--{flag}", dest=_FLAGS[flag], default=None, **kw)
    common.add_argument("--config", default=None, help="key=value file; flags override it")
    common.add_argument("--print-config", action="store_true", help="print the effective config and exit")
    p = argparse.ArgumentParser(prog="gplab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ex.EXPERIMENTS:
        sub.add_parser(name, parents=[common])
    return p


def build_config(ns: argparse.Namespace) -> ex.ExperimentConfig:
    values = {}
    if ns.config:
        values.update(ex.read_config_file(ns.config))
    for key in _FLAGS.values():
        raw = getattr(ns, key)
        if raw is not None:
            values[key] = ex.parse_value(key, raw)
    return ex.ExperimentConfig(**values)


def print_config(cfg: ex.ExperimentConfig, fh) -> None:
    for k, v in cfg.items():
        fh.write(f"{k}={v}\n")


def run(command: str, cfg: ex.ExperimentConfig) -> tuple:
    """(rows, exit code) for one experiment."""
    fn, min_reps = ex.EXPERIMENTS[command]
    cfg.validate(min_reps)
    res = fn(cfg)
    if isinstance(res, tuple):
        rows, failures = res
        code = EXIT_CONSTRUCTION if failures and failures == len(cfg.n_grid) else EXIT_OK
        return rows, code
    return res, EXIT_OK


def main(argv=None) -> int:
    ns = _parser().parse_args(argv)
    try:
        cfg = build_config(ns)
        if ns.print_config:
            print_config(cfg, sys.stdout)
            return EXIT_OK
        rows, code = run(ns.command, cfg)
    except ConfigError as exc:
        sys.stderr.write(f"gplab: config error: {exc}\n")
        return EXIT_CONFIG
    buf = io.StringIO(newline="")
    ex.write_csv(rows, buf)
    data = buf.getvalue()
    if cfg.out in ("-", ""):
        sys.stdout.write(data)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
    return code


def config_fields() -> list:
    return [f.name for f in dataclasses.fields(ex.ExperimentConfig)]


if __name__ == "__main__":
    sys.exit(main())
