"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Errors are also written to standard error as one JSON object per line.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bootstrap import bootstrap_se
from .data import Dataset, ingest_pancreatic_csv, load_labeled_csv, write_labeled_csv
from .estimator import FitConfig
from .exceptions import DataError, NumericalError
from .methods import METHODS, estimate
from .roc import DEFAULT_GRID
from .sampling import make_rng
from .serialize import dumps, load_fit, save_fit, write_csv
from .simulation import ScenarioSpec, generate, run_benchmark

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common(p, method_default="msl"):
    p.add_argument("--seed", type=int, default=None, help="random seed (overrides the config file)")
    p.add_argument("--config", type=Path, help="JSON file with FitConfig keys")
    p.add_argument("--method", default=method_default,
                   help=f"one of {', '.join(METHODS)} (bench: comma-separated list)")
    p.add_argument("--out", type=Path, required=True, help="output file")


def _data_args(p):
    p.add_argument("--data", type=Path, help="labelled CSV file")
    p.add_argument("--format", choices=("labeled", "pancreatic"), default="labeled",
                   help="'pancreatic' applies the urinary-biomarker ingestion rules")
    p.add_argument("--label-col", default=None, help="label column (default 'label'; 'diagnosis' for pancreatic)")
    p.add_argument("--features", default=None, help="comma-separated feature columns")
    p.add_argument("--group-mapping", default=None,
                   help='JSON object mapping label codes to 1/0, e.g. \'{"3": 1, "1": 0, "2": 0}\'')
    p.add_argument("--example", choices=("ex1", "ex2"), help="simulate data instead of reading --data")
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--m", type=int, default=300)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mslcombine", description="Biomarker combination under a monotone density ratio model.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("fit", help="fit a combination and write a fit file plus the theta table")
    _common(p)
    _data_args(p)
    p.add_argument("--n-monte-carlo", type=int, default=None)

    p = sub.add_parser("roc", help="ROC curve (s, roc) CSV and AUC from a fit file")
    _common(p)
    p.add_argument("--fit", type=Path, required=True, help="fit file written by 'fit'")
    p.add_argument("--grid-size", type=int, default=DEFAULT_GRID)

    p = sub.add_parser("simulate", help="write a simulated labelled dataset")
    _common(p)
    p.add_argument("--example", choices=("ex1", "ex2"), default="ex1")
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--m", type=int, default=300)

    p = sub.add_parser("bootstrap", help="stratified bootstrap standard errors")
    _common(p)
    _data_args(p)
    p.add_argument("--B", type=int, default=300)
    p.add_argument("--n-monte-carlo", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("bench", help="replicated simulation benchmark (Bias/SD/MSE table)")
    _common(p)
    p.add_argument("--example", choices=("ex1", "ex2"), default="ex1")
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--m", type=int, default=300)
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--n-monte-carlo", type=int, default=None)
    p.add_argument("--oracle-size", type=int, default=1_000_000)
    p.add_argument("--workers", type=int, default=None)
    return parser


def _config(args) -> FitConfig:
    mapping = {}
    if args.config is not None:
        try:
            mapping = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(mapping, dict):
            raise DataError("config file must hold a JSON object")
    try:
        config = FitConfig.from_dict(mapping)
    except TypeError as exc:
        raise DataError(f"bad config: {exc}") from None
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if getattr(args, "n_monte_carlo", None) is not None:
        changes["n_monte_carlo"] = args.n_monte_carlo
    return config.replace(**changes) if changes else config


def _method(name):
    if name not in METHODS:
        raise UsageError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
    return name


def _dataset(args, config) -> Dataset:
    if args.data is None and args.example is None:
        raise UsageError("one of --data or --example is required")
    if args.data is not None:
        mapping = None
        if args.group_mapping:
            try:
                mapping = json.loads(args.group_mapping)
            except json.JSONDecodeError as exc:
                raise UsageError(f"--group-mapping is not valid JSON: {exc}") from None
        if args.format == "pancreatic":
            return ingest_pancreatic_csv(args.data, mapping, label_col=args.label_col or "diagnosis")
        feats = args.features.split(",") if args.features else None
        return load_labeled_csv(args.data, args.label_col or "label", feats, mapping)
    X, Y = generate(args.example, args.rho, args.n, args.m, make_rng(config.seed, (2,)))
    names = [f"x{j + 1}" for j in range(X.shape[1])]
    return Dataset(np.vstack([X, Y]), np.r_[np.ones(len(X), int), np.zeros(len(Y), int)], names,
                   provenance=f"{args.example} rho={args.rho}")


def _sidecar(out: Path, suffix: str) -> Path:
    return out.with_name(out.stem + suffix)


def _cmd_fit(args):
    config = _config(args)
    method = _method(args.method)
    ds = _dataset(args, config)
    est = estimate(method, ds.X, ds.Y, config)
    save_fit(args.out, est, ds.X, ds.Y, config, ds.feature_names)
    summary = {"method": method, "beta_unit": est.beta_unit.tolist(), "auc": est.auc,
               "n": ds.n, "m": ds.m, "dropped_missing": ds.dropped_missing, "fit_file": str(args.out)}
    if method == "msl":
        table = _sidecar(args.out, "_theta.csv")
        write_csv(table, ["knot", "value"], est.detail.theta_hat.to_table())
        summary["theta_file"] = str(table)
    return summary


def _cmd_roc(args):
    est, _, _, _ = load_fit(args.fit, args.grid_size)
    write_csv(args.out, ["s", "roc"], est.roc.to_table())
    auc_file = _sidecar(args.out, "_auc.json")
    auc_file.write_text(dumps({"method": est.method, "auc": est.auc}), encoding="utf-8")
    return {"method": est.method, "auc": est.auc, "roc_file": str(args.out), "auc_file": str(auc_file)}


def _cmd_simulate(args):
    config = _config(args)
    X, Y = generate(args.example, args.rho, args.n, args.m, make_rng(config.seed, (2,)))
    write_labeled_csv(args.out, X, Y)
    return {"example": args.example, "rho": args.rho, "n": args.n, "m": args.m, "data_file": str(args.out)}


def _cmd_bootstrap(args):
    config = _config(args)
    method = _method(args.method)
    ds = _dataset(args, config)
    rep = bootstrap_se(ds, config, B=args.B, method=method, workers=args.workers)
    args.out.write_text(rep.to_json() + "\n", encoding="utf-8")
    table = _sidecar(args.out, "_replicates.csv")
    table.write_text(rep.to_csv(), encoding="utf-8")
    return {**rep.summary(), "report_file": str(args.out), "replicates_file": str(table)}


def _cmd_bench(args):
    config = _config(args)
    methods = tuple(_method(m.strip()) for m in args.method.split(","))
    try:
        spec = ScenarioSpec(args.example, args.rho, args.n, args.m, args.replicates, config.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = run_benchmark(spec, methods, config, workers=args.workers, oracle_size=args.oracle_size)
    args.out.write_text(rep.to_csv(), encoding="utf-8")
    roc_file = _sidecar(args.out, "_roc.csv")
    roc_file.write_text(rep.roc_csv(), encoding="utf-8")
    summary_file = _sidecar(args.out, "_summary.json")
    summary_file.write_text(rep.to_json() + "\n", encoding="utf-8")
    return {"valid": rep.valid, "table_file": str(args.out), "roc_file": str(roc_file),
            "summary_file": str(summary_file)}


_COMMANDS = {"fit": _cmd_fit, "roc": _cmd_roc, "simulate": _cmd_simulate,
             "bootstrap": _cmd_bootstrap, "bench": _cmd_bench}


def _report(kind, exc, code):
    print(json.dumps({"error": kind, "type": exc.__class__.__name__, "message": str(exc), "exit_code": code}),
          file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        summary = _COMMANDS[args.command](args)
    except UsageError as exc:
        return _report("usage", exc, EXIT_USAGE)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (DataError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        return _report("data", exc, EXIT_DATA)
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        return _report("numerical", exc, EXIT_NUMERICAL)
    except ValueError as exc:
        return _report("usage", exc, EXIT_USAGE)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
