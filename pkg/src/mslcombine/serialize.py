"""Fit files and CSV tables.

A fit file is JSON holding the estimate, the configuration and the data it
was computed from. For ``msl`` fits the Monte Carlo cloud is rebuilt from
the stored seed, so a loaded fit reproduces the original ROC bit for bit.
JSON floats use Python's shortest round-trip representation, which reads
back to the identical double.
"""

from __future__ import annotations

import json
from dataclasses import asdict

import numpy as np

from .estimator import FitConfig, FitResult, fit_cloud
from .exceptions import DataError
from .isotonic import theta_beta
from .methods import MethodEstimate
from .roc import DEFAULT_GRID, empirical_score_cdf, fit_roc, roc_curve

__all__ = ["FORMAT", "fit_to_dict", "save_fit", "load_fit", "format_float", "write_csv", "dumps"]

FORMAT = "mslcombine-fit/1"


def format_float(x) -> str:
    return f"{float(x):.17g}"


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_csv(path, header, rows) -> None:
    """Write rows of numbers (17 significant digits) or strings."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else format_float(v) for v in row) + "\n")


def _config_dict(config: FitConfig) -> dict:
    out = asdict(config)
    if isinstance(out["stream"], tuple):
        out["stream"] = list(out["stream"])
    if out["bandwidths"] is not None:
        out["bandwidths"] = [np.asarray(h, dtype=float).tolist() for h in out["bandwidths"]]
    return out


def fit_to_dict(est: MethodEstimate, X, Y, config: FitConfig, feature_names=None) -> dict:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    out = {
        "format": FORMAT,
        "method": est.method,
        "beta_unit": est.beta_unit.tolist(),
        "auc": est.auc,
        "config": _config_dict(config),
        "feature_names": list(feature_names) if feature_names else [f"x{j + 1}" for j in range(X.shape[1])],
        "data": {"X": X.tolist(), "Y": Y.tolist()},
    }
    if est.method == "msl":
        res: FitResult = est.detail
        out.update({
            "beta_hat": res.beta_hat.tolist(),
            "profile_loglik": res.profile_ll,
            "lambda": res.lam,
            "bandwidth_f": res.fmodel.bandwidth.tolist(),
            "bandwidth_g": res.gmodel.bandwidth.tolist(),
            "theta": {"knots": res.theta_hat.knots.tolist(), "values": res.theta_hat.values.tolist()},
            "diagnostics": {k: v for k, v in res.diagnostics.items() if k != "run_objectives"},
        })
    else:
        base = est.detail
        if getattr(base, "intercept", None) is not None:
            out["intercept"] = base.intercept
    return out


def save_fit(path, est: MethodEstimate, X, Y, config: FitConfig, feature_names=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(fit_to_dict(est, X, Y, config, feature_names)))


def load_fit(path, grid_size: int = DEFAULT_GRID):
    """Rebuild ``(MethodEstimate, X, Y, config)`` from a fit file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read fit file {path}: {exc}") from None
    if doc.get("format") != FORMAT:
        raise DataError(f"{path} is not a fit file (format {doc.get('format')!r})")
    X = np.array(doc["data"]["X"], dtype=float)
    Y = np.array(doc["data"]["Y"], dtype=float)
    config = FitConfig.from_dict(doc["config"])
    method = doc["method"]
    beta_unit = np.array(doc["beta_unit"], dtype=float)
    if method == "msl":
        fmodel, gmodel, cloud = fit_cloud(X, Y, config)
        beta_hat = np.array(doc["beta_hat"], dtype=float)
        theta = theta_beta(cloud, beta_hat)
        res = FitResult(beta_hat, beta_unit, theta, float(doc["profile_loglik"]), cloud.lam,
                        fmodel, gmodel, cloud, config, dict(doc.get("diagnostics", {})))
        est = MethodEstimate(method, beta_unit, fit_roc(res, grid_size), res)
    else:
        curve = roc_curve(empirical_score_cdf(X @ beta_unit, Y @ beta_unit), grid_size)
        est = MethodEstimate(method, beta_unit, curve, None)
    return est, X, Y, config
