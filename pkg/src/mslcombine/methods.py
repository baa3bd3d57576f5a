"""Uniform front end over the three combination methods."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baselines import fit_exp_tilting, fit_mh_auc
from .estimator import FitConfig, FitResult, fit
from .roc import DEFAULT_GRID, RocCurve, empirical_score_cdf, fit_roc, roc_curve

__all__ = ["METHODS", "MethodEstimate", "estimate"]

METHODS = ("msl", "exp_tilting", "mh")


@dataclass(frozen=True, eq=False)
class MethodEstimate:
    """A unit direction and the ROC curve it induces.

    For ``msl`` the curve comes from the fitted densities; the baselines
    use the empirical ROC of their combined scores on the observed data.
    """

    method: str
    beta_unit: np.ndarray
    roc: RocCurve
    detail: object

    @property
    def auc(self) -> float:
        return self.roc.auc


def estimate(method: str, X, Y, config: FitConfig | None = None,
             grid_size: int = DEFAULT_GRID) -> MethodEstimate:
    config = FitConfig() if config is None else config
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if method == "msl":
        result: FitResult = fit(X, Y, config)
        return MethodEstimate("msl", result.beta_unit, fit_roc(result, grid_size), result)
    if method == "exp_tilting":
        base = fit_exp_tilting(X, Y)
    elif method == "mh":
        base = fit_mh_auc(X, Y, seed=config.seed, stream=config.stream)
    else:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    curve = roc_curve(empirical_score_cdf(X @ base.beta_unit, Y @ base.beta_unit), grid_size)
    return MethodEstimate(method, base.beta_unit, curve, base)
