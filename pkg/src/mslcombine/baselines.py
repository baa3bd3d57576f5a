"""Comparison estimators: exponential tilting and smoothed-AUC maximisation.

Exponential tilting, ``f/g = exp(alpha + beta'x)``, is equivalent to a
logistic regression of the group indicator on the pooled sample, fitted here
by Newton-Raphson. The AUC method maximises a sigmoid-smoothed
Mann-Whitney statistic over unit vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special, stats

from .exceptions import OptimizerFailure, RankDeficient, Separation
from .sampling import make_rng

__all__ = ["BaselineResult", "fit_exp_tilting", "fit_mh_auc", "smoothed_auc", "empirical_auc"]


@dataclass(frozen=True, eq=False)
class BaselineResult:
    method: str
    beta_unit: np.ndarray
    intercept: float | None = None
    diagnostics: dict = field(default_factory=dict)


def _pooled(X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    X = X[:, None] if X.ndim == 1 else X
    Y = Y[:, None] if Y.ndim == 1 else Y
    if X.ndim != 2 or Y.ndim != 2 or X.shape[1] != Y.shape[1]:
        raise ValueError("X and Y must have the same number of columns")
    return X, Y


def _unit(v):
    return v / np.linalg.norm(v)


def fit_exp_tilting(X, Y, tol: float = 1e-10, max_iter: int = 100, max_norm: float = 1e3) -> BaselineResult:
    """Logistic-regression fit of the exponential tilting model.

    Returns the slope direction normalised to unit length; the raw slope,
    its covariance and a Wald test of ``slope = 0`` are in ``diagnostics``.
    A non-significant Wald test (p > 0.05) sets ``unstable_direction``,
    because a near-zero slope has an arbitrary direction.
    """
    X, Y = _pooled(X, Y)
    A = np.column_stack([np.ones(X.shape[0] + Y.shape[0]), np.vstack([X, Y])])
    y = np.concatenate([np.ones(X.shape[0]), np.zeros(Y.shape[0])])
    p = A.shape[1]
    if np.linalg.matrix_rank(A) < p:
        raise RankDeficient("pooled design matrix is rank deficient")

    coef = np.zeros(p)
    coef[0] = np.log(X.shape[0] / Y.shape[0])
    converged = False
    for it in range(1, max_iter + 1):
        prob = special.expit(A @ coef)
        wt = prob * (1.0 - prob)
        info = A.T @ (A * wt[:, None])
        try:
            step = np.linalg.solve(info, A.T @ (y - prob))
        except np.linalg.LinAlgError:
            raise Separation("information matrix became singular (fitted probabilities reached 0 or 1)") from None
        coef = coef + step
        if not np.all(np.isfinite(coef)) or np.linalg.norm(coef) > max_norm:
            raise Separation(f"Newton iterations diverged (|coef| > {max_norm:g})")
        if np.max(np.abs(step)) < tol:
            converged = True
            break

    if not converged:
        # the likelihood keeps increasing along a ray: (quasi-)separated groups
        raise Separation(f"Newton iterations did not converge in {max_iter} steps (|coef| = "
                         f"{np.linalg.norm(coef):.3g})")
    prob = special.expit(A @ coef)
    info = A.T @ (A * (prob * (1.0 - prob))[:, None])
    cov = np.linalg.inv(info)
    slope = coef[1:]
    wald = float(slope @ np.linalg.solve(cov[1:, 1:], slope))
    wald_p = float(stats.chi2.sf(wald, df=slope.size))
    diagnostics = {
        "iterations": it,
        "converged": converged,
        "slope": slope.copy(),
        "covariance": cov,
        "wald_statistic": wald,
        "wald_pvalue": wald_p,
        "unstable_direction": wald_p > 0.05,
    }
    return BaselineResult("exp_tilting", _unit(slope), float(coef[0]), diagnostics)


def _angles_to_unit(phi):
    """Hyperspherical coordinates (d-1 angles) to a unit vector in R^d."""
    d = phi.size + 1
    out = np.empty(d)
    sin_prod = 1.0
    for j in range(d - 1):
        out[j] = sin_prod * np.cos(phi[j])
        sin_prod *= np.sin(phi[j])
    out[-1] = sin_prod
    return out


def _unit_to_angles(v):
    v = _unit(np.asarray(v, dtype=float))
    d = v.size
    phi = np.empty(d - 1)
    for j in range(d - 1):
        tail = np.linalg.norm(v[j + 1:])
        phi[j] = np.arctan2(tail, v[j])
    if v[-1] < 0:
        phi[-1] = -phi[-1]
    return phi


def smoothed_auc(beta, X, Y, h_s: float) -> float:
    """``mean_ij sigmoid((beta'X_i - beta'Y_j) / h_s)``."""
    sx = X @ beta
    sy = Y @ beta
    return float(special.expit((sx[:, None] - sy[None, :]) / h_s).mean())


def empirical_auc(sx, sy) -> float:
    """Mann-Whitney statistic with ties counted as one half."""
    sx = np.asarray(sx, dtype=float)
    sy = np.sort(np.asarray(sy, dtype=float))
    below = np.searchsorted(sy, sx, side="left")
    at_or_below = np.searchsorted(sy, sx, side="right")
    return float((below + 0.5 * (at_or_below - below)).sum() / (sx.size * sy.size))


def fit_mh_auc(X, Y, smoothing: float | None = None, n_starts: int = 5, seed: int = 0,
               stream: int | tuple = 0, max_iter: int | None = None) -> BaselineResult:
    """Maximise the sigmoid-smoothed AUC over unit vectors.

    ``smoothing`` defaults to ``(n+m)**-0.5`` times the SD of the pooled
    exponential-tilting scores. One start sits at the exponential-tilting
    direction, the rest are random perturbations of it. The result is
    oriented to have a nonnegative inner product with that direction.
    """
    X, Y = _pooled(X, Y)
    n, d = X.shape
    m = Y.shape[0]
    if n < 2 or m < 2:
        raise ValueError("need at least two observations per group")

    if d == 1:
        auc_pos = empirical_auc(X[:, 0], Y[:, 0])
        sign = 1.0 if auc_pos >= 0.5 else -1.0
        return BaselineResult("mh", np.array([sign]), None, {"empirical_auc": max(auc_pos, 1 - auc_pos)})

    try:
        start_dir = fit_exp_tilting(X, Y).beta_unit
    except (Separation, RankDeficient):
        start_dir = _unit(X.mean(axis=0) - Y.mean(axis=0))
    if smoothing is None:
        pooled_scores = np.concatenate([X @ start_dir, Y @ start_dir])
        smoothing = pooled_scores.std(ddof=1) / np.sqrt(n + m)
    h_s = float(smoothing)

    def negobj(phi):
        return -smoothed_auc(_angles_to_unit(phi), X, Y, h_s)

    rng = make_rng(seed, stream)
    phi0 = _unit_to_angles(start_dir)
    starts = [phi0] + [phi0 + rng.normal(scale=0.3, size=d - 1) for _ in range(max(n_starts, 1) - 1)]
    max_iter = 200 * (d - 1) if max_iter is None else max_iter
    best, best_val, runs = None, np.inf, []
    for x0 in starts:
        simplex = np.vstack([x0] + [x0 + 0.1 * np.eye(d - 1)[j] for j in range(d - 1)])
        res = optimize.minimize(negobj, x0, method="Nelder-Mead",
                                options={"initial_simplex": simplex, "xatol": 1e-6, "fatol": 1e-9,
                                         "maxiter": max_iter})
        runs.append((float(-res.fun), int(res.nit), bool(res.success)))
        if np.isfinite(res.fun) and res.fun < best_val:
            best, best_val = res.x, res.fun
    if best is None:
        raise OptimizerFailure("smoothed AUC was non-finite at every start")
    beta = _angles_to_unit(best)
    if beta @ start_dir < 0:
        beta = -beta
    diagnostics = {
        "smoothing": h_s,
        "objective": float(-best_val),
        "start_objective": float(-negobj(phi0)),
        "runs": runs,
    }
    return BaselineResult("mh", beta, None, diagnostics)
