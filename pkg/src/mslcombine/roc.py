"""Combined-score CDFs, ROC curves and AUC.

The fitted densities are only known through the Monte Carlo cloud, so
``F_C`` and ``G_C`` are weighted CDFs of the cloud scores ``beta' Z_i`` with
masses proportional to ``w_i theta_i`` and ``w_i (1 - theta_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .exceptions import ZeroMass

__all__ = [
    "ScoreCdf",
    "RocCurve",
    "weighted_score_cdf",
    "score_cdfs",
    "empirical_score_cdf",
    "roc_curve",
    "auc",
    "mann_whitney",
    "fit_roc",
    "roc_l2_distance",
]

DEFAULT_GRID = 1001
MASS_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class ScoreCdf:
    """Two right-continuous CDFs on a shared set of sorted distinct thresholds."""

    thresholds: np.ndarray
    Fc: np.ndarray
    Gc: np.ndarray

    @property
    def f_mass(self) -> np.ndarray:
        return np.diff(self.Fc, prepend=0.0)

    @property
    def g_mass(self) -> np.ndarray:
        return np.diff(self.Gc, prepend=0.0)

    def F(self, u):
        return self._eval(self.Fc, u)

    def G(self, u):
        return self._eval(self.Gc, u)

    def _eval(self, cdf, u):
        idx = np.searchsorted(self.thresholds, np.asarray(u, dtype=float), side="right") - 1
        out = np.where(idx >= 0, cdf[np.clip(idx, 0, None)], 0.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class RocCurve:
    s: np.ndarray
    roc: np.ndarray
    auc: float

    def to_table(self) -> np.ndarray:
        return np.column_stack([self.s, self.roc])


def weighted_score_cdf(scores, f_mass, g_mass) -> ScoreCdf:
    """Build the two CDFs from per-point scores and unnormalised masses.

    Tied scores are merged; both masses are renormalised so the CDFs end at
    exactly one.
    """
    scores = np.asarray(scores, dtype=float).ravel()
    f_mass = np.asarray(f_mass, dtype=float).ravel()
    g_mass = np.asarray(g_mass, dtype=float).ravel()
    total_f, total_g = f_mass.sum(), g_mass.sum()
    if total_f < MASS_FLOOR or total_g < MASS_FLOOR:
        raise ZeroMass(f"total mass too small (f: {total_f:.3g}, g: {total_g:.3g})")
    order = np.argsort(scores, kind="stable")
    s = scores[order]
    first = np.flatnonzero(np.concatenate([[True], s[1:] != s[:-1]]))
    pf = np.add.reduceat(f_mass[order], first) / total_f
    pg = np.add.reduceat(g_mass[order], first) / total_g
    Fc = np.cumsum(pf)
    Gc = np.cumsum(pg)
    Fc[-1] = Gc[-1] = 1.0
    return ScoreCdf(s[first], np.minimum(Fc, 1.0), np.minimum(Gc, 1.0))


def score_cdfs(fit) -> ScoreCdf:
    """``F_C`` and ``G_C`` of the fitted combined score, evaluated on the fit's cloud."""
    cloud = fit.cloud
    u = cloud.Z @ fit.beta_hat
    theta = np.asarray(fit.theta_hat(u))
    f_mass = cloud.w * theta / (cloud.N * cloud.lam)
    g_mass = cloud.w * (1.0 - theta) / (cloud.N * (1.0 - cloud.lam))
    return weighted_score_cdf(u, f_mass, g_mass)


def empirical_score_cdf(sx, sy) -> ScoreCdf:
    """Empirical CDFs of diseased scores ``sx`` and healthy scores ``sy``."""
    sx = np.asarray(sx, dtype=float).ravel()
    sy = np.asarray(sy, dtype=float).ravel()
    scores = np.concatenate([sx, sy])
    f_mass = np.concatenate([np.ones(sx.size), np.zeros(sy.size)])
    return weighted_score_cdf(scores, f_mass, 1.0 - f_mass)


def _vertices(cdfs: ScoreCdf):
    # Sweeping the threshold from +inf down gives (1 - G, 1 - F) vertices in
    # increasing false-positive order.
    Gx = np.concatenate([[0.0], cdfs.Gc])
    Fx = np.concatenate([[0.0], cdfs.Fc])
    return (1.0 - Gx)[::-1], (1.0 - Fx)[::-1]


def roc_curve(cdfs: ScoreCdf, grid_size: int = DEFAULT_GRID) -> RocCurve:
    """ROC on an equispaced grid of false-positive rates.

    Each threshold group's mass is spread uniformly along its segment, so
    the curve is the polygon through the ``(1 - G(u), 1 - F(u))`` vertices;
    at a vertical segment the upper value is taken. ``roc(0) = 0`` and
    ``roc(1) = 1`` are imposed.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    s = np.linspace(0.0, 1.0, int(grid_size))
    x, y = _vertices(cdfs)
    k = np.searchsorted(x, s, side="right") - 1
    k = np.clip(k, 0, x.size - 1)
    nxt = np.minimum(k + 1, x.size - 1)
    dx = x[nxt] - x[k]
    frac = np.divide(s - x[k], dx, out=np.zeros_like(s), where=dx > 0)
    roc = np.clip(y[k] + frac * (y[nxt] - y[k]), 0.0, 1.0)
    roc[0] = 0.0
    roc[-1] = 1.0
    return RocCurve(s, roc, auc_from_grid(s, roc))


def auc_from_grid(s, roc) -> float:
    return float(integrate.trapezoid(roc, s))


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under ``curve``."""
    return auc_from_grid(curve.s, curve.roc)


def mann_whitney(cdfs: ScoreCdf) -> float:
    """Weighted Mann-Whitney statistic ``P(U > V) + P(U = V) / 2``."""
    pf = cdfs.f_mass
    pg = cdfs.g_mass
    g_below = np.concatenate([[0.0], cdfs.Gc[:-1]])
    return float(np.sum(pf * (g_below + 0.5 * pg)))


def fit_roc(fit, grid_size: int = DEFAULT_GRID) -> RocCurve:
    """ROC curve of a maximum smoothed likelihood fit."""
    return roc_curve(score_cdfs(fit), grid_size)


def roc_l2_distance(a: RocCurve, b: RocCurve) -> float:
    """``[int (a - b)^2 ds]^(1/2)`` by the trapezoid rule on the shared grid."""
    if a.s.shape != b.s.shape or not np.allclose(a.s, b.s, rtol=0, atol=1e-15):
        raise ValueError("ROC curves must share the same grid")
    return float(np.sqrt(integrate.trapezoid((a.roc - b.roc) ** 2, a.s)))
