"""Weighted isotonic regression (pool adjacent violators) and step functions.

For a fixed direction beta, the profiled theta_beta is the weighted
isotonic regression of the cached ratios ``r_i`` on the scores
``beta' Z_i`` over the Monte Carlo cloud.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .exceptions import EmptyProblem

__all__ = ["StepFunction", "IsotonicProblem", "solve_pava", "isotonic_fit", "theta_beta", "step_eval"]


@numba.njit(cache=True)
def _merge_ties(s, y, w):
    """Collapse equal sorted positions into single weighted observations.

    Returns per-group (position, weighted response sum, weight sum) and the
    group index of every input element.
    """
    n = s.shape[0]
    pos = np.empty(n)
    ysum = np.empty(n)
    wsum = np.empty(n)
    group = np.empty(n, dtype=np.int64)
    g = -1
    for i in range(n):
        if g < 0 or s[i] != pos[g]:
            g += 1
            pos[g] = s[i]
            ysum[g] = w[i] * y[i]
            wsum[g] = w[i]
        else:
            ysum[g] += w[i] * y[i]
            wsum[g] += w[i]
        group[i] = g
    return pos[: g + 1], ysum[: g + 1], wsum[: g + 1], group


@numba.njit(cache=True)
def _pava_sums(ysum, wsum):
    """Stack-based PAVA on pre-aggregated (sum, weight) observations.

    Blocks store their weighted response sum rather than their mean; pooling
    happens only on a strict violation, so already-monotone input is returned
    untouched.
    """
    n = ysum.shape[0]
    bs = np.empty(n)
    bw = np.empty(n)
    start = np.empty(n, dtype=np.int64)
    k = -1
    for i in range(n):
        k += 1
        bs[k] = ysum[i]
        bw[k] = wsum[i]
        start[k] = i
        while k > 0 and bs[k - 1] / bw[k - 1] > bs[k] / bw[k]:
            bs[k - 1] += bs[k]
            bw[k - 1] += bw[k]
            k -= 1
    return bs[: k + 1] / bw[: k + 1], start[: k + 1]


@numba.njit(cache=True)
def _block_means(ysum, wsum, start):
    """Recompute block means with compensated (Neumaier) sums.

    The running sums inside the pooling loop accumulate rounding error as
    blocks merge; recomputing once the partition is fixed keeps the
    weighted-mean identity exact to a few ulps.
    """
    nb = start.shape[0]
    n = ysum.shape[0]
    out = np.empty(nb)
    for b in range(nb):
        stop = start[b + 1] if b + 1 < nb else n
        sy, cy, sw, cw = 0.0, 0.0, 0.0, 0.0
        for j in range(start[b], stop):
            t = sy + ysum[j]
            if abs(sy) >= abs(ysum[j]):
                cy += (sy - t) + ysum[j]
            else:
                cy += (ysum[j] - t) + sy
            sy = t
            t = sw + wsum[j]
            if abs(sw) >= abs(wsum[j]):
                cw += (sw - t) + wsum[j]
            else:
                cw += (wsum[j] - t) + sw
            sw = t
        out[b] = (sy + cy) / (sw + cw)
        # a recomputed mean may differ from the pooled one by an ulp; keep order
        if b > 0 and out[b] < out[b - 1]:
            out[b] = out[b - 1]
    return out


@numba.njit(cache=True)
def _expand(values, start, n_groups):
    out = np.empty(n_groups)
    nb = values.shape[0]
    for b in range(nb):
        stop = start[b + 1] if b + 1 < nb else n_groups
        for j in range(start[b], stop):
            out[j] = values[b]
    return out


def _fit_sorted(s, y, w):
    pos, ysum, wsum, group = _merge_ties(s, y, w)
    _, start = _pava_sums(ysum, wsum)
    return pos, _block_means(ysum, wsum, start), start, group


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Nondecreasing right-continuous step function with flat extension.

    ``theta(t) = values[j]`` for the largest ``knots[j] <= t`` and
    ``values[0]`` below the first knot.
    """

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        knots = np.array(self.knots, dtype=float, ndmin=1)
        values = np.array(self.values, dtype=float, ndmin=1)
        if knots.ndim != 1 or knots.shape != values.shape or knots.size == 0:
            raise ValueError("knots and values must be non-empty vectors of equal length")
        if not (np.all(np.isfinite(knots)) and np.all(np.isfinite(values))):
            raise ValueError("step function has non-finite entries")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if np.any(np.diff(values) < 0):
            raise ValueError("values must be nondecreasing")
        knots.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)

    def in_unit_interval(self) -> bool:
        return bool(self.values[0] >= 0.0 and self.values[-1] <= 1.0)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.knots, t, side="right") - 1
        out = self.values[np.clip(idx, 0, None)]
        return float(out) if out.ndim == 0 else out

    def to_table(self) -> np.ndarray:
        """Two-column ``(knot, value)`` array."""
        return np.column_stack([self.knots, self.values])

    @classmethod
    def from_table(cls, table) -> "StepFunction":
        table = np.asarray(table, dtype=float)
        return cls(table[:, 0], table[:, 1])


def step_eval(theta: StepFunction, t):
    """Evaluate ``theta`` at ``t`` (scalar or array)."""
    t_arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t_arr)):
        raise ValueError("evaluation point must be finite")
    return theta(t_arr)


@dataclass(frozen=True, eq=False)
class IsotonicProblem:
    """Minimise ``sum w_i (r_i - theta(s_i))^2`` over nondecreasing theta."""

    positions: np.ndarray
    responses: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        s = np.array(self.positions, dtype=float, ndmin=1)
        r = np.array(self.responses, dtype=float, ndmin=1)
        w = np.array(self.weights, dtype=float, ndmin=1)
        if not (s.shape == r.shape == w.shape) or s.ndim != 1:
            raise ValueError("positions, responses and weights must be equal-length vectors")
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(r)) and np.all(np.isfinite(w))):
            raise ValueError("isotonic problem has non-finite entries")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "positions", s)
        object.__setattr__(self, "responses", r)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.positions.size


def isotonic_fit(problem: IsotonicProblem) -> np.ndarray:
    """Fitted values at the problem's positions, in the original order."""
    if len(problem) == 0:
        raise EmptyProblem("isotonic problem has no observations")
    order = np.argsort(problem.positions, kind="stable")
    _, values, start, group = _fit_sorted(
        problem.positions[order], problem.responses[order], problem.weights[order])
    fitted_groups = _expand(values, start, group[-1] + 1)
    out = np.empty(len(problem))
    out[order] = fitted_groups[group]
    return out


def solve_pava(problem: IsotonicProblem) -> StepFunction:
    """Exact weighted isotonic regression as a step function.

    Equal positions are merged first (weights summed, responses averaged),
    then adjacent violators are pooled. Each pooled block contributes one
    knot at its smallest position.
    """
    if len(problem) == 0:
        raise EmptyProblem("isotonic problem has no observations")
    order = np.argsort(problem.positions, kind="stable")
    pos, values, start, _ = _fit_sorted(
        problem.positions[order], problem.responses[order], problem.weights[order])
    return StepFunction(pos[start], values)


def theta_beta(cloud, beta) -> StepFunction:
    """Profiled theta for direction ``beta`` on a Monte Carlo cloud."""
    beta = np.asarray(beta, dtype=float)
    if not np.all(np.isfinite(beta)) or not np.any(beta != 0):
        raise ValueError("beta must be finite and nonzero")
    theta = solve_pava(IsotonicProblem(cloud.Z @ beta, cloud.r, cloud.w))
    if not theta.in_unit_interval():
        raise AssertionError("theta_beta left [0, 1]; cloud ratios are corrupt")
    return theta


def profile_fitted(scores: np.ndarray, r: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Fast path used inside the optimiser: fitted theta at every cloud point."""
    order = np.argsort(scores, kind="stable")
    _, values, start, group = _fit_sorted(scores[order], r[order], w[order])
    fitted = _expand(values, start, group[-1] + 1)[group]
    out = np.empty_like(fitted)
    out[order] = fitted
    return out
