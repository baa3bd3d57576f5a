"""Stratified bootstrap standard errors for a combination method."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .estimator import FitConfig
from .exceptions import MSLError, TooManyFailures
from .methods import MethodEstimate, estimate
from .sampling import make_rng
from .simulation import default_workers

__all__ = ["BootstrapReport", "bootstrap_se", "MAX_FAILURE_RATE"]

MAX_FAILURE_RATE = 0.05


@dataclass(frozen=True, eq=False)
class BootstrapReport:
    """Replicate estimates and their component-wise standard errors.

    ``estimates`` holds the successful replicates only, each sign-aligned
    with ``beta_full``.
    """

    method: str
    B: int
    beta_full: np.ndarray
    auc_full: float
    estimates: np.ndarray
    se: np.ndarray
    aucs: np.ndarray
    auc_se: float
    failures: int
    seed: int
    info: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "method": self.method,
            "B": self.B,
            "seed": self.seed,
            "beta_unit": self.beta_full.tolist(),
            "beta_se": self.se.tolist(),
            "auc": self.auc_full,
            "auc_se": self.auc_se,
            "failures": self.failures,
            "replicates_ok": int(self.estimates.shape[0]),
            **self.info,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        d = self.estimates.shape[1]
        lines = [",".join(["replicate"] + [f"beta{j + 1}" for j in range(d)] + ["auc"])]
        for b, (row, a) in enumerate(zip(self.estimates, self.aucs)):
            lines.append(",".join([str(b)] + [f"{v:.17g}" for v in row] + [f"{a:.17g}"]))
        return "\n".join(lines) + "\n"


def _one(args):
    method, X, Y, config, stream = args
    rng = make_rng(config.seed, stream + (0,))
    Xb = X[rng.integers(0, X.shape[0], X.shape[0])]
    Yb = Y[rng.integers(0, Y.shape[0], Y.shape[0])]
    try:
        est = estimate(method, Xb, Yb, config.replace(stream=stream + (1,)))
    except MSLError as exc:
        return exc.__class__.__name__
    return est.beta_unit, est.auc


def bootstrap_se(dataset: Dataset, config: FitConfig | None = None, B: int = 300, method: str = "msl",
                 replicate_streams=None, workers: int | None = None,
                 full: MethodEstimate | None = None) -> BootstrapReport:
    """Resample each group with replacement, refit, and take sample SDs.

    Replicate ``b`` uses stream ``(1, b)`` of ``config.seed`` unless
    ``replicate_streams`` supplies the keys explicitly (equal keys give
    identical replicates). Each replicate direction is flipped to have a
    nonnegative inner product with the full-data estimate.

    Raises
    ------
    TooManyFailures
        If more than 5% of replicates fail.
    """
    if B < 2:
        raise ValueError("B must be >= 2")
    config = FitConfig() if config is None else config
    X, Y = dataset.X, dataset.Y
    if full is None:
        full = estimate(method, X, Y, config)
    if replicate_streams is None:
        streams = [(1, b) for b in range(B)]
    else:
        streams = [tuple(s) if isinstance(s, (tuple, list)) else (int(s),) for s in replicate_streams]
        if len(streams) != B:
            raise ValueError("replicate_streams must have length B")

    jobs = [(method, X, Y, config, s) for s in streams]
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one, jobs))
    else:
        results = [_one(job) for job in jobs]

    ok = [res for res in results if not isinstance(res, str)]
    failures = B - len(ok)
    if failures > MAX_FAILURE_RATE * B or len(ok) < 2:
        raise TooManyFailures(f"{failures} of {B} bootstrap replicates failed")
    est = np.array([b if b @ full.beta_unit >= 0 else -b for b, _ in ok])
    aucs = np.array([a for _, a in ok])
    return BootstrapReport(
        method=method,
        B=B,
        beta_full=full.beta_unit,
        auc_full=float(full.auc),
        estimates=est,
        se=est.std(axis=0, ddof=1),
        aucs=aucs,
        auc_se=float(aucs.std(ddof=1)),
        failures=failures,
        seed=int(config.seed),
        info={"n": int(X.shape[0]), "m": int(Y.shape[0])},
    )
