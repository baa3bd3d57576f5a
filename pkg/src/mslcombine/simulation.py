"""Simulation designs, ground truth and the replicated benchmark.

Example 1 (d = 2) and Example 2 (d = 3) mix a "truly diseased" and a
"truly healthy" component; a fraction ``1 - rho`` of each observed group is
drawn from the other group's component. Covariates are returned on the
scale where the log density ratio is linear (logs of lognormal and gamma
coordinates), so the fitted direction is comparable to the truth.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .estimator import FitConfig
from .exceptions import MSLError
from .methods import estimate
from .roc import DEFAULT_GRID, RocCurve, empirical_score_cdf, mann_whitney, roc_curve, roc_l2_distance
from .sampling import make_rng

__all__ = [
    "ScenarioSpec",
    "GroundTruth",
    "MethodSummary",
    "BenchReport",
    "TRUE_DIRECTIONS",
    "generate_ex1",
    "generate_ex2",
    "generate",
    "density_ratio_link",
    "ground_truth",
    "run_benchmark",
    "default_workers",
]

TRUE_DIRECTIONS = {
    "ex1": np.array([-1.0, -4.0]) / np.sqrt(17.0),
    "ex2": np.array([-1.0, -4.5, 0.5]) / np.sqrt(21.5),
}
ORACLE_SEED = 20_251_016
MAX_FAILURE_RATE = 0.02
WORKERS_ENV = "MSLCOMBINE_WORKERS"


def default_workers() -> int:
    """Worker processes for replicate loops (environment variable, default 1)."""
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _component_labels(count, p, rng):
    return rng.random(count) < p


def generate_ex1(rho: float, n: int, m: int, rng: np.random.Generator):
    """Example 1 on the ``(log x1, log x2)`` scale.

    The diseased component is N(0, I); the healthy component is N((1, 4), I).
    """
    if not 0.0 < rho <= 1.0:
        raise ValueError("rho must lie in (0, 1]")
    shift = np.array([1.0, 4.0])

    def draw(count, p_diseased):
        comp = _component_labels(count, p_diseased, rng)
        z = rng.standard_normal((count, 2))
        return z + np.where(comp[:, None], 0.0, shift)

    X = draw(n, rho)
    Y = draw(m, 1.0 - rho)
    return X, Y


def generate_ex2(rho: float, n: int, m: int, rng: np.random.Generator):
    """Example 2 on the ``(x1, x2, log x3)`` scale.

    Diseased component: N(0,1) x N(0,1) x Gamma(2.5, scale 4); healthy
    component: N(1,1) x N(4.5,1) x Gamma(2, scale 4).
    """
    if not 0.0 < rho <= 1.0:
        raise ValueError("rho must lie in (0, 1]")

    def draw(count, p_diseased):
        comp = _component_labels(count, p_diseased, rng)
        z = rng.standard_normal((count, 2))
        g_dis = rng.gamma(2.5, 4.0, count)
        g_hea = rng.gamma(2.0, 4.0, count)
        x12 = z + np.where(comp[:, None], 0.0, np.array([1.0, 4.5]))
        x3 = np.where(comp, g_dis, g_hea)
        return np.column_stack([x12, np.log(x3)])

    X = draw(n, rho)
    Y = draw(m, 1.0 - rho)
    return X, Y


_GENERATORS = {"ex1": generate_ex1, "ex2": generate_ex2}
_EXAMPLE_KEYS = {"ex1": 1, "ex2": 2}


def generate(example: str, rho: float, n: int, m: int, rng: np.random.Generator):
    try:
        gen = _GENERATORS[example.lower()]
    except KeyError:
        raise ValueError(f"unknown example {example!r}; choose 'ex1' or 'ex2'") from None
    return gen(rho, n, m, rng)


def density_ratio_link(t, rho: float):
    """``f/g`` as a function of the component log-ratio U = t.

    ``(rho e^t + 1 - rho) / ((1 - rho) e^t + rho)``; its derivative has the
    sign of ``2 rho - 1``, so the link is increasing whenever rho > 1/2.
    """
    e = np.exp(np.asarray(t, dtype=float))
    return (rho * e + 1.0 - rho) / ((1.0 - rho) * e + rho)


@dataclass(frozen=True)
class ScenarioSpec:
    example: str = "ex1"
    rho: float = 1.0
    n: int = 300
    m: int = 300
    replicates: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.example not in _GENERATORS:
            raise ValueError(f"unknown example {self.example!r}")
        if not 0.5 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0.5, 1]")
        if self.n < 2 or self.m < 2 or self.replicates < 1:
            raise ValueError("need n, m >= 2 and at least one replicate")


@dataclass(frozen=True, eq=False)
class GroundTruth:
    beta_true_unit: np.ndarray
    roc_true: RocCurve
    auc_true: float


@lru_cache(maxsize=32)
def _ground_truth_cached(example, rho, oracle_size, grid_size, oracle_seed):
    beta = TRUE_DIRECTIONS[example]
    s = np.linspace(0.0, 1.0, grid_size)
    if rho == 0.5:
        return GroundTruth(beta.copy(), RocCurve(s, s.copy(), 0.5), 0.5)
    rng = make_rng(oracle_seed, (_EXAMPLE_KEYS[example], int(round(rho * 1000))))
    X, Y = generate(example, rho, oracle_size, oracle_size, rng)
    cdfs = empirical_score_cdf(X @ beta, Y @ beta)
    return GroundTruth(beta.copy(), roc_curve(cdfs, grid_size), mann_whitney(cdfs))


def ground_truth(spec: ScenarioSpec, oracle_size: int = 1_000_000, grid_size: int = DEFAULT_GRID,
                 oracle_seed: int = ORACLE_SEED) -> GroundTruth:
    """True direction plus the optimal ROC/AUC, the latter by a large Monte Carlo oracle.

    The AUC is the Mann-Whitney statistic of the oracle scores; the ROC is
    their empirical curve on the shared grid.
    """
    return _ground_truth_cached(spec.example, float(spec.rho), int(oracle_size), int(grid_size),
                                int(oracle_seed))


@dataclass(frozen=True, eq=False)
class MethodSummary:
    """Per-method aggregates; Bias/SD/MSE and the ROC L2 are scaled by 1000."""

    method: str
    bias: np.ndarray
    sd: np.ndarray
    mse: np.ndarray
    roc_l2: float
    auc_rb: float
    auc_mse: float
    n_ok: int
    failures: int
    sd_defined: bool
    estimates: np.ndarray = field(repr=False)
    beta_errors: np.ndarray = field(repr=False)
    roc_l2s: np.ndarray = field(repr=False)
    aucs: np.ndarray = field(repr=False)

    @property
    def mean_beta_error(self) -> float:
        return float(self.beta_errors.mean())

    @property
    def median_beta_error(self) -> float:
        return float(np.median(self.beta_errors))

    @property
    def median_roc_l2(self) -> float:
        return float(np.median(self.roc_l2s))


@dataclass(frozen=True, eq=False)
class BenchReport:
    spec: ScenarioSpec
    truth: GroundTruth
    methods: dict

    @property
    def valid(self) -> bool:
        return all(s.failures < MAX_FAILURE_RATE * self.spec.replicates for s in self.methods.values())

    def to_csv(self) -> str:
        """Bias/SD/MSE table, one row per method and component (x1000)."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["example", "n", "m", "rho", "method", "component", "bias", "sd", "mse"])
        sp = self.spec
        for name, summ in self.methods.items():
            for j in range(summ.bias.size):
                writer.writerow([sp.example, sp.n, sp.m, repr(float(sp.rho)), name, f"beta{j + 1}",
                                 f"{summ.bias[j]:.17g}", f"{summ.sd[j]:.17g}", f"{summ.mse[j]:.17g}"])
        return buf.getvalue()

    def roc_csv(self) -> str:
        """ROC L2 (x1000), AUC relative bias (%) and AUC MSE (x1000) per method."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["example", "n", "m", "rho", "method", "roc_l2", "auc_rb_percent", "auc_mse"])
        sp = self.spec
        for name, summ in self.methods.items():
            writer.writerow([sp.example, sp.n, sp.m, repr(float(sp.rho)), name, f"{summ.roc_l2:.17g}",
                             f"{summ.auc_rb:.17g}", f"{summ.auc_mse:.17g}"])
        return buf.getvalue()

    def summary(self) -> dict:
        sp = self.spec
        out = {
            "scenario": {"example": sp.example, "rho": sp.rho, "n": sp.n, "m": sp.m,
                         "replicates": sp.replicates, "seed": sp.seed},
            "truth": {"beta_unit": self.truth.beta_true_unit.tolist(), "auc": self.truth.auc_true},
            "valid": self.valid,
            "methods": {},
        }
        for name, s in self.methods.items():
            out["methods"][name] = {
                "bias_x1000": s.bias.tolist(),
                "sd_x1000": s.sd.tolist(),
                "mse_x1000": s.mse.tolist(),
                "roc_l2_x1000": s.roc_l2,
                "auc_rb_percent": s.auc_rb,
                "auc_mse_x1000": s.auc_mse,
                "mean_beta_error": s.mean_beta_error,
                "replicates_ok": s.n_ok,
                "failures": s.failures,
                "sd_defined": s.sd_defined,
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def _replicate(args):
    spec, methods, config, grid_size, truth_roc, truth_beta, r = args
    X, Y = generate(spec.example, spec.rho, spec.n, spec.m, make_rng(spec.seed, (r, 0)))
    out = {}
    for method in methods:
        try:
            est = estimate(method, X, Y, config.replace(seed=spec.seed, stream=(r, 1)), grid_size)
        except MSLError as exc:
            out[method] = exc.__class__.__name__
            continue
        b = est.beta_unit
        if b @ truth_beta < 0:
            b = -b
        out[method] = (b, roc_l2_distance(est.roc, truth_roc), est.auc)
    return out


def _summarise(method, rows, truth, failures):
    est = np.array([row[0] for row in rows])
    l2 = np.array([row[1] for row in rows])
    aucs = np.array([row[2] for row in rows])
    R = est.shape[0]
    diff = est - truth.beta_true_unit
    bias = diff.mean(axis=0)
    mse = (diff**2).mean(axis=0)
    sd_defined = R > 1
    sd = est.std(axis=0, ddof=1) if sd_defined else np.zeros(est.shape[1])
    auc_err = aucs - truth.auc_true
    return MethodSummary(
        method=method,
        bias=1000.0 * bias,
        sd=1000.0 * sd,
        mse=1000.0 * mse,
        roc_l2=1000.0 * float(l2.mean()),
        auc_rb=100.0 * float(auc_err.mean()) / truth.auc_true,
        auc_mse=1000.0 * float((auc_err**2).mean()),
        n_ok=R,
        failures=failures,
        sd_defined=sd_defined,
        estimates=est,
        beta_errors=np.linalg.norm(diff, axis=1),
        roc_l2s=l2,
        aucs=aucs,
    )


def run_benchmark(spec: ScenarioSpec, methods=("msl",), config: FitConfig | None = None,
                  workers: int | None = None, oracle_size: int = 1_000_000,
                  grid_size: int = DEFAULT_GRID) -> BenchReport:
    """Replicate the scenario and aggregate the Tables 1-4 style metrics.

    Replicate ``r`` draws its data from stream ``(r, 0)`` and fits with
    stream ``(r, 1)`` of ``spec.seed``, so results do not depend on the
    number of workers. Estimates are sign-aligned with the true direction.
    """
    config = FitConfig() if config is None else config
    methods = tuple(methods)
    truth = ground_truth(spec, oracle_size, grid_size)
    jobs = [(spec, methods, config, grid_size, truth.roc_true, truth.beta_true_unit, r)
            for r in range(spec.replicates)]
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replicate, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_replicate(job) for job in jobs]

    summaries = {}
    for method in methods:
        rows = [res[method] for res in results if not isinstance(res[method], str)]
        failures = len(results) - len(rows)
        if not rows:
            raise MSLError(f"every replicate failed for method {method!r}")
        summaries[method] = _summarise(method, rows, truth, failures)
    return BenchReport(spec, truth, summaries)
