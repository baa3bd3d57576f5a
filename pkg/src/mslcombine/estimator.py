"""Maximum smoothed likelihood estimation of (beta, theta, psi, f, g).

The pipeline is: normal-reference bandwidths, two kernel models, one fixed
Monte Carlo cloud, then Nelder-Mead maximisation of the profile
log-likelihood over directions with first coordinate fixed to +1 or -1.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

import numpy as np
from scipy import optimize

from .baselines import fit_exp_tilting
from .exceptions import DataError, MSLError, OptimizerFailure
from .isotonic import StepFunction, profile_fitted, theta_beta
from .kernels import KernelModel, get_kernel
from .sampling import DEFAULT_N, MonteCarloCloud, build_cloud, make_rng

__all__ = ["FitConfig", "FitResult", "profile_objective", "fit", "density_at", "CLAMP_EPS"]

CLAMP_EPS = 1e-6

# Config-file spellings accepted in addition to the field names.
_CONFIG_ALIASES = {
    "N_monte_carlo": "n_monte_carlo",
    "N": "n_monte_carlo",
    "multi_start": "n_starts",
    "multi_starts": "n_starts",
    "tolerance": "fatol",
}


@dataclass(frozen=True)
class FitConfig:
    """Tuning knobs for :func:`fit`.

    ``bandwidths`` overrides the normal-reference rule with an explicit
    ``(h_f, h_g)`` pair (each a scalar or a length-d vector); the multiplier
    is applied on top of either choice. ``max_iter`` of ``None`` means
    ``500 * (d - 1)`` Nelder-Mead iterations per start.
    """

    kernel: str = "epanechnikov"
    bandwidth_multiplier: float = 1.0
    bandwidth_scale: str = "robust"
    bandwidths: tuple | None = None
    n_monte_carlo: int = DEFAULT_N
    fatol: float = 1e-6
    xatol: float = 1e-6
    max_iter: int | None = None
    n_starts: int = 5
    b_max: float = 50.0
    jitter: float = 0.5
    seed: int = 0
    stream: int | tuple = 0

    @classmethod
    def from_dict(cls, mapping: dict | None) -> "FitConfig":
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in (mapping or {}).items():
            key = _CONFIG_ALIASES.get(key, key)
            if key in known:
                kwargs[key] = tuple(value) if isinstance(value, list) else value
        return cls(**kwargs)

    def replace(self, **changes) -> "FitConfig":
        return FitConfig(**{**asdict(self), **changes})


@dataclass(frozen=True, eq=False)
class FitResult:
    beta_hat: np.ndarray
    beta_unit: np.ndarray
    theta_hat: StepFunction
    profile_ll: float
    lam: float
    fmodel: KernelModel
    gmodel: KernelModel
    cloud: MonteCarloCloud
    config: FitConfig
    diagnostics: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.beta_hat.size

    def scores(self, x=None) -> np.ndarray:
        """Combined scores ``beta_hat' x`` (cloud points by default)."""
        pts = self.cloud.Z if x is None else np.atleast_2d(np.asarray(x, dtype=float))
        return pts @ self.beta_hat


def _log_terms(theta, cloud, eps):
    t = np.clip(theta, eps, 1.0 - eps)
    N = cloud.N
    return (cloud.lam * np.log(t[:N]).sum() + (1.0 - cloud.lam) * np.log1p(-t[N:]).sum()) / N


def profile_objective(cloud: MonteCarloCloud, beta, eps: float = CLAMP_EPS) -> float:
    """Monte Carlo profile log-likelihood at direction ``beta``.

    theta_beta is the isotonic fit of the cached ratios on ``beta' Z``;
    its values are clamped to ``[eps, 1 - eps]`` inside the logarithms only.
    """
    beta = np.asarray(beta, dtype=float)
    if not np.all(np.isfinite(beta)):
        raise ValueError("beta must be finite")
    theta = profile_fitted(cloud.Z @ beta, cloud.r, cloud.w)
    return float(_log_terms(theta, cloud, eps))


def _as_groups(X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    X = X[:, None] if X.ndim == 1 else X
    Y = Y[:, None] if Y.ndim == 1 else Y
    if X.ndim != 2 or Y.ndim != 2 or X.shape[1] != Y.shape[1]:
        raise DataError("X and Y must be matrices with the same number of columns")
    if X.shape[0] < 2 or Y.shape[0] < 2:
        raise DataError("need at least two observations in each group")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
        raise DataError("data contain non-finite values")
    return X, Y


def _warm_direction(X, Y):
    try:
        return fit_exp_tilting(X, Y).beta_unit
    except MSLError:
        diff = X.mean(axis=0) - Y.mean(axis=0)
        pooled = np.cov(np.vstack([X - X.mean(axis=0), Y - Y.mean(axis=0)]).T, ddof=1)
        v = np.linalg.lstsq(np.atleast_2d(pooled), diff, rcond=None)[0]
        return v / np.linalg.norm(v) if np.linalg.norm(v) > 0 else np.eye(X.shape[1])[0]


def _free_start(direction, sign, b_max):
    if abs(direction[0]) < 1e-12:
        free = np.zeros(direction.size - 1)
    else:
        free = sign * direction[1:] / direction[0]
    return np.clip(free, -b_max, b_max)


def _kernel_models(X, Y, config):
    kernel = get_kernel(config.kernel)
    hf = hg = None
    if config.bandwidths is not None:
        hf, hg = (np.asarray(h, dtype=float) * config.bandwidth_multiplier for h in config.bandwidths)
    fmodel = KernelModel.from_data(X, kernel, config.bandwidth_multiplier, hf, config.bandwidth_scale)
    gmodel = KernelModel.from_data(Y, kernel, config.bandwidth_multiplier, hg, config.bandwidth_scale)
    return fmodel, gmodel


def fit_cloud(X, Y, config: FitConfig):
    """Kernel models and the fixed Monte Carlo cloud a fit with ``config`` uses."""
    X, Y = _as_groups(X, Y)
    fmodel, gmodel = _kernel_models(X, Y, config)
    lam = X.shape[0] / (X.shape[0] + Y.shape[0])
    cloud = build_cloud(fmodel, gmodel, lam, config.n_monte_carlo, make_rng(config.seed, _key(config.stream, 0)))
    return fmodel, gmodel, cloud


def _key(stream, child):
    base = tuple(stream) if isinstance(stream, (tuple, list)) else (int(stream),)
    return base + (child,)


def fit(X, Y, config: FitConfig | None = None) -> FitResult:
    """Maximum smoothed likelihood fit.

    ``X`` holds the diseased group (n x d), ``Y`` the healthy group (m x d).
    """
    config = FitConfig() if config is None else config
    X, Y = _as_groups(X, Y)
    d = X.shape[1]
    fmodel, gmodel, cloud = fit_cloud(X, Y, config)
    eps = CLAMP_EPS
    Z, r, w = cloud.Z, cloud.r, cloud.w

    def objective(beta):
        return _log_terms(profile_fitted(Z @ beta, r, w), cloud, eps)

    runs = []
    if d == 1:
        for sign in (1.0, -1.0):
            runs.append((objective(np.array([sign])), np.array([sign]), 0, True))
    else:
        warm = _warm_direction(X, Y)
        rng = make_rng(config.seed, _key(config.stream, 1))
        max_iter = 500 * (d - 1) if config.max_iter is None else int(config.max_iter)
        bounds = [(-config.b_max, config.b_max)] * (d - 1)
        for sign in (1.0, -1.0):
            base = _free_start(warm, sign, config.b_max)
            starts = [base]
            for _ in range(max(config.n_starts, 1) - 1):
                jit = rng.normal(scale=config.jitter * (1.0 + np.abs(base)))
                starts.append(np.clip(base + jit, -config.b_max, config.b_max))
            for x0 in starts:
                step = 0.1 * np.maximum(1.0, np.abs(x0))
                simplex = np.vstack([x0] + [x0 + step[j] * np.eye(d - 1)[j] for j in range(d - 1)])
                simplex = np.clip(simplex, -config.b_max, config.b_max)

                def negobj(free, sign=sign):
                    return -objective(np.concatenate([[sign], free]))

                res = optimize.minimize(
                    negobj, x0, method="Nelder-Mead", bounds=bounds,
                    options={"initial_simplex": simplex, "fatol": config.fatol,
                             "xatol": config.xatol, "maxiter": max_iter})
                beta = np.concatenate([[sign], res.x])
                runs.append((float(-res.fun), beta, int(res.nit), bool(res.success)))

    finite = [run for run in runs if np.isfinite(run[0])]
    if not finite:
        raise OptimizerFailure("profile objective was non-finite at every start")
    best = max(finite, key=lambda run: run[0])
    beta_hat = best[1]
    theta_hat = theta_beta(cloud, beta_hat)
    diagnostics = {
        "iterations": int(sum(run[2] for run in runs)),
        "restarts": len(runs),
        "converged": bool(best[3]),
        "run_objectives": [float(run[0]) for run in runs],
        "bandwidth_f": fmodel.bandwidth.tolist(),
        "bandwidth_g": gmodel.bandwidth.tolist(),
    }
    return FitResult(
        beta_hat=beta_hat,
        beta_unit=beta_hat / np.linalg.norm(beta_hat),
        theta_hat=theta_hat,
        profile_ll=float(best[0]),
        lam=cloud.lam,
        fmodel=fmodel,
        gmodel=gmodel,
        cloud=cloud,
        config=config,
        diagnostics=diagnostics,
    )


def density_at(fit_result: FitResult, x):
    """Reconstructed densities ``(f_hat(x), g_hat(x))``.

    ``f_hat = theta(beta'x) psi(x) / lam`` and
    ``g_hat = (1 - theta(beta'x)) psi(x) / (1 - lam)``.
    """
    pts = np.asarray(x, dtype=float)
    single = pts.ndim <= 1 and pts.size == fit_result.dim
    pts = pts.reshape(-1, fit_result.dim)
    lam = fit_result.lam
    fv = fit_result.fmodel(pts)
    gv = fit_result.gmodel(pts)
    psi = lam * fv + (1.0 - lam) * gv
    theta = np.asarray(fit_result.theta_hat(pts @ fit_result.beta_hat))
    f_hat = theta * psi / lam
    g_hat = (1.0 - theta) * psi / (1.0 - lam)
    if single:
        return float(f_hat[0]), float(g_hat[0])
    return f_hat, g_hat
