"""Seeded random streams and the Monte Carlo cloud.

Every integral the estimator needs is replaced by a weighted sum over one
cloud of 2N points: N drawn from f~_n and N from g~_m.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import SamplingFailure
from .kernels import KernelModel, get_kernel, kde_eval

__all__ = [
    "DEFAULT_N",
    "make_rng",
    "sample_from_kernel",
    "sample_from_kde",
    "MonteCarloCloud",
    "build_cloud",
]

DEFAULT_N = 10_000
PSI_FLOOR = 1e-300
MAX_REDRAWS = 100


def make_rng(seed: int = 0, stream: int | tuple = 0) -> np.random.Generator:
    """PCG64 generator for the ``(seed, stream)`` pair.

    Streams are SeedSequence spawn keys, so distinct stream ids give
    statistically independent generators and no state is shared between them.
    """
    key = tuple(stream) if isinstance(stream, tuple) else (int(stream),)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


def sample_from_kernel(kernel, d: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """``d`` independent coordinates from the univariate kernel.

    Returns a length-``d`` vector, or a ``(size, d)`` matrix when ``size`` is given.
    """
    k = get_kernel(kernel)
    shape = (d,) if size is None else (int(size), d)
    return k.sample(rng, shape)


def sample_from_kde(model: KernelModel, count: int, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. draws from the kernel mixture: pick a data row, add ``h * U``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    idx = rng.integers(0, model.n, size=count)
    u = sample_from_kernel(model.kernel, model.dim, rng, count)
    return model.data[idx] + u * model.bandwidth


@dataclass(frozen=True, eq=False)
class MonteCarloCloud:
    """2N points with block weights and cached ratios ``lam f~ / psi^``.

    Rows ``[:N]`` come from f~_n and carry weight ``lam``; rows ``[N:]`` come
    from g~_m and carry weight ``1 - lam``.
    """

    Z: np.ndarray
    w: np.ndarray
    r: np.ndarray
    N: int
    lam: float
    psi: np.ndarray

    def __post_init__(self):
        for name in ("Z", "w", "r", "psi"):
            arr = getattr(self, name)
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"cloud field {name} has non-finite entries")
            arr.flags.writeable = False
        if self.Z.shape[0] != 2 * self.N:
            raise ValueError("Z must have 2N rows")

    @property
    def from_f(self) -> np.ndarray:
        """Boolean mask of the rows drawn from f~_n."""
        mask = np.zeros(2 * self.N, dtype=bool)
        mask[: self.N] = True
        return mask

    def mean_ratio(self) -> tuple[float, float]:
        """Weighted mean ``(1/N) sum w_i r_i`` and its Monte Carlo standard error.

        The mean estimates ``int lam f~ = lam``; the SE combines the two
        independent blocks.
        """
        N = self.N
        a = self.w[:N] * self.r[:N]
        b = self.w[N:] * self.r[N:]
        mean = (a.sum() + b.sum()) / N
        se = np.sqrt((a.var(ddof=1) + b.var(ddof=1)) / N)
        return float(mean), float(se)


def _draw_supported(model, count, rng, fmodel, gmodel, lam):
    z = sample_from_kde(model, count, rng)
    fv, gv = kde_eval(fmodel, z), kde_eval(gmodel, z)
    for _ in range(MAX_REDRAWS):
        bad = lam * fv + (1.0 - lam) * gv < PSI_FLOOR
        if not bad.any():
            return z, fv, gv
        z[bad] = sample_from_kde(model, int(bad.sum()), rng)
        fv[bad], gv[bad] = kde_eval(fmodel, z[bad]), kde_eval(gmodel, z[bad])
    raise SamplingFailure(f"pooled density below {PSI_FLOOR} after {MAX_REDRAWS} redraws")


def build_cloud(fmodel: KernelModel, gmodel: KernelModel, lam: float, N: int = DEFAULT_N,
                rng: np.random.Generator | None = None) -> MonteCarloCloud:
    """Draw the cloud and cache ``r_i = lam f~(Z_i) / psi^(Z_i)``.

    With compactly supported kernels a point can fall outside the support of
    the other group's estimate, so ``r_i`` lies in [0, 1] rather than (0, 1).
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie strictly between 0 and 1")
    if N < 1:
        raise ValueError("N must be >= 1")
    if fmodel.dim != gmodel.dim:
        raise ValueError("f and g models differ in dimension")
    rng = np.random.default_rng() if rng is None else rng
    zf, ff, gf = _draw_supported(fmodel, N, rng, fmodel, gmodel, lam)
    zg, fg, gg = _draw_supported(gmodel, N, rng, fmodel, gmodel, lam)
    Z = np.vstack([zf, zg])
    fv = np.concatenate([ff, fg])
    psi = lam * fv + (1.0 - lam) * np.concatenate([gf, gg])
    r = np.clip(lam * fv / psi, 0.0, 1.0)
    w = np.concatenate([np.full(N, lam), np.full(N, 1.0 - lam)])
    return MonteCarloCloud(Z=Z, w=w, r=r, N=int(N), lam=float(lam), psi=psi)
