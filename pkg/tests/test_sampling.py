import numpy as np
import pytest
from scipy import stats

from mslcombine import sampling
from mslcombine.exceptions import SamplingFailure
from mslcombine.kernels import KernelModel, get_kernel
from mslcombine.sampling import build_cloud, make_rng, sample_from_kde, sample_from_kernel


def test_streams_reproducible_and_distinct():
    a = make_rng(5, (1, 2)).random(4)
    np.testing.assert_array_equal(a, make_rng(5, (1, 2)).random(4))
    assert not np.array_equal(a, make_rng(5, (1, 3)).random(4))
    assert not np.array_equal(a, make_rng(6, (1, 2)).random(4))
    np.testing.assert_array_equal(make_rng(5, 3).random(2), make_rng(5, (3,)).random(2))


@pytest.mark.parametrize("name", ["epanechnikov", "triweight", "gaussian"])
def test_kernel_draws_match_distribution(name):
    k = get_kernel(name)
    u = sample_from_kernel(name, 2, make_rng(1, 0), size=40_000)
    assert u.shape == (40_000, 2)
    assert abs(u.var() - k.mu2) < 5 * np.sqrt(2 * k.mu2**2 / u.size) * 3
    assert stats.kstest(u[:, 0], k.cdf).pvalue > 1e-3
    if k.conforming:
        assert np.all(np.abs(u) <= 1.0)


def test_kde_draws_follow_mixture_cdf(rng):
    data = rng.standard_normal(15)
    model = KernelModel.from_data(data)
    z = sample_from_kde(model, 20_000, make_rng(2, 0))[:, 0]
    kern = model.kernel
    h = model.bandwidth[0]

    def cdf(t):
        return kern.cdf((np.asarray(t)[..., None] - data) / h).mean(axis=-1)

    assert stats.kstest(z, cdf).pvalue > 1e-3


def _models(rng, shift=1.0, kernel="epanechnikov"):
    X = rng.standard_normal((80, 2))
    Y = rng.standard_normal((120, 2)) + shift
    return KernelModel.from_data(X, kernel), KernelModel.from_data(Y, kernel)


def test_cloud_structure(rng):
    f, g = _models(rng)
    cloud = build_cloud(f, g, 0.4, 1000, make_rng(3, 0))
    assert cloud.Z.shape == (2000, 2)
    np.testing.assert_array_equal(cloud.w[:1000], 0.4)
    np.testing.assert_array_equal(cloud.w[1000:], 0.6)
    assert np.all((cloud.r >= 0) & (cloud.r <= 1))
    np.testing.assert_allclose(cloud.r, 0.4 * f(cloud.Z) / cloud.psi, atol=1e-15)
    assert cloud.from_f.sum() == 1000
    with pytest.raises(ValueError):
        cloud.Z[0, 0] = 1.0


def test_cloud_deterministic(rng):
    f, g = _models(rng)
    a = build_cloud(f, g, 0.5, 300, make_rng(4, 0))
    b = build_cloud(f, g, 0.5, 300, make_rng(4, 0))
    np.testing.assert_array_equal(a.Z, b.Z)
    np.testing.assert_array_equal(a.r, b.r)


@pytest.mark.parametrize("kernel", ["epanechnikov", "gaussian"])
def test_mean_ratio_estimates_lambda(rng, kernel):
    f, g = _models(rng, kernel=kernel)
    cloud = build_cloud(f, g, 0.3, 4000, make_rng(5, 0))
    mean, se = cloud.mean_ratio()
    assert abs(mean - 0.3) < 4 * se


def test_underflow_redraw_limit(rng, monkeypatch):
    f, g = _models(rng)
    monkeypatch.setattr(sampling, "PSI_FLOOR", np.inf)
    with pytest.raises(SamplingFailure):
        build_cloud(f, g, 0.5, 10, make_rng(6, 0))


def test_cloud_validation(rng):
    f, g = _models(rng)
    with pytest.raises(ValueError):
        build_cloud(f, g, 1.0, 10)
    with pytest.raises(ValueError):
        build_cloud(f, g, 0.5, 0)
