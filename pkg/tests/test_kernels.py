import numpy as np
import pytest
from scipy import integrate, stats

from mslcombine.exceptions import DegenerateColumn, QuadratureFailure
from mslcombine.kernels import (
    EPANECHNIKOV,
    GAUSSIAN,
    TRIWEIGHT,
    KernelModel,
    get_kernel,
    kde_eval,
    l1_smoothing_bias,
    normal_reference_bandwidth,
    psi_eval,
)
from oracles import kde_naive, quad_moment


@pytest.mark.parametrize("kernel", [EPANECHNIKOV, TRIWEIGHT, GAUSSIAN])
def test_kernel_constants_match_quadrature(kernel):
    lo, hi = (-1.0, 1.0) if kernel.conforming else (-np.inf, np.inf)
    assert quad_moment(kernel.pdf, 0, lo, hi) == pytest.approx(1.0, abs=1e-10)
    assert quad_moment(kernel.pdf, 2, lo, hi) == pytest.approx(kernel.mu2, abs=1e-10)
    rough = integrate.quad(lambda t: kernel.pdf(t) ** 2, lo, hi, epsabs=1e-13)[0]
    assert rough == pytest.approx(kernel.roughness, abs=1e-10)


@pytest.mark.parametrize("kernel", [EPANECHNIKOV, TRIWEIGHT, GAUSSIAN])
def test_cdf_ppf_consistent(kernel):
    p = np.linspace(0.01, 0.99, 25)
    np.testing.assert_allclose(kernel.cdf(kernel.ppf(p)), p, atol=1e-10)
    u = np.linspace(-0.9, 0.9, 7)
    numeric = [integrate.quad(kernel.pdf, -kernel.support if kernel.conforming else -np.inf, t)[0] for t in u]
    np.testing.assert_allclose(kernel.cdf(u), numeric, atol=1e-9)


def test_lookup():
    assert get_kernel("Epanechnikov") is EPANECHNIKOV
    assert get_kernel(GAUSSIAN) is GAUSSIAN
    with pytest.raises(ValueError):
        get_kernel("cosine")
    assert EPANECHNIKOV.conforming and not GAUSSIAN.conforming


def test_gaussian_reference_is_silverman_in_one_dimension(rng):
    x = rng.standard_normal(500)
    h = normal_reference_bandwidth(x, "gaussian", scale="sd")
    assert h[0] == pytest.approx((4.0 / 3.0) ** 0.2 * x.std(ddof=1) * 500 ** -0.2, rel=1e-12)


def test_epanechnikov_canonical_ratio(rng):
    x = rng.standard_normal((400, 1))
    ratio = normal_reference_bandwidth(x, "epanechnikov", scale="sd") / normal_reference_bandwidth(
        x, "gaussian", scale="sd")
    # classical equivalent-kernel factor 2.214 between Epanechnikov and Gaussian
    assert ratio[0] == pytest.approx(2.2138, abs=1e-3)


def test_robust_scale_shrinks_bimodal_column(rng):
    x = np.column_stack([rng.standard_normal(400),
                         np.where(rng.random(400) < 0.8, 0.0, 4.0) + rng.standard_normal(400)])
    sd = normal_reference_bandwidth(x, scale="sd")
    robust = normal_reference_bandwidth(x, scale="robust")
    assert robust[1] < sd[1]
    assert robust[0] <= sd[0]


def test_degenerate_column():
    with pytest.raises(DegenerateColumn):
        normal_reference_bandwidth(np.column_stack([np.arange(5.0), np.ones(5)]))


@pytest.mark.parametrize("kernel", ["epanechnikov", "gaussian", "triweight"])
def test_kde_matches_naive_loop(rng, kernel):
    data = rng.standard_normal((30, 2))
    model = KernelModel(data, [0.7, 0.4], kernel)
    pts = rng.standard_normal((12, 2))
    np.testing.assert_allclose(kde_eval(model, pts), kde_naive(data, model.bandwidth, get_kernel(kernel).pdf, pts),
                               rtol=1e-12, atol=1e-15)
    assert isinstance(kde_eval(model, pts[0]), float)


def test_kde_integrates_to_one(rng):
    data = rng.standard_normal(25)
    model = KernelModel.from_data(data)
    h = model.bandwidth[0]
    breaks = np.sort(np.concatenate([data - h, data + h]))
    pieces = [integrate.quad(lambda t: kde_eval(model, [t]), a, b)[0] for a, b in zip(breaks[:-1], breaks[1:])]
    mass = sum(pieces)
    assert mass == pytest.approx(1.0, abs=1e-8)


def test_kde_two_dimensional_mass(rng):
    data = rng.standard_normal((20, 2))
    model = KernelModel.from_data(data, "triweight")
    g = [np.linspace(data[:, j].min() - model.bandwidth[j], data[:, j].max() + model.bandwidth[j], 401)
         for j in range(2)]
    xx, yy = np.meshgrid(*g, indexing="ij")
    vals = kde_eval(model, np.column_stack([xx.ravel(), yy.ravel()])).reshape(xx.shape)
    mass = integrate.trapezoid(integrate.trapezoid(vals, g[1], axis=1), g[0])
    assert mass == pytest.approx(1.0, abs=2e-3)


def test_kde_validation():
    with pytest.raises(ValueError):
        KernelModel(np.ones((1, 2)), 1.0)
    with pytest.raises(ValueError):
        KernelModel(np.ones((3, 2)), [1.0, -1.0])
    with pytest.raises(ValueError):
        kde_eval(KernelModel(np.eye(3), 1.0), np.ones((2, 2)))


def test_psi_is_mixture(rng):
    f = KernelModel.from_data(rng.standard_normal((20, 2)))
    g = KernelModel.from_data(rng.standard_normal((30, 2)) + 1)
    x = rng.standard_normal((5, 2))
    np.testing.assert_allclose(psi_eval(f, g, 0.4, x), 0.4 * f(x) + 0.6 * g(x))
    with pytest.raises(ValueError):
        psi_eval(f, g, 1.0, x)


def test_l1_bias_quadratic_rate():
    ratio = l1_smoothing_bias(stats.norm.pdf, "gaussian", 0.2) / l1_smoothing_bias(stats.norm.pdf, "gaussian", 0.1)
    assert 3.5 <= ratio <= 4.5


def test_l1_bias_matches_closed_form():
    # Gaussian smoothing of N(0,1) is N(0, 1 + h^2); compare with a direct quadrature
    h = 0.3
    exact = integrate.quad(lambda t: abs(stats.norm.pdf(t, scale=np.sqrt(1 + h * h)) - stats.norm.pdf(t)),
                           -12, 12, limit=400)[0]
    assert l1_smoothing_bias(stats.norm.pdf, "gaussian", h) == pytest.approx(exact, rel=1e-4)


def test_l1_bias_grid_checks():
    with pytest.raises(QuadratureFailure):
        l1_smoothing_bias(stats.norm.pdf, "gaussian", 0.001)
    with pytest.raises(QuadratureFailure):
        l1_smoothing_bias(stats.norm.pdf, "gaussian", 5.0, grid=(-1, 1, 2001))
