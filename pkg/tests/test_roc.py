import numpy as np
import pytest
from scipy import stats

from mslcombine.baselines import empirical_auc
from mslcombine.exceptions import ZeroMass
from mslcombine.roc import (
    RocCurve,
    auc,
    empirical_score_cdf,
    mann_whitney,
    roc_curve,
    roc_l2_distance,
    weighted_score_cdf,
)
from oracles import polygon_area


def test_weighted_cdf_merges_ties():
    cdfs = weighted_score_cdf([2.0, 1.0, 2.0], [1.0, 1.0, 2.0], [0.0, 3.0, 1.0])
    np.testing.assert_array_equal(cdfs.thresholds, [1.0, 2.0])
    np.testing.assert_allclose(cdfs.Fc, [0.25, 1.0])
    np.testing.assert_allclose(cdfs.Gc, [0.75, 1.0])
    assert cdfs.F(0.5) == 0.0 and cdfs.F(1.0) == 0.25 and cdfs.G(5.0) == 1.0


def test_zero_mass():
    with pytest.raises(ZeroMass):
        weighted_score_cdf([1.0, 2.0], [0.0, 0.0], [1.0, 1.0])


def test_mann_whitney_matches_pair_count(rng):
    sx = rng.integers(0, 6, 40).astype(float)
    sy = rng.integers(0, 6, 55).astype(float)
    pairs = (sx[:, None] > sy[None, :]).mean() + 0.5 * (sx[:, None] == sy[None, :]).mean()
    assert mann_whitney(empirical_score_cdf(sx, sy)) == pytest.approx(pairs, abs=1e-14)
    assert empirical_auc(sx, sy) == pytest.approx(pairs, abs=1e-14)


def test_polygon_area_is_mann_whitney(rng):
    sx = rng.normal(1.0, 1.0, 70)
    sy = rng.normal(0.0, 1.0, 90)
    cdfs = empirical_score_cdf(sx, sy)
    verts_x = np.r_[0.0, (1.0 - cdfs.Gc)[::-1][1:], 1.0]
    verts_y = np.r_[0.0, (1.0 - cdfs.Fc)[::-1][1:], 1.0]
    assert polygon_area(verts_x, verts_y) == pytest.approx(mann_whitney(cdfs), abs=1e-12)
    # the grid trapezoid differs from the polygon only inside cells holding a vertex
    curve = roc_curve(cdfs, 20001)
    assert curve.auc == pytest.approx(mann_whitney(cdfs), abs=1e-4)


def test_roc_endpoints_and_monotone(rng):
    cdfs = empirical_score_cdf(rng.normal(1, 1, 30), rng.normal(0, 1, 25))
    curve = roc_curve(cdfs)
    assert curve.roc[0] == 0.0 and curve.roc[-1] == 1.0
    assert np.all(np.diff(curve.roc) >= -1e-15)
    assert curve.s.size == 1001
    assert auc(curve) == curve.auc


def test_binormal_auc(rng):
    sx = rng.normal(1.0, 1.0, 200_000)
    sy = rng.normal(0.0, 1.0, 200_000)
    curve = roc_curve(empirical_score_cdf(sx, sy))
    assert curve.auc == pytest.approx(stats.norm.cdf(1 / np.sqrt(2)), abs=3e-3)
    s = curve.s[100:900]
    truth = 1 - stats.norm.cdf(stats.norm.ppf(1 - s) - 1.0)
    np.testing.assert_allclose(curve.roc[100:900], truth, atol=5e-3)


def test_identical_groups_give_diagonal():
    x = np.arange(10.0)
    curve = roc_curve(empirical_score_cdf(x, x))
    np.testing.assert_allclose(curve.roc, curve.s, atol=1e-12)
    assert curve.auc == pytest.approx(0.5, abs=1e-12)


def test_l2_distance():
    s = np.linspace(0, 1, 101)
    a = RocCurve(s, s, 0.5)
    b = RocCurve(s, np.sqrt(s), 2 / 3)
    # int (sqrt(s) - s)^2 ds = 1/2 - 4/5 + 1/3 = 1/30
    assert roc_l2_distance(a, b) == pytest.approx(np.sqrt(1 / 30), abs=1e-4)
    assert roc_l2_distance(a, a) == 0.0
    with pytest.raises(ValueError):
        roc_l2_distance(a, RocCurve(np.linspace(0, 1, 11), np.linspace(0, 1, 11), 0.5))
