import numpy as np
import pytest

from mslcombine.baselines import (
    _angles_to_unit,
    _unit_to_angles,
    empirical_auc,
    fit_exp_tilting,
    fit_mh_auc,
    smoothed_auc,
)
from mslcombine.exceptions import RankDeficient, Separation
from mslcombine.sampling import make_rng
from mslcombine.simulation import TRUE_DIRECTIONS, generate_ex1
from oracles import logistic_oracle


@pytest.mark.parametrize("seed", range(4))
def test_exp_tilting_matches_likelihood_oracle(seed):
    rng = make_rng(seed, 0)
    X = rng.normal(0.5, 1.0, (70, 3))
    Y = rng.normal(0.0, 1.3, (90, 3))
    res = fit_exp_tilting(X, Y)
    coef = logistic_oracle(X, Y)
    np.testing.assert_allclose(res.diagnostics["slope"], coef[1:], atol=1e-6)
    assert res.intercept == pytest.approx(coef[0], abs=1e-6)
    assert np.linalg.norm(res.beta_unit) == pytest.approx(1.0, abs=1e-12)


def test_exp_tilting_null_flagged():
    rng = make_rng(9, 0)
    res = fit_exp_tilting(rng.standard_normal((200, 2)), rng.standard_normal((200, 2)))
    assert res.diagnostics["unstable_direction"]


def test_exp_tilting_separation():
    X = np.column_stack([np.linspace(2, 3, 20), np.linspace(0, 1, 20) ** 2])
    Y = np.column_stack([np.linspace(-3, -2, 20), np.linspace(0, 1, 20)])
    with pytest.raises(Separation):
        fit_exp_tilting(X, Y)


def test_exp_tilting_rank_deficient():
    rng = make_rng(1, 0)
    X = rng.standard_normal((30, 1))
    Y = rng.standard_normal((30, 1))
    with pytest.raises(RankDeficient):
        fit_exp_tilting(np.hstack([X, 2 * X]), np.hstack([Y, 2 * Y]))


def test_exp_tilting_recovers_truth_at_large_n():
    errors = []
    for r in range(20):
        X, Y = generate_ex1(1.0, 600, 600, make_rng(r, 7))
        b = fit_exp_tilting(X, Y).beta_unit
        errors.append(np.linalg.norm(b - TRUE_DIRECTIONS["ex1"]))
    assert np.median(errors) < 0.1


def test_angle_round_trip(rng):
    for d in (2, 3, 5):
        v = rng.standard_normal(d)
        v /= np.linalg.norm(v)
        np.testing.assert_allclose(_angles_to_unit(_unit_to_angles(v)), v, atol=1e-12)


def test_mh_one_dimensional_sign():
    rng = make_rng(2, 0)
    res = fit_mh_auc(rng.normal(-1, 1, (40, 1)), rng.normal(0, 1, (40, 1)))
    assert res.beta_unit.tolist() == [-1.0]
    assert res.diagnostics["empirical_auc"] >= 0.5


def test_mh_separated_axis():
    rng = make_rng(3, 0)
    X = np.column_stack([rng.uniform(2, 3, 60), rng.standard_normal(60)])
    Y = np.column_stack([rng.uniform(-1, 0, 60), rng.standard_normal(60)])
    res = fit_mh_auc(X, Y)
    assert np.linalg.norm(res.beta_unit - [1.0, 0.0]) < 0.05


def test_mh_improves_on_start_and_is_unit():
    X, Y = generate_ex1(0.9, 120, 120, make_rng(4, 0))
    res = fit_mh_auc(X, Y)
    assert res.diagnostics["objective"] >= res.diagnostics["start_objective"]
    assert np.linalg.norm(res.beta_unit) == pytest.approx(1.0, abs=1e-12)
    assert res.beta_unit @ fit_exp_tilting(X, Y).beta_unit >= 0


def test_smoothed_auc_shift_invariant(rng):
    X = rng.standard_normal((20, 2))
    Y = rng.standard_normal((25, 2))
    beta = np.array([0.6, 0.8])
    shift = np.array([3.0, -7.0])
    assert smoothed_auc(beta, X + shift, Y + shift, 0.1) == pytest.approx(smoothed_auc(beta, X, Y, 0.1), abs=1e-14)


def test_smoothed_auc_approaches_empirical(rng):
    X = rng.normal(1, 1, (50, 2))
    Y = rng.normal(0, 1, (60, 2))
    beta = np.array([1.0, 1.0]) / np.sqrt(2)
    assert smoothed_auc(beta, X, Y, 1e-8) == pytest.approx(empirical_auc(X @ beta, Y @ beta), abs=1e-12)
