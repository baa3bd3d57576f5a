import json

import numpy as np
import pytest

from mslcombine.cli import main
from mslcombine.estimator import FitConfig
from mslcombine.methods import estimate
from mslcombine.serialize import load_fit


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def data_csv(tmp_path, capsys):
    path = tmp_path / "d.csv"
    assert _run(capsys, "simulate", "--rho", 0.9, "--n", 80, "--m", 90, "--seed", 4, "--out", path)[0] == 0
    return path


def test_fit_and_roc_round_trip(tmp_path, capsys, data_csv):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"N_monte_carlo": 800, "multi_start": 2}))
    fit_file = tmp_path / "fit.json"
    code, out, _ = _run(capsys, "fit", "--method", "msl", "--data", data_csv, "--label-col", "label",
                        "--config", cfg, "--seed", 3, "--out", fit_file)
    assert code == 0
    summary = json.loads(out)
    assert (tmp_path / "fit_theta.csv").read_text().startswith("knot,value\n")

    roc_file = tmp_path / "roc.csv"
    code, out, _ = _run(capsys, "roc", "--fit", fit_file, "--out", roc_file)
    assert code == 0
    assert json.loads(out)["auc"] == summary["auc"]
    assert len(roc_file.read_text().splitlines()) == 1002

    est, X, Y, config = load_fit(fit_file)
    direct = estimate("msl", X, Y, FitConfig(n_monte_carlo=800, n_starts=2, seed=3))
    assert abs(est.auc - direct.auc) <= 1e-12
    np.testing.assert_array_equal(est.beta_unit, direct.beta_unit)


@pytest.mark.parametrize("method", ["exp_tilting", "mh"])
def test_baseline_fit(tmp_path, capsys, data_csv, method):
    out_file = tmp_path / "fit.json"
    assert _run(capsys, "fit", "--method", method, "--data", data_csv, "--out", out_file)[0] == 0
    code, out, _ = _run(capsys, "roc", "--fit", out_file, "--out", tmp_path / "roc.csv")
    assert code == 0 and 0.5 < json.loads(out)["auc"] <= 1.0


def test_pancreatic_format(tmp_path, capsys, pancreatic_fixture):
    code, out, _ = _run(capsys, "fit", "--method", "exp_tilting", "--format", "pancreatic",
                        "--data", pancreatic_fixture, "--out", tmp_path / "f.json")
    assert code == 0
    summary = json.loads(out)
    assert (summary["n"], summary["m"], summary["dropped_missing"]) == (83, 326, 2)


def test_bootstrap_and_bench(tmp_path, capsys, data_csv):
    code, out, _ = _run(capsys, "bootstrap", "--data", data_csv, "--method", "exp_tilting", "--B", 5,
                        "--out", tmp_path / "b.json")
    assert code == 0 and json.loads(out)["B"] == 5
    code, _, _ = _run(capsys, "bench", "--replicates", 2, "--rho", 0.9, "--n", 60, "--m", 60, "--n-monte-carlo", 300,
                      "--oracle-size", 5000, "--method", "msl,exp_tilting", "--out", tmp_path / "bench.csv")
    assert code == 0
    assert len((tmp_path / "bench.csv").read_text().splitlines()) == 5
    assert (tmp_path / "bench_summary.json").exists() and (tmp_path / "bench_roc.csv").exists()


def test_usage_errors(tmp_path, capsys):
    code, _, err = _run(capsys, "fit", "--out", tmp_path / "x.json")
    assert code == 1
    assert json.loads(err.strip().splitlines()[-1])["error"] == "usage"
    code, _, err = _run(capsys, "fit", "--data", "x.csv")
    assert code == 1 and "usage:" in err
    assert _run(capsys, "nonsense")[0] == 1
    assert _run(capsys, "fit", "--example", "ex1", "--method", "svm", "--out", tmp_path / "x.json")[0] == 1


def test_data_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("x1,label\n1,1\nfoo,0\n")
    code, _, err = _run(capsys, "fit", "--data", bad, "--out", tmp_path / "f.json")
    assert code == 2
    line = json.loads(err.strip())
    assert line["type"] == "ParseError" and "row 3" in line["message"]
    assert _run(capsys, "fit", "--data", tmp_path / "missing.csv", "--out", tmp_path / "f.json")[0] == 2


def test_numerical_error_exit(tmp_path, capsys):
    sep = tmp_path / "sep.csv"
    sep.write_text("x1,x2,label\n" + "".join(f"{2 + i / 10},{(i / 10) ** 2},1\n" for i in range(10))
                   + "".join(f"{-2 - i / 10},{i / 10},0\n" for i in range(10)))
    code, _, err = _run(capsys, "fit", "--method", "exp_tilting", "--data", sep, "--out", tmp_path / "f.json")
    assert code == 3
    assert json.loads(err.strip())["type"] == "Separation"
