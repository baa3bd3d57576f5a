"""Ingest a pancreatic biomarker CSV, fit, and bootstrap the standard errors.

By default the synthetic fixture shipped with the tests is used. Point
``MSLCOMBINE_PANCREATIC_CSV`` at the real urinary biomarker file to run the
same pipeline on it.
"""

import os
from pathlib import Path

from mslcombine import FitConfig, bootstrap_se, estimate, ingest_pancreatic_csv

default = Path(__file__).resolve().parents[1] / "tests" / "data" / "pancreatic_synthetic.csv"
path = Path(os.environ.get("MSLCOMBINE_PANCREATIC_CSV", default))
ds = ingest_pancreatic_csv(path)
print(f"{path.name}: n={ds.n} cancer, m={ds.m} controls, dropped {ds.dropped_missing} incomplete rows")
print("features", ds.feature_names, "(LYVE1 scaled by 100)")

config = FitConfig(n_monte_carlo=3000, seed=2)
full = estimate("msl", ds.X, ds.Y, config)
print("beta_unit", full.beta_unit.round(4), "AUC", round(full.auc, 4))

# B=300 is the usual choice; 20 keeps the demo short.
rep = bootstrap_se(ds, config, B=20, method="msl", full=full)
print("bootstrap SE", rep.se.round(4), "AUC SE", round(rep.auc_se, 4), "failures", rep.failures)
