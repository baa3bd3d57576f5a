"""Combining biomarkers under a monotone density ratio model by maximum smoothed likelihood."""

from .baselines import BaselineResult, fit_exp_tilting, fit_mh_auc
from .bootstrap import BootstrapReport, bootstrap_se
from .data import Dataset, ingest_pancreatic_csv, load_labeled_csv
from .estimator import FitConfig, FitResult, density_at, fit, profile_objective
from .isotonic import IsotonicProblem, StepFunction, solve_pava, step_eval, theta_beta
from .kernels import KernelModel, get_kernel, kde_eval, l1_smoothing_bias, normal_reference_bandwidth
from .methods import METHODS, MethodEstimate, estimate
from .roc import RocCurve, auc, fit_roc, mann_whitney, roc_curve, roc_l2_distance, score_cdfs
from .sampling import MonteCarloCloud, build_cloud, make_rng, sample_from_kde, sample_from_kernel
from .simulation import BenchReport, GroundTruth, ScenarioSpec, generate_ex1, generate_ex2, ground_truth, run_benchmark

__version__ = "0.1.0"

__all__ = [
    "BaselineResult", "fit_exp_tilting", "fit_mh_auc",
    "BootstrapReport", "bootstrap_se",
    "Dataset", "ingest_pancreatic_csv", "load_labeled_csv",
    "FitConfig", "FitResult", "density_at", "fit", "profile_objective",
    "IsotonicProblem", "StepFunction", "solve_pava", "step_eval", "theta_beta",
    "KernelModel", "get_kernel", "kde_eval", "l1_smoothing_bias", "normal_reference_bandwidth",
    "METHODS", "MethodEstimate", "estimate",
    "RocCurve", "auc", "fit_roc", "mann_whitney", "roc_curve", "roc_l2_distance", "score_cdfs",
    "MonteCarloCloud", "build_cloud", "make_rng", "sample_from_kde", "sample_from_kernel",
    "BenchReport", "GroundTruth", "ScenarioSpec", "generate_ex1", "generate_ex2", "ground_truth", "run_benchmark",
]
