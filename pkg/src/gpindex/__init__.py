"""Generalized poverty indices: finite-sample values, limit laws and Monte Carlo checks."""

from .asymptotics import LimitLaw, covariance, kernel_for, limit_law
from .engine import GPIConfig, Transform, builtin_config, evaluate_gpi, weight_profile
from .inference import ConfidenceInterval, bootstrap_ci, plugin_ci
from .models import Exponential, LogNormal, Pareto, Uniform, builtin_model, draw_sample, parse_model_spec
from .montecarlo import SimulationPlan, SimulationReport, coverage_rate, ks_statistic, run_simulation
from .sample import IncomeSample, IndexId, PovertyContext, compute_closed_form

__version__ = "0.1.0"

__all__ = [
    "LimitLaw", "covariance", "kernel_for", "limit_law",
    "GPIConfig", "Transform", "builtin_config", "evaluate_gpi", "weight_profile",
    "ConfidenceInterval", "bootstrap_ci", "plugin_ci",
    "Exponential", "LogNormal", "Pareto", "Uniform", "builtin_model", "draw_sample", "parse_model_spec",
    "SimulationPlan", "SimulationReport", "coverage_rate", "ks_statistic", "run_simulation",
    "IncomeSample", "IndexId", "PovertyContext", "compute_closed_form",
]
