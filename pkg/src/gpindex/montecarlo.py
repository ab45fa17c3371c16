"""Seeded Monte Carlo checks of the asymptotic normal laws and of interval coverage.

Replicate ``r`` draws its sample from ``numpy.random.default_rng([seed, r])``,
so a plan produces the same report whatever the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .asymptotics import LimitLaw, limit_law
from .engine import builtin_config, evaluate_gpi_sorted
from .inference import bootstrap_ci, plugin_ci
from .models import DistributionModel, draw_sorted
from .sample import IncomeSample, IndexId, PovertyContext, _as_index, closed_form_from_sorted

__all__ = [
    "SimulationPlan",
    "SimulationReport",
    "simulate_statistics",
    "run_simulation",
    "ks_statistic",
    "coverage_rate",
]

CI_METHODS = ("plugin", "bootstrap")
ENGINES = ("closed", "gpi")


@dataclass(frozen=True)
class SimulationPlan:
    model: DistributionModel
    Z: float
    index: IndexId
    n: int
    reps: int
    seed: int = 0
    ci_method: str | None = None
    level: float = 0.95
    engine: str = "closed"
    bootstrap_reps: int = 199
    corrected: bool = True

    def __post_init__(self):
        object.__setattr__(self, "index", _as_index(self.index))
        if self.reps < 100:
            raise ValueError(f"reps must be at least 100, got {self.reps}")
        if self.n < 50:
            raise ValueError(f"n must be at least 50, got {self.n}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.ci_method is not None and self.ci_method not in CI_METHODS:
            raise ValueError(f"ci_method must be one of {CI_METHODS}, got {self.ci_method!r}")
        if not 0 < self.level < 1:
            raise ValueError(f"level must lie in (0, 1), got {self.level}")
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.ci_method == "bootstrap" and self.bootstrap_reps < 100:
            raise ValueError("bootstrap needs at least 100 resamples")


@dataclass(frozen=True)
class SimulationReport:
    mean_std: float
    var_std: float
    ks_distance: float
    coverage: float | None
    reps_effective: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "mean_std": self.mean_std,
            "var_std": self.var_std,
            "ks_distance": self.ks_distance,
            "coverage": self.coverage,
            "reps_effective": self.reps_effective,
            "seed": self.seed,
        }


def ks_statistic(values) -> float:
    """Kolmogorov distance between the empirical CDF of ``values`` and N(0, 1)."""
    x = np.sort(np.asarray(values, dtype=float).ravel())
    m = x.size
    if m < 2:
        raise ValueError("ks_statistic needs at least 2 values")
    if not np.all(np.isfinite(x)):
        raise ValueError("ks_statistic needs finite values")
    phi = stats.norm.cdf(x)
    above = np.arange(1, m + 1) / m - phi
    below = phi - np.arange(m) / m
    return float(min(1.0, max(above.max(), below.max(), 0.0)))


def _evaluator(plan: SimulationPlan):
    if plan.engine == "gpi":
        cfg = builtin_config(plan.index)
        return lambda y: evaluate_gpi_sorted(cfg, y, plan.Z)
    return lambda y: closed_form_from_sorted(plan.index, y, plan.Z)


def _replicate(plan: SimulationPlan, r: int, center: float | None):
    rng = np.random.default_rng([plan.seed, r])
    y = draw_sorted(plan.model, plan.n, rng)
    value = _evaluator(plan)(y)
    if plan.ci_method is None:
        return value, None
    sample = IncomeSample(y, y0=plan.model.y0)
    ctx = PovertyContext(plan.Z, plan.model.y0)
    if plan.ci_method == "plugin":
        ci = plugin_ci(plan.index, sample, ctx, plan.level)
    else:
        ci = bootstrap_ci(plan.index, sample, ctx, plan.level, B=plan.bootstrap_reps, seed=[plan.seed, r, 1])
    return value, ci.contains(center)


def _replicate_block(args):
    plan, rs, center = args
    return [_replicate(plan, r, center) for r in rs]


def _run(plan: SimulationPlan, center, workers):
    if workers is None or workers <= 1:
        return [_replicate(plan, r, center) for r in range(1, plan.reps + 1)]
    blocks = np.array_split(np.arange(1, plan.reps + 1), 4 * workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_replicate_block, [(plan, [int(r) for r in b], center) for b in blocks])
        return [item for part in parts for item in part]


def simulate_statistics(plan: SimulationPlan, *, workers: int | None = None) -> np.ndarray:
    """Raw index values for replicates ``1..reps`` in replicate order."""
    bare = SimulationPlan(plan.model, plan.Z, plan.index, plan.n, plan.reps, plan.seed,
                          engine=plan.engine)
    return np.array([v for v, _ in _run(bare, None, workers)])


def _theory(plan: SimulationPlan) -> LimitLaw:
    law = limit_law(plan.index, plan.model, plan.Z, corrected=plan.corrected)
    if not law.transformed_variance > 0:
        raise ValueError(f"asymptotic variance of {plan.index} is zero; standardization undefined")
    return law


def run_simulation(plan: SimulationPlan, *, workers: int | None = None,
                   law: LimitLaw | None = None) -> SimulationReport:
    """Standardize ``reps`` simulated index values with the theoretical limit law.

    The statistic is ``sqrt(n) (J - center) / sd`` where ``center`` and ``sd``
    come from :func:`gpindex.asymptotics.limit_law` (after the outer
    transform for Chu). When ``plan.ci_method`` is set the report also gives
    the fraction of intervals covering the theoretical center.

    ``law`` overrides the theoretical limit law, e.g. to test an alternative
    variance on the same draws.
    """
    law = _theory(plan) if law is None else law
    center = law.transformed_center
    sd = math.sqrt(law.transformed_variance)
    results = _run(plan, center, workers)
    values = np.array([v for v, _ in results])
    z = math.sqrt(plan.n) * (values - center) / sd
    coverage = None
    if plan.ci_method is not None:
        coverage = float(np.mean([c for _, c in results]))
    return SimulationReport(
        mean_std=float(np.mean(z)),
        var_std=float(np.var(z, ddof=1)),
        ks_distance=ks_statistic(z),
        coverage=coverage,
        reps_effective=int(values.size),
        seed=int(plan.seed),
    )


def coverage_rate(plan: SimulationPlan, *, workers: int | None = None) -> float:
    """Fraction of replicate intervals that contain the theoretical center."""
    if plan.ci_method is None:
        raise ValueError("coverage_rate needs a plan with ci_method set")
    law = _theory(plan)
    results = _run(plan, law.transformed_center, workers)
    return float(np.mean([c for _, c in results]))
