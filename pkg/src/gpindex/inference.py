"""Confidence intervals for poverty indices from a single income sample."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .asymptotics import LIMIT_LAW_INDICES, limit_law
from .models import DistributionModel
from .sample import IncomeSample, PovertyContext, _as_index, closed_form_from_sorted, count_poor

__all__ = [
    "ConfidenceInterval",
    "EmpiricalModel",
    "empirical_quantile",
    "empirical_quantile_derivative",
    "plugin_variance",
    "plugin_ci",
    "bootstrap_ci",
    "bootstrap_values",
    "PLUGIN_GRID",
]

PLUGIN_GRID = 512
SMALL_POOR_COUNT = 30


@dataclass(frozen=True)
class ConfidenceInterval:
    estimate: float
    se: float
    level: float
    lo: float
    hi: float
    method: str
    n: int

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "se": self.se,
            "level": self.level,
            "lo": self.lo,
            "hi": self.hi,
            "method": self.method,
            "n": self.n,
        }


def _quantile_sorted(y, p):
    # Y_(ceil(n p)), 1-based, clamped into the sample
    n = y.size
    idx = np.clip(np.ceil(np.asarray(p, dtype=float) * n - 1e-9).astype(int), 1, n)
    return y[idx - 1]


def empirical_quantile(sample: IncomeSample, p):
    """Order-statistic quantile ``Y_(ceil(n p))``."""
    out = _quantile_sorted(sample.incomes, p)
    return out if np.ndim(out) else float(out)


def _derivative_sorted(y, s, bandwidth=None):
    n = y.size
    if n < 10:
        raise ValueError("sample too small for derivative estimation (need n >= 10)")
    b = n ** -0.2 if bandwidth is None else float(bandwidth)
    s = np.asarray(s, dtype=float)
    lo = np.maximum(s - b, 1.0 / n)
    hi = np.minimum(s + b, 1.0 - 1.0 / n)
    return (_quantile_sorted(y, hi) - _quantile_sorted(y, lo)) / (hi - lo)


def empirical_quantile_derivative(sample: IncomeSample, s, bandwidth=None):
    """Central-difference estimate of the quantile density ``a(s)``.

    The window ``[s - b, s + b]`` uses ``b = n**(-1/5)`` by default and is
    clamped to ``[1/n, 1 - 1/n]``; the difference quotient divides by the
    clamped width.
    """
    out = _derivative_sorted(sample.incomes, s, bandwidth)
    return out if np.ndim(out) else float(out)


class EmpiricalModel(DistributionModel):
    """Step-function stand-in for a parametric model, built from a sample."""

    name = "empirical"

    def __init__(self, sample: IncomeSample, bandwidth=None):
        self._y = sample.incomes
        self.bandwidth = bandwidth
        self.params = (sample.n,)

    @property
    def y0(self):
        return float(self._y[0])

    def cdf(self, y):
        return np.searchsorted(self._y, np.asarray(y, dtype=float), side="right") / self._y.size

    def quantile(self, s):
        return _quantile_sorted(self._y, s)

    def quantile_derivative(self, s):
        return _derivative_sorted(self._y, s, self.bandwidth)

    def __repr__(self):
        return f"EmpiricalModel(n={self._y.size})"


def plugin_variance(index, sample: IncomeSample, ctx: PovertyContext, *, grid=PLUGIN_GRID, bandwidth=None):
    """Asymptotic variance of ``index`` with every ingredient estimated from ``sample``.

    The headcount is ``Q/n``; quantiles and the quantile density come from
    :class:`EmpiricalModel`; every integral uses a fixed midpoint grid.
    """
    index = _as_index(index)
    if index.name not in LIMIT_LAW_INDICES:
        raise ValueError(f"no plug-in variance for {index}")
    n = sample.n
    Q = count_poor(sample, ctx)
    if Q < 2:
        raise ValueError(f"insufficient poor observations (Q={Q}, need at least 2)")
    if Q < SMALL_POOR_COUNT:
        warnings.warn(f"only {Q} poor observations; the plug-in variance may be unreliable", stacklevel=2)
    if Q == n:
        raise ValueError("every observation is poor; the headcount variance is degenerate")
    law = limit_law(index, EmpiricalModel(sample, bandwidth), ctx.Z, grid=grid, q=Q / n, check_tail=False)
    return law.transformed_variance


def _z(level):
    if not 0 < level < 1:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    return float(stats.norm.ppf(0.5 + level / 2))


def plugin_ci(index, sample: IncomeSample, ctx: PovertyContext, level: float = 0.95, *,
              grid=PLUGIN_GRID, bandwidth=None) -> ConfidenceInterval:
    """Normal-approximation interval with the plug-in asymptotic variance."""
    index = _as_index(index)
    z = _z(level)
    estimate = closed_form_from_sorted(index, sample.incomes, ctx.Z)
    var = plugin_variance(index, sample, ctx, grid=grid, bandwidth=bandwidth)
    se = math.sqrt(max(var, 0.0) / sample.n)
    return ConfidenceInterval(estimate, se, level, estimate - z * se, estimate + z * se, "plugin", sample.n)


_BOOT_CHUNK = 2_000_000  # resampled incomes held in memory at once


def _row_values(index, ys: np.ndarray, Z: float) -> np.ndarray:
    # index value for each row of a (rows, n) matrix of incomes
    name = index.name
    n = ys.shape[1]
    if name in ("fgt", "watts", "chakravarty"):
        poor = ys < Z
        safe = np.where(poor, ys, Z)
        if name == "fgt":
            if index.alpha == 0:
                return poor.sum(axis=1) / n
            terms = ((Z - safe) / Z) ** index.alpha
        elif name == "watts":
            if np.any(safe <= 0):
                raise ValueError("log divergence: Watts index needs strictly positive poor incomes")
            terms = np.log(Z / safe)
        else:
            terms = 1.0 - (safe / Z) ** index.alpha
        return np.where(poor, terms, 0.0).sum(axis=1) / n
    ys = np.sort(ys, axis=1)
    return np.array([closed_form_from_sorted(index, row, Z) for row in ys])


def bootstrap_values(index, y: np.ndarray, Z: float, B: int, seed) -> np.ndarray:
    """Index values on ``B`` resamples (with replacement) of the sorted array ``y``.

    ``seed`` may be an int or a sequence of ints; equal seeds give equal draws.
    """
    index = _as_index(index)
    n = y.size
    rng = np.random.default_rng(seed)
    rows = max(1, _BOOT_CHUNK // n)
    out = np.empty(B)
    for start in range(0, B, rows):
        m = min(rows, B - start)
        out[start:start + m] = _row_values(index, y[rng.integers(0, n, size=(m, n))], Z)
    return out


def bootstrap_ci(index, sample: IncomeSample, ctx: PovertyContext, level: float = 0.95,
                 B: int = 999, seed=0) -> ConfidenceInterval:
    """Percentile bootstrap interval.

    The reported ``se`` is the standard deviation of the resampled values.
    The interval is widened, if needed, to contain the point estimate.
    """
    index = _as_index(index)
    if B < 100:
        raise ValueError(f"bootstrap needs at least 100 resamples, got {B}")
    if not 0 < level < 1:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    y = sample.incomes
    estimate = closed_form_from_sorted(index, y, ctx.Z)
    values = bootstrap_values(index, y, ctx.Z, B, seed)
    lo, hi = np.quantile(values, [0.5 - level / 2, 0.5 + level / 2])
    se = float(np.std(values, ddof=1))
    return ConfidenceInterval(estimate, se, level, min(float(lo), estimate), max(float(hi), estimate),
                              "bootstrap", sample.n)
