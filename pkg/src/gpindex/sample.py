"""Finite-sample poverty indices computed directly from an income sample.

Every index here is evaluated from its own closed-form definition; the
generic weighted-gap evaluator lives in :mod:`gpindex.engine` and is checked
against these functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "IncomeSample",
    "PovertyContext",
    "GapVector",
    "IndexId",
    "INDEX_NAMES",
    "GPI_FAMILY",
    "count_poor",
    "poverty_gaps",
    "mean_poverty_gap",
    "censored_mean",
    "compute_closed_form",
    "closed_form_from_sorted",
    "takayama",
]


@dataclass(frozen=True)
class IncomeSample:
    """Incomes sorted ascending, all at or above the support endpoint ``y0``."""

    incomes: np.ndarray
    y0: float = 0.0

    def __post_init__(self):
        y = np.sort(np.asarray(self.incomes, dtype=float).ravel())
        if y.size == 0:
            raise ValueError("an income sample needs at least one observation")
        if not np.all(np.isfinite(y)):
            raise ValueError("incomes must be finite")
        if self.y0 < 0:
            raise ValueError(f"y0 must be non-negative, got {self.y0}")
        if y[0] < self.y0:
            raise ValueError(f"income {y[0]} lies below the lower endpoint y0={self.y0}")
        y.flags.writeable = False
        object.__setattr__(self, "incomes", y)
        object.__setattr__(self, "y0", float(self.y0))

    @property
    def n(self) -> int:
        return int(self.incomes.size)


@dataclass(frozen=True)
class PovertyContext:
    """Poverty line ``Z``; an individual is poor when their income is strictly below it."""

    Z: float
    y0: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.Z) or self.Z <= self.y0:
            raise ValueError(f"poverty line Z={self.Z} must exceed y0={self.y0}")


@dataclass(frozen=True)
class GapVector:
    Q: int
    gaps: np.ndarray = field(repr=False)


INDEX_NAMES = (
    "headcount", "fgt", "watts", "chakravarty", "chu", "ray",
    "sen", "kakwani", "shorrocks", "thon", "takayama",
)
# indices that the generic evaluator reproduces directly
GPI_FAMILY = ("fgt", "ray", "chu", "sen", "kakwani", "shorrocks", "thon")


@dataclass(frozen=True)
class IndexId:
    """An index name plus its parameter.

    ``alpha`` parametrizes fgt, chakravarty, chu and ray; ``k`` parametrizes
    kakwani.  ``headcount`` is stored as ``fgt`` with ``alpha=0`` and ``sen``
    keeps its own name but behaves as ``kakwani`` with ``k=1``.
    """

    name: str
    alpha: float | None = None
    k: float | None = None

    def __post_init__(self):
        name = self.name.lower()
        if name not in INDEX_NAMES:
            raise ValueError(f"unknown index {self.name!r}; expected one of {', '.join(INDEX_NAMES)}")
        alpha, k = self.alpha, self.k
        if name == "headcount":
            name, alpha = "fgt", 0.0
        if name in ("fgt", "chakravarty", "chu", "ray"):
            if alpha is None:
                alpha = {"fgt": 0.0, "chakravarty": 0.5, "chu": 0.5, "ray": 2.0}[name]
            alpha = float(alpha)
            ok = {
                "fgt": alpha >= 0,
                "chakravarty": 0 < alpha < 1,
                "chu": 0 < alpha <= 1,
                "ray": alpha > 0,
            }[name]
            if not ok or not math.isfinite(alpha):
                raise ValueError(f"alpha={alpha} outside the admissible range for {name}")
        else:
            alpha = None
        if name == "kakwani":
            k = 1.0 if k is None else float(k)
            if not (k >= 0 and math.isfinite(k)):
                raise ValueError(f"kakwani requires a finite k >= 0, got {k}")
        elif name == "sen":
            k = 1.0
        else:
            k = None
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "k", k)

    def __str__(self):
        if self.alpha is not None:
            return f"{self.name}({self.alpha:g})"
        if self.name == "kakwani":
            return f"kakwani({self.k:g})"
        return self.name


def _as_index(index) -> IndexId:
    return index if isinstance(index, IndexId) else IndexId(index)


def count_poor(sample: IncomeSample, ctx: PovertyContext) -> int:
    """Number of incomes strictly below the poverty line."""
    return int(np.searchsorted(sample.incomes, ctx.Z, side="left"))


def poverty_gaps(sample: IncomeSample, ctx: PovertyContext) -> GapVector:
    """Relative gaps ``(Z - Y_j)/Z`` of the poor, largest first."""
    Q = count_poor(sample, ctx)
    gaps = (ctx.Z - sample.incomes[:Q]) / ctx.Z
    return GapVector(Q, gaps)


def mean_poverty_gap(sample: IncomeSample, ctx: PovertyContext) -> float:
    """Average absolute shortfall ``g`` over the poor, in currency units."""
    Q = count_poor(sample, ctx)
    if Q == 0:
        raise ValueError("no poor individuals; g undefined")
    return float(np.mean(ctx.Z - sample.incomes[:Q]))


def censored_mean(sample: IncomeSample, ctx: PovertyContext) -> float:
    """Mean of ``min(Y_i, Z)`` over the whole sample."""
    return float(np.mean(np.minimum(sample.incomes, ctx.Z)))


def takayama(sample: IncomeSample, ctx: PovertyContext) -> float:
    """Takayama index ``1 + 1/n - 2/(mu n^2) sum_j (n - j + 1) Y_j`` over the poor.

    ``mu`` is the censored mean; a zero censored mean raises ``ValueError``.
    """
    return _takayama_sorted(sample.incomes, ctx.Z)


def _takayama_sorted(y, Z):
    n = y.size
    mu = float(np.mean(np.minimum(y, Z)))
    if mu <= 0:
        raise ValueError("degenerate censored mean: every censored income is zero")
    Q = int(np.searchsorted(y, Z, side="left"))
    j = np.arange(1, Q + 1)
    s = float(np.sum((n - j + 1) * y[:Q]))
    return 1.0 + 1.0 / n - 2.0 * s / (mu * n * n)


def closed_form_from_sorted(index: IndexId, y: np.ndarray, Z: float) -> float:
    """Closed-form index value on an already sorted income array.

    This is the workhorse behind :func:`compute_closed_form`; the Monte Carlo
    and bootstrap loops call it directly to skip sample validation.
    """
    name = index.name
    if name == "takayama":
        return _takayama_sorted(y, Z)
    n = y.size
    Q = int(np.searchsorted(y, Z, side="left"))
    if Q == 0:
        return 0.0
    poor = y[:Q]
    gaps = (Z - poor) / Z
    if name == "fgt":
        if index.alpha == 0:
            return Q / n
        return float(np.sum(gaps ** index.alpha)) / n
    if name == "watts":
        if poor[0] <= 0:
            raise ValueError("log divergence: Watts index needs strictly positive poor incomes")
        return float(np.sum(np.log(Z / poor))) / n
    if name == "chakravarty":
        return float(np.sum(1.0 - (poor / Z) ** index.alpha)) / n
    if name == "chu":
        a = index.alpha
        return Q / (n * Z) * float(np.mean((Z - poor) ** a)) ** (1.0 / a)
    if name == "ray":
        a = index.alpha
        g = float(np.mean(Z - poor))
        return g / (n * Z) * float(np.sum(((Z - poor) / g) ** a))
    if name in ("sen", "kakwani"):
        k = index.k
        j = np.arange(1, Q + 1, dtype=float)
        phi = float(np.sum(j ** k))
        return Q / (n * phi) * float(np.sum((Q - j + 1) ** k * gaps))
    if name == "shorrocks":
        j = np.arange(1, Q + 1, dtype=float)
        return float(np.sum((2 * n - 2 * j + 1) * gaps)) / (n * n)
    if name == "thon":
        j = np.arange(1, Q + 1, dtype=float)
        return 2.0 / (n * (n + 1)) * float(np.sum((n - j + 1) * gaps))
    raise ValueError(f"no closed form registered for {index}")


def compute_closed_form(index, sample: IncomeSample, ctx: PovertyContext) -> float:
    """Evaluate ``index`` on ``sample`` from its defining formula.

    Parameters
    ----------
    index : IndexId or str
        Index to evaluate. A bare string uses the default parameter.
    sample : IncomeSample
    ctx : PovertyContext

    Returns
    -------
    float
        The index value; every index is 0 when nobody is poor, except
        Takayama which is ``1 + 1/n`` in that case.
    """
    return closed_form_from_sorted(_as_index(index), sample.incomes, ctx.Z)
