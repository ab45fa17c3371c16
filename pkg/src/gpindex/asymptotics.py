"""Limit laws of weighted-gap poverty indices under a parametric income model.

For a weight limit ``L`` on ``(0, q)``, ``q = G(Z)``, a gap deformation
``d`` and the deficit curve ``Delta(s) = (Z - G^-1(s)) / Z``, the inner
statistic ``J_n`` satisfies ``sqrt(n) (J_n - D) -> N(0, var)`` where

    D   = int_0^q L(s) d(Delta(s)) ds
    var = Var( (1/Z) int_0^q psi(s) B(s) ds + b B(q) )

with ``B`` a Brownian bridge, ``psi = L * a * d'(Delta)`` and
``b = L(q) d(0) + int_0^q gamma(s) d(Delta(s)) ds``.  ``gamma`` captures how
the empirical weights move with the estimated headcount.

Indices built from several such statistics (CHU, Ray) are handled by the
delta method over the jointly Gaussian limits.

Numerically the bridge quadratic form is evaluated through tail integrals
``Psi(t) = int_t^q psi``:

    int int psi1(u) psi2(v) (min(u, v) - u v) du dv
        = int_0^q Psi1 Psi2 dt - (int_0^q Psi1 dt) (int_0^q Psi2 dt)

Since ``a(s) d'(Delta(s)) = -Z d/ds d(Delta(s))``, integrating by parts gives
``Psi`` in terms of ``d(Delta)`` itself, which stays bounded even when
``d'`` blows up at the poverty line.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .models import DistributionModel, probe_tail_exponent
from .quadrature import integrate_1d, midpoint_grid
from .sample import IndexId, _as_index

__all__ = [
    "AsymptoticKernel",
    "GaussianFunctional",
    "LimitLaw",
    "make_kernel",
    "kernel_for",
    "functional_for",
    "combine",
    "covariance",
    "covariance_matrix",
    "limit_law",
    "LIMIT_LAW_INDICES",
]

LIMIT_LAW_INDICES = ("fgt", "sen", "kakwani", "shorrocks", "thon", "chu", "ray")

TOL_1D = 1e-10


class _Adaptive:
    """Integrals over ``(0, q)`` by adaptive Gauss-Kronrod."""

    def __init__(self, q, tol=TOL_1D):
        self.q = q
        self.tol = tol

    def integral(self, f):
        return integrate_1d(f, 0.0, self.q, self.tol)

    def first_moment(self, F):
        # int_0^q s psi(s) ds = int_0^q Psi(t) dt
        if F.tail is None:
            return self.integral(lambda s: s * F.psi(s))
        return self.integral(F.tail)

    def bridge_form(self, F1, F2):
        if F1.tail is None or F2.tail is None:
            return self._bridge_form_nested(F1.psi, F2.psi)
        cross = self.integral(lambda t: F1.tail(t) * F2.tail(t))
        return cross - self.first_moment(F1) * self.first_moment(F2)

    def _bridge_form_nested(self, psi1, psi2):
        # diagonal split: inner(u) = (1 - u) int_0^u v psi2 + u int_u^q (1 - v) psi2
        q, tol = self.q, self.tol

        def inner(u):
            left = integrate_1d(lambda v: v * psi2(v), 0.0, u, tol)
            right = integrate_1d(lambda v: (1.0 - v) * psi2(v), u, q, tol)
            return (1.0 - u) * left + u * right

        return integrate_1d(lambda u: psi1(u) * inner(u), 0.0, q, tol)


class _Grid:
    """Integrals over ``(0, q)`` by a fixed midpoint rule on the densities.

    Nodes follow ``s = q (1 - (1 - u)**2)`` with ``u`` on a uniform midpoint
    grid, which clusters them toward ``q``.  That cancels the
    ``(q - s)**(alpha - 1)`` blow-up of ``d'`` for ``alpha >= 1/2`` and keeps
    second-order accuracy on smooth integrands.
    """

    GRADE = 2.0

    def __init__(self, q, size=512):
        self.q = q
        u, du = midpoint_grid(0.0, 1.0, size)
        p = self.GRADE
        self.nodes = q * (1.0 - (1.0 - u) ** p)
        self.weights = q * p * (1.0 - u) ** (p - 1.0) * du
        u = self.nodes
        self._kernel = np.minimum.outer(u, u) - np.multiply.outer(u, u)

    def integral(self, f):
        return float(np.sum(np.asarray(f(self.nodes), dtype=float) * self.weights))

    def first_moment(self, F):
        return self.integral(lambda s: s * F.psi(s))

    def bridge_form(self, F1, F2):
        p1 = np.asarray(F1.psi(self.nodes), dtype=float) * self.weights
        p2 = np.asarray(F2.psi(self.nodes), dtype=float) * self.weights
        return float(p1 @ self._kernel @ p2)


class _PanelAntiderivative:
    """``t -> int_t^q f`` from Chebyshev fits of ``f`` on panels graded toward both ends.

    The two end panels are tiny and handled by adaptive quadrature, which
    absorbs integrable endpoint singularities.  ``ok`` is False when spot
    checks against adaptive quadrature disagree; callers then fall back.
    """

    def __init__(self, f, q, depth=40, order=32):
        self.f, self.q = f, q
        cuts = q * 2.0 ** -np.arange(depth, 0, -1.0)
        self.edges = np.unique(np.concatenate([[0.0], cuts, q - cuts, [q]]))
        m = self.edges.size - 1
        self.pieces = [None] * m
        full = np.empty(m)
        for p in range(m):
            a, b = self.edges[p], self.edges[p + 1]
            if p in (0, m - 1):
                full[p] = integrate_1d(f, a, b, TOL_1D)
                continue
            P = np.polynomial.Chebyshev.interpolate(f, order, domain=[a, b])
            self.pieces[p] = P.integ(lbnd=b)
            full[p] = -self.pieces[p](a)
        # suffix[p] = integral over the panels after p
        self.suffix = np.concatenate([np.cumsum(full[::-1])[::-1][1:], [0.0]])
        self.total = float(full.sum())
        probe = q * np.array([0.003, 0.07, 0.31, 0.5, 0.77, 0.93, 0.996])
        scale = max(1.0, abs(self.total))
        self.ok = all(
            abs(self(t) - integrate_1d(f, t, q, TOL_1D)) <= 1e-11 * scale for t in probe
        )

    def __call__(self, t):
        p = int(np.searchsorted(self.edges, t, side="right")) - 1
        p = min(max(p, 0), len(self.pieces) - 1)
        if self.pieces[p] is None:
            return integrate_1d(self.f, t, self.edges[p + 1], TOL_1D) + float(self.suffix[p])
        return -float(self.pieces[p](t)) + float(self.suffix[p])


def _integrator(q, grid):
    return _Adaptive(q) if grid is None else _Grid(q, grid)


@dataclass(frozen=True)
class AsymptoticKernel:
    """Ingredients of the limit law for one weighted-gap statistic.

    ``alpha`` is the exponent of the gap deformation ``d(u) = u**alpha``;
    ``L`` and ``gamma`` are the weight limit and its headcount sensitivity
    (``gamma=None`` means identically zero).  ``L_prime`` is the derivative
    of ``L``; the tail integrals need it whenever ``L`` is not constant.
    """

    model: DistributionModel
    Z: float
    q: float
    alpha: float
    L: Callable
    gamma: Callable | None = None
    L_prime: Callable | None = None
    constant_L: bool = False

    def deficit(self, s):
        # clipped: rounding can push G^-1(s) a hair above Z next to q
        return np.maximum((self.Z - self.model.quantile(s)) / self.Z, 0.0)

    def d(self, u):
        return np.power(u, self.alpha)

    def d_prime(self, u):
        if self.alpha == 0:
            return np.zeros_like(np.asarray(u, dtype=float))
        return self.alpha * np.power(u, self.alpha - 1.0)

    def h(self, s):
        u = self.deficit(s)
        if self.alpha >= 1:
            return self.model.quantile_derivative(s) * self.d_prime(u)
        # d' is infinite at a zero deficit, a measure-zero set: drop it
        pos = u > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.model.quantile_derivative(s) * self.d_prime(np.where(pos, u, 1.0))
        return np.where(pos, out, 0.0)

    def psi(self, s):
        return self.L(s) * self.h(s)

    @property
    def has_tail(self) -> bool:
        return self.constant_L or self.L_prime is not None

    def tail(self, t):
        """``int_t^q L h`` by parts, for scalar ``t``."""
        Z, q = self.Z, self.q
        val = Z * (float(self.L(t)) * float(self.d(self.deficit(t))) - self.m_at_q)
        if self.L_prime is not None:
            val += Z * self._inner(t)
        return val

    def _weight_drift(self, s):
        return self.L_prime(s) * self.d(self.deficit(s))

    @cached_property
    def _inner(self):
        # int_t^q L' d(Delta); precomputed once since every tail call needs it
        panels = _PanelAntiderivative(self._weight_drift, self.q)
        if panels.ok:
            return panels
        return lambda t: integrate_1d(self._weight_drift, t, self.q, TOL_1D)

    @property
    def m_at_q(self) -> float:
        return float(self.L(self.q)) * float(self.d(0.0))


@dataclass(frozen=True)
class GaussianFunctional:
    """The limit variable ``(1/Z) int_0^q psi(s) B(s) ds + atom * B(q)``.

    ``psi=None`` stands for a zero density.  ``tail``, when known, is
    ``t -> int_t^q psi``.
    """

    q: float
    Z: float
    psi: Callable | None
    atom: float
    tail: Callable | None = None

    def __add__(self, other):
        return combine([(1.0, self), (1.0, other)])

    def scaled(self, c: float) -> "GaussianFunctional":
        return combine([(c, self)])


def combine(terms) -> GaussianFunctional:
    """Linear combination ``sum c_i F_i`` of functionals on the same ``(0, q)``."""
    terms = list(terms)
    q, Z = terms[0][1].q, terms[0][1].Z
    live = [(c, F) for c, F in terms if F.psi is not None and c != 0]
    atom = float(sum(c * F.atom for c, F in terms))
    if not live:
        return GaussianFunctional(q, Z, None, atom)

    def psi(s):
        return sum(c * F.psi(s) for c, F in live)

    tail = None
    if all(F.tail is not None for _, F in live):
        def tail(t):
            return sum(c * F.tail(t) for c, F in live)

    return GaussianFunctional(q, Z, psi, atom, tail)


@dataclass(frozen=True)
class LimitLaw:
    """Centering and asymptotic variance of ``sqrt(n) (statistic - center)``."""

    D: float
    variance: float
    transformed_center: float
    transformed_variance: float

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "variance": self.variance,
            "transformed_center": self.transformed_center,
            "transformed_variance": self.transformed_variance,
        }


def _population_q(model, Z):
    q = float(model.cdf(Z))
    if not 0.0 < q < 1.0:
        raise ValueError(f"degenerate poverty line: G(Z)={q:g} is not inside (0, 1)")
    return q


def _unit_weight(s):
    return np.ones_like(np.asarray(s, dtype=float))


def make_kernel(model, Z, alpha, L=None, gamma=None, L_prime=None, *, q=None,
                check_tail=True) -> AsymptoticKernel:
    """Kernel from an explicit weight limit ``L`` (default 1) and ``gamma``."""
    if check_tail:
        probe_tail_exponent(model)
    if q is None:
        q = _population_q(model, Z)
    elif not 0.0 < q < 1.0:
        raise ValueError(f"degenerate poverty line: headcount {q:g} is not inside (0, 1)")
    constant = L is None
    if constant:
        L = _unit_weight
    return AsymptoticKernel(model, float(Z), float(q), float(alpha), L, gamma, L_prime, constant)


def _shorrocks_L(s):
    return 2.0 * (1.0 - np.asarray(s, dtype=float))


def _shorrocks_L_prime(s):
    return np.full(np.shape(s), -2.0) if np.ndim(s) else -2.0


def _kakwani_weights(k, q):
    def L(s):
        return (k + 1.0) * np.power(1.0 - np.asarray(s, dtype=float) / q, k)

    if k == 0:
        return L, None, None

    def L_prime(s):
        return -(k + 1.0) * k / q * np.power(1.0 - np.asarray(s, dtype=float) / q, k - 1.0)

    def gamma(s):
        s = np.asarray(s, dtype=float)
        return k * (k + 1.0) * np.power(1.0 - s / q, k - 1.0) * s / (q * q)

    return L, gamma, L_prime


def kernel_for(index, model: DistributionModel, Z: float, *, q=None, check_tail=True) -> AsymptoticKernel:
    """Kernel of a directly weighted index: fgt, sen, kakwani, shorrocks or thon."""
    index = _as_index(index)
    name = index.name
    opts = dict(q=q, check_tail=check_tail)
    if name == "fgt":
        return make_kernel(model, Z, index.alpha, **opts)
    if name in ("shorrocks", "thon"):
        return make_kernel(model, Z, 1.0, _shorrocks_L, None, _shorrocks_L_prime, **opts)
    if name in ("sen", "kakwani"):
        base = make_kernel(model, Z, 1.0, **opts)
        if index.k == 0:
            return base
        L, gamma, L_prime = _kakwani_weights(index.k, base.q)
        return AsymptoticKernel(base.model, base.Z, base.q, 1.0, L, gamma, L_prime)
    raise ValueError(f"{index} has no single-kernel limit law (use limit_law for chu and ray)")


def functional_for(kernel: AsymptoticKernel, *, grid=None) -> GaussianFunctional:
    """Gaussian limit functional ``{psi = L h, atom = m(q) + mu}`` of a kernel.

    ``mu = int_0^q gamma(s) d(Delta(s)) ds`` is the drift of the weights
    with the estimated headcount.
    """
    integ = _integrator(kernel.q, grid)
    mu = 0.0
    if kernel.gamma is not None:
        mu = integ.integral(lambda s: kernel.gamma(s) * kernel.d(kernel.deficit(s)))
    if kernel.alpha == 0:
        return GaussianFunctional(kernel.q, kernel.Z, None, kernel.m_at_q + mu)
    tail = kernel.tail if kernel.has_tail else None
    return GaussianFunctional(kernel.q, kernel.Z, kernel.psi, kernel.m_at_q + mu, tail)


def covariance(F1: GaussianFunctional, F2: GaussianFunctional, *, corrected: bool = True,
               grid=None) -> float:
    """Covariance of two limit functionals over the same ``(0, q)``.

    Density/atom cross terms carry ``Cov(B(s), B(q)) = s (1 - q)``.
    ``corrected=False`` drops that ``(1 - q)`` factor and reproduces the
    uncorrected variance, kept only for comparison.
    """
    if abs(F1.q - F2.q) > 1e-15 or F1.Z != F2.Z:
        raise ValueError("functionals must live on the same interval (0, q)")
    q, Z = F1.q, F1.Z
    integ = _integrator(q, grid)
    total = F1.atom * F2.atom * q * (1.0 - q)
    factor = (1.0 - q) if corrected else 1.0
    if F1.psi is not None and F2.psi is not None:
        total += integ.bridge_form(F1, F2) / (Z * Z)
    if F1.psi is not None and F2.atom != 0:
        total += factor / Z * F2.atom * integ.first_moment(F1)
    if F2.psi is not None and F1.atom != 0:
        total += factor / Z * F1.atom * integ.first_moment(F2)
    return float(total)


def covariance_matrix(functionals, *, corrected=True, grid=None) -> np.ndarray:
    m = len(functionals)
    S = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            S[i, j] = S[j, i] = covariance(functionals[i], functionals[j], corrected=corrected, grid=grid)
    return S


def _center(kernel, grid):
    integ = _integrator(kernel.q, grid)
    return integ.integral(lambda s: kernel.L(s) * kernel.d(kernel.deficit(s)))


def limit_law(index, model: DistributionModel, Z: float, *, corrected: bool = True,
              grid=None, q=None, check_tail=True) -> LimitLaw:
    """Centering and variance of an index under ``model`` with poverty line ``Z``.

    Parameters
    ----------
    index : IndexId or str
        One of fgt, sen, kakwani, shorrocks, thon, chu, ray.
    model : DistributionModel
    Z : float
    corrected : bool
        Keep the ``(1 - q)`` bridge factor in density/atom cross terms.
    grid : int, optional
        Evaluate every integral with a fixed midpoint grid of this size
        instead of adaptive quadrature (used for step-function plug-ins).
    q : float, optional
        Override ``G(Z)``, e.g. with an empirical headcount.
    check_tail : bool
        Probe the quantile density near 0 before computing.

    Returns
    -------
    LimitLaw
        ``D`` and ``variance`` describe the inner statistic; the transformed
        fields apply the outer power map of CHU and equal the inner ones
        for every other index.
    """
    index = _as_index(index)
    if index.name not in LIMIT_LAW_INDICES:
        raise ValueError(f"no limit law for {index}")
    opts = dict(q=q, check_tail=check_tail)

    if index.name in ("chu", "ray"):
        a = index.alpha
        k0 = kernel_for(IndexId("fgt", alpha=0.0), model, Z, **opts)
        opts["check_tail"] = False
        ka = kernel_for(IndexId("fgt", alpha=a), model, Z, **opts)
        qq = k0.q
        C = _center(ka, grid)
        if index.name == "chu":
            # inner statistic (Q/n)^(a-1) * FGT(a)
            D = qq ** (a - 1.0) * C
            grad = np.array([(a - 1.0) * qq ** (a - 2.0) * C, qq ** (a - 1.0)])
            Fs = [functional_for(k0, grid=grid), functional_for(ka, grid=grid)]
        else:
            # (K/q)^(1-a) * C with K the FGT(1) center
            k1 = kernel_for(IndexId("fgt", alpha=1.0), model, Z, **opts)
            K = _center(k1, grid)
            D = (K / qq) ** (1.0 - a) * C
            grad = np.array([
                (a - 1.0) * K ** (1.0 - a) * qq ** (a - 2.0) * C,
                (1.0 - a) * K ** (-a) * qq ** (a - 1.0) * C,
                K ** (1.0 - a) * qq ** (a - 1.0),
            ])
            Fs = [functional_for(k0, grid=grid), functional_for(k1, grid=grid),
                  functional_for(ka, grid=grid)]
        S = covariance_matrix(Fs, corrected=corrected, grid=grid)
        var = float(grad @ S @ grad)
        if index.name == "ray":
            return LimitLaw(D, var, D, var)
        if not D > 0:
            raise ValueError("delta method undefined at D<=0")
        slope = (1.0 / a) * D ** (1.0 / a - 1.0)
        return LimitLaw(D, var, D ** (1.0 / a), var * slope * slope)

    kernel = kernel_for(index, model, Z, **opts)
    D = _center(kernel, grid)
    F = functional_for(kernel, grid=grid)
    var = covariance(F, F, corrected=corrected, grid=grid)
    return LimitLaw(D, var, D, var)
