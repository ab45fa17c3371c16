"""Adaptive 1-D and 2-D quadrature plus a fixed midpoint grid.

The adaptive routines wrap QUADPACK's QAGS (21-point Gauss-Kronrod with
bisection and epsilon extrapolation).  It never evaluates the integrand at
the interval endpoints and copes with integrable endpoint singularities such
as ``(q - s)**-0.5``.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy import integrate

__all__ = ["QuadratureError", "integrate_1d", "integrate_2d", "midpoint_grid"]


class QuadratureError(RuntimeError):
    """Adaptive integration ran out of budget before meeting its tolerance."""

    def __init__(self, message, estimate, abserr):
        super().__init__(f"{message} (estimate={estimate!r}, achieved abs error ~{abserr:.3g})")
        self.estimate = estimate
        self.abserr = abserr


def integrate_1d(f, lo: float, hi: float, tol: float = 1e-9, limit: int = 200,
                 abstol: float = 1e-13) -> float:
    """Integrate ``f`` over ``(lo, hi)`` to relative tolerance ``tol``.

    ``abstol`` is a floor for integrals whose value is close to zero.
    """
    if hi <= lo:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info, *msg = integrate.quad(
            lambda x: float(f(x)), lo, hi, epsabs=abstol, epsrel=tol, limit=limit, full_output=1
        )
    if not np.isfinite(val) or (msg and "subdivisions" in msg[0]):
        raise QuadratureError("1-D quadrature did not converge", val, err)
    # roundoff or extrapolation warnings near machine precision: accept the
    # estimate when its error bound is still well inside the tolerance band
    if msg and err > max(1e3 * tol, 1e-8) * abs(val) + 1e3 * abstol:
        raise QuadratureError("1-D quadrature did not converge", val, err)
    return float(val)


def integrate_2d(f, q: float, tol: float = 1e-7) -> float:
    """Integrate ``f(u, v)`` over the square ``(0, q)**2``.

    The square is split along the diagonal ``u = v`` into two triangles so
    that integrands with a kink there (the Brownian bridge kernel
    ``min(u, v) - u*v``) are smooth on each piece.
    """
    inner_tol = tol * 1e-2

    def lower(u):
        # v in (0, u)
        return integrate_1d(lambda v: f(u, v), 0.0, u, inner_tol)

    def upper(u):
        # v in (u, q)
        return integrate_1d(lambda v: f(u, v), u, q, inner_tol)

    return integrate_1d(lower, 0.0, q, tol) + integrate_1d(upper, 0.0, q, tol)


def midpoint_grid(lo: float, hi: float, size: int = 512):
    """Nodes and equal weights of the composite midpoint rule on ``(lo, hi)``."""
    h = (hi - lo) / size
    nodes = lo + h * (np.arange(size) + 0.5)
    return nodes, np.full(size, h)
