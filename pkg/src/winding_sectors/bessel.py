"""Modified Bessel functions in the narrow parameter ranges this package needs.

I_nu comes from its power series with a rigorous geometric tail bound and is
used purely as a cross-validation oracle for the winding characteristic
function.  K_alpha is evaluated from its cosh integral representation
through the double-exponential engine, fractional orders included.
"""

from __future__ import annotations

import math

import numpy as np

from .quadrature import Infinite, QuadSpec, integrate_1d, integrate_vec

__all__ = ["bessel_i", "bessel_k", "bessel_k_vec", "g_alpha_series"]

_I_SERIES_X_MAX = 50.0


def bessel_i(nu: float, x: float, rel_tol: float = 1e-14) -> float:
    """Power-series I_nu(x) for nu >= 0, 0 <= x <= 50.

    Terms are summed until the geometric bound on the remaining tail drops
    below rel_tol of the partial sum.
    """
    if nu < 0.0:
        raise ValueError("bessel_i requires nu >= 0")
    if x < 0.0:
        raise ValueError("bessel_i requires x >= 0")
    if x > _I_SERIES_X_MAX:
        raise ValueError(f"bessel_i series restricted to x <= {_I_SERIES_X_MAX}")
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    q = 0.25 * x * x
    term = math.exp(nu * math.log(0.5 * x) - math.lgamma(nu + 1.0))
    total = term
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + nu))
        total += term
        ratio = q / ((k + 1) * (k + 1 + nu))
        if ratio < 1.0:
            tail = term * ratio / (1.0 - ratio)
            if tail <= rel_tol * total:
                return total
        if k > 10_000:  # unreachable for x <= 50
            raise RuntimeError("bessel_i series failed to converge")


def bessel_k_vec(alpha: float, xs: np.ndarray, spec: QuadSpec | None = None):
    """K_alpha at an array of points, sharing one refinement of the u-grid.

    Uses K_alpha(x) = integral over u >= 0 of exp(-x cosh u) cosh(alpha u);
    even in alpha, so the sign is dropped.
    """
    a = abs(alpha)
    if a > 1.0:
        raise ValueError("bessel_k handles |alpha| <= 1 only")
    xs = np.asarray(xs, dtype=float)
    if np.any(xs <= 0.0):
        raise ValueError("bessel_k requires x > 0")
    # x << 1 with alpha near 1 gives a tall plateau before the cosh cutoff;
    # a couple of extra levels cover that corner of the parameter range
    spec = spec or QuadSpec(rel_tol=1e-12, max_levels=10)

    def fvec(u):
        # exp(-x cosh u) cosh(a u) assembled in log space so the huge-|u|
        # nodes underflow cleanly instead of producing 0 * inf
        core = -np.outer(xs, np.cosh(u))
        au = a * u
        return 0.5 * (np.exp(core + au) + np.exp(core - au))

    values, err, _, ok = integrate_vec(fvec, Infinite(even=True), spec)
    return 0.5 * values, 0.5 * err, ok


def bessel_k(alpha: float, x: float, spec: QuadSpec | None = None) -> float:
    """Modified Bessel K of fractional order |alpha| <= 1 at x > 0."""
    values, _, ok = bessel_k_vec(alpha, np.array([x]), spec)
    if not ok:
        raise RuntimeError("bessel_k quadrature did not reach tolerance")
    return float(values[0])


def g_alpha_series(alpha: float, x: float, rel_tol: float = 1e-13) -> float:
    """Bessel-series route to the winding characteristic function.

    exp(-x) * sum over k of [I_{k+a}(x) + I_{k+1-a}(x)], a reduced to [0,1].
    Serves as the independent oracle for the integral route in `analytic`.
    """
    a = alpha - math.floor(alpha)
    if x < 0.0:
        raise ValueError("g_alpha_series requires x >= 0")
    if x == 0.0:
        return 1.0 if a == 0.0 else 0.0
    total = 0.0
    k = 0
    while True:
        term = bessel_i(k + a, x) + bessel_i(k + 1.0 - a, x)
        total += term
        if k > 3 and term <= rel_tol * total:
            break
        k += 1
        if k > 2_000:
            raise RuntimeError("g_alpha_series failed to converge")
    return math.exp(-x) * total
