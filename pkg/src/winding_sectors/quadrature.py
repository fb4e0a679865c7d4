"""Double-exponential quadrature over finite, semi-infinite and infinite intervals.

The integrands served here decay like exp(-x*cosh(u)) or carry logarithmic
endpoint singularities (K0-type), which is exactly the regime where
tanh-sinh / exp-sinh / sinh-sinh node clustering shines.  One trapezoidal
sweep per refinement level, halving the step each time and reusing previous
evaluations; the level-to-level difference is the (conservative) error
estimate.

All integrand callables must accept numpy arrays and evaluate elementwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

__all__ = [
    "Finite",
    "SemiInfinite",
    "Infinite",
    "QuadSpec",
    "QuadResult",
    "QuadratureError",
    "UnsupportedDimensionError",
    "integrate_1d",
    "integrate_nd",
]

_HALF_PI = 0.5 * math.pi
_H0 = 0.5  # level-0 trapezoidal step in the transformed variable


class QuadratureError(RuntimeError):
    """Integrand returned NaN/inf at a node, or the rule itself failed."""


class UnsupportedDimensionError(QuadratureError):
    """Requested tensor dimension exceeds the configured dim_cap."""


@dataclass(frozen=True)
class Finite:
    a: float
    b: float


@dataclass(frozen=True)
class SemiInfinite:
    a: float = 0.0


@dataclass(frozen=True)
class Infinite:
    # even=True asserts f(-x) = f(x); only x >= 0 is sampled, weights doubled.
    even: bool = False


Domain = Union[Finite, SemiInfinite, Infinite]

_DEFAULT_REL_TOL = {1: 1e-10, 2: 1e-7, 3: 1e-5}

# Truncation of the transformed variable.  Finite: weights underflow past
# |t| ~ 5.  Semi-infinite: x reaches exp(+-(pi/2)sinh t); 6.3 keeps x and the
# weight finite in double precision.  Infinite: x = sinh((pi/2)sinh t) capped
# near 1e150 so that x**2 stays representable inside rational integrands.
_TMAX = {"finite": 5.0, "semi": 6.3, "inf": 6.0}


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances and budget for one quadrature call."""

    rel_tol: float = 1e-10
    abs_tol: float = 0.0
    max_levels: int = 8
    dim_cap: int = 3

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise ValueError("rel_tol must be > 0")
        if self.abs_tol < 0.0:
            raise ValueError("abs_tol must be >= 0")
        if self.dim_cap not in (1, 2, 3):
            raise ValueError("dim_cap must be 1, 2 or 3")
        if self.max_levels < 1:
            raise ValueError("max_levels must be >= 1")

    @classmethod
    def for_dim(cls, d: int, **overrides) -> "QuadSpec":
        """Default spec for a d-dimensional integral (looser as d grows)."""
        if d not in _DEFAULT_REL_TOL:
            raise UnsupportedDimensionError(f"no default tolerance for d={d}")
        kw = {"rel_tol": _DEFAULT_REL_TOL[d]}
        if d == 3:
            kw["max_levels"] = 5
        kw.update(overrides)
        return cls(**kw)


@dataclass
class QuadResult:
    value: float
    err_est: float
    evaluations: int
    converged: bool = True

    def __post_init__(self):
        if self.err_est < 0.0:
            raise ValueError("err_est must be >= 0")
        if self.evaluations <= 0:
            raise ValueError("evaluations must be > 0")


# ---------------------------------------------------------------------------
# node tables


def _t_grid(level: int, tmax: float) -> np.ndarray:
    """Positive abscissae introduced at `level` (level 0 includes t=0)."""
    h = _H0 / 2**level
    if level == 0:
        return np.arange(0.0, tmax + 0.5 * h, h)
    # odd multiples of the current step are the new points
    return np.arange(h, tmax + 0.5 * h, 2.0 * h)


def _nodes_finite(level: int, a: float, b: float):
    t = _t_grid(level, _TMAX["finite"])
    t = np.concatenate([-t[:0:-1], t]) if level == 0 else np.concatenate([-t, t])
    g = _HALF_PI * np.sinh(t)
    # distance from the nearer endpoint, computed without cancellation
    e2 = np.exp(-2.0 * np.abs(g))
    d = (b - a) * e2 / (1.0 + e2)
    x = np.where(t < 0.0, a + d, b - d)
    sech = 2.0 * np.exp(-np.abs(g)) / (1.0 + e2)
    w = 0.5 * (b - a) * _HALF_PI * np.cosh(t) * sech * sech
    return x, w


def _nodes_semi(level: int, a: float):
    t = _t_grid(level, _TMAX["semi"])
    t = np.concatenate([-t[:0:-1], t]) if level == 0 else np.concatenate([-t, t])
    g = _HALF_PI * np.sinh(t)
    e = np.exp(g)
    x = a + e
    w = _HALF_PI * np.cosh(t) * e
    return x, w


def _nodes_inf(level: int, even: bool):
    t = _t_grid(level, _TMAX["inf"])
    if not even:
        t = np.concatenate([-t[:0:-1], t]) if level == 0 else np.concatenate([-t, t])
    g = _HALF_PI * np.sinh(t)
    x = np.sinh(g)
    w = _HALF_PI * np.cosh(t) * np.cosh(g)
    if even:
        w = np.where(t > 0.0, 2.0 * w, w)
    return x, w


_NODE_CACHE: dict = {}


def _nodes(domain: Domain, level: int):
    if isinstance(domain, Finite):
        key = ("finite", level, domain.a, domain.b)
    elif isinstance(domain, SemiInfinite):
        key = ("semi", level, domain.a)
    elif isinstance(domain, Infinite):
        key = ("inf", level, domain.even)
    else:
        raise TypeError(f"not a quadrature domain: {domain!r}")
    got = _NODE_CACHE.get(key)
    if got is None:
        if key[0] == "finite":
            got = _nodes_finite(level, domain.a, domain.b)
        elif key[0] == "semi":
            got = _nodes_semi(level, domain.a)
        else:
            got = _nodes_inf(level, domain.even)
        _NODE_CACHE[key] = got
    return got


# ---------------------------------------------------------------------------
# refinement driver


def integrate_vec(fvec: Callable, domain: Domain, spec: QuadSpec | None = None):
    """Integrate a batch of integrands sharing the same nodes.

    `fvec(x)` must map a node array of shape (n,) to shape (..., n); the
    leading axes are independent integrals refined together.  Returns
    (values, err_ests, evaluations, converged) with values/err_ests of the
    leading shape.
    """
    spec = spec or QuadSpec()
    total = None
    prev = None
    err = None
    evals = 0
    converged = False
    for level in range(spec.max_levels + 1):
        x, w = _nodes(domain, level)
        with np.errstate(all="ignore"):
            vals = np.asarray(fvec(x), dtype=float)
            contrib = vals * w
        if not np.all(np.isfinite(contrib)):
            raise QuadratureError(
                f"integrand produced NaN/inf on {type(domain).__name__} domain "
                f"at level {level}"
            )
        evals += x.size
        h = _H0 / 2**level
        part = contrib.sum(axis=-1) * h
        total = part if level == 0 else 0.5 * total + part
        if prev is not None:
            err = np.abs(total - prev)
            scale = np.maximum(np.abs(total), np.abs(prev))
            tol = np.maximum(spec.abs_tol, spec.rel_tol * scale)
            # stop on tolerance or on hitting double-precision granularity
            if np.all((err <= tol) | (err <= 16.0 * np.finfo(float).eps * scale)):
                converged = True
                break
        prev = np.array(total, copy=True)
    if err is None:
        err = np.full_like(np.asarray(total, dtype=float), np.inf)
    return np.asarray(total, dtype=float), np.asarray(err, dtype=float), evals, converged


def integrate_1d(f: Callable, domain: Domain, spec: QuadSpec | None = None) -> QuadResult:
    """Adaptive double-exponential integration of a scalar integrand.

    The integrand must be finite on the open domain; endpoint singularities
    up to logarithmic strength are handled by the node clustering.  On
    non-convergence the best estimate is returned with converged=False.
    """
    value, err, evals, ok = integrate_vec(f, domain, spec)
    return QuadResult(float(value), float(err), evals, ok)


def _cumulative_nodes(domain: Domain, level: int):
    xs = [_nodes(domain, lv)[0] for lv in range(level + 1)]
    ws = [_nodes(domain, lv)[1] for lv in range(level + 1)]
    return np.concatenate(xs), np.concatenate(ws)


def integrate_nd(
    f: Callable,
    domains: Sequence[Domain],
    spec: QuadSpec | None = None,
    chunk: int = 16,
) -> QuadResult:
    """Tensor-product double-exponential quadrature in 2 or 3 dimensions.

    `f` receives one broadcast-ready array per dimension (shapes like
    (n0,1,1), (1,n1,1), (1,1,n2)) and must return the broadcast product
    grid.  All dimensions refine together; the level-to-level difference of
    the full tensor sum is the error estimate.
    """
    d = len(domains)
    if d not in (2, 3):
        raise UnsupportedDimensionError(f"tensor quadrature supports d in {{2,3}}, got d={d}")
    spec = spec or QuadSpec.for_dim(d)
    if d > spec.dim_cap:
        raise UnsupportedDimensionError(f"d={d} exceeds dim_cap={spec.dim_cap}")

    total = None
    prev = None
    err = math.inf
    evals = 0
    converged = False
    for level in range(spec.max_levels + 1):
        grids = [_cumulative_nodes(dom, level) for dom in domains]
        xs = [g[0] for g in grids]
        ws = [g[1] for g in grids]
        h = _H0 / 2**level
        acc = 0.0
        n0 = xs[0].size
        for lo in range(0, n0, chunk):
            hi = min(lo + chunk, n0)
            if d == 2:
                x0 = xs[0][lo:hi, None]
                x1 = xs[1][None, :]
                with np.errstate(all="ignore"):
                    vals = np.asarray(f(x0, x1), dtype=float)
                    part = (vals @ ws[1]) @ ws[0][lo:hi]
            else:
                x0 = xs[0][lo:hi, None, None]
                x1 = xs[1][None, :, None]
                x2 = xs[2][None, None, :]
                with np.errstate(all="ignore"):
                    vals = np.asarray(f(x0, x1, x2), dtype=float)
                    part = ((vals @ ws[2]) @ ws[1]) @ ws[0][lo:hi]
            if not np.isfinite(part):
                raise QuadratureError(f"integrand produced NaN/inf in {d}-d tensor rule")
            acc += float(part)
            evals += int(np.prod([hi - lo] + [x.size for x in xs[1:]]))
        total = acc * h**d
        if prev is not None:
            err = abs(total - prev)
            scale = max(abs(total), abs(prev))
            if err <= max(spec.abs_tol, spec.rel_tol * scale) or err <= 16.0 * np.finfo(
                float
            ).eps * scale:
                converged = True
                break
        prev = total
    return QuadResult(float(total), float(err), evals, converged)
