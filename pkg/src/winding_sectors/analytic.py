"""Closed-form and integral expressions for winding-sector areas of closed
planar Brownian paths, all at unit path duration.

Everything here reduces to three building blocks:

* the winding characteristic function G_alpha(x) and its complement,
  evaluated from a cosh-kernel integral over the real line;
* the sector kernel P(u, n) and the annealed weight f(x) obtained by
  integrating the complement over the conjugate phase;
* the master integral Phi_q(m) assembling total and zero-winding areas
  through the zero-winding ratio q (default 1/5, an imported constant).

Quadratures run through the double-exponential engine; constants that have
independent series or closed forms keep both routes so tests can confront
them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import qmc

from .bessel import bessel_k_vec
from .quadrature import (
    Finite,
    Infinite,
    QuadSpec,
    QuadratureError,
    SemiInfinite,
    integrate_1d,
    integrate_nd,
    integrate_vec,
)

__all__ = [
    "Estimate",
    "WindingPhase",
    "SectorLabel",
    "PaperConstants",
    "reduce_alpha",
    "g_alpha",
    "one_minus_g_alpha_vec",
    "f_of_x",
    "f_of_x_vec",
    "sector_transform",
    "i_nj",
    "mean_sn",
    "mean_sn_asymptotic",
    "mean_s_tuple",
    "sum_s_single_nonzero",
    "sector_sum_ak",
    "phi_q",
    "mean_s",
    "mean_s00",
    "mean_s_asymptotic",
    "mean_s_minus_s0_asymptotic",
    "s0_limit",
    "phi_q_asymptotic",
    "overlap_two_paths",
    "circle_overlap_reference",
    "sum_sn_2",
    "s0_overlap_two_paths",
    "c22_series",
    "constant_cj",
    "constant_dj",
    "constant_cjm",
]

EULER_GAMMA = float(np.euler_gamma)
Q_DEFAULT = 0.2  # zero-winding to nonzero-winding area ratio for one path

_INNER_SPEC = QuadSpec(rel_tol=1e-10, abs_tol=1e-15, max_levels=10)
_OUTER_SPEC = QuadSpec(rel_tol=1e-10, abs_tol=1e-14)


@dataclass(frozen=True)
class Estimate:
    """A number with an error bar and a record of how it was produced."""

    value: float
    err: float
    method: str  # quadrature | series | closed_form | mc_integration
    flags: tuple = ()

    def __post_init__(self):
        if self.err < 0.0:
            raise ValueError("err must be >= 0")


def reduce_alpha(alpha: float) -> float:
    """Map the conjugate phase into [0, 1) using G_a = G_{a+1} = G_{1-a}."""
    return alpha - math.floor(alpha)


def _cosh_capped(u):
    # finite even for the farthest double-exponential nodes, so that
    # x * cosh(u) is 0 (not NaN) when an integrand is sampled at x = 0
    return np.cosh(np.minimum(np.abs(u), 710.0))


@dataclass(frozen=True)
class WindingPhase:
    alpha: float
    reduced: bool = False

    def reduce(self) -> "WindingPhase":
        if self.reduced:
            return self
        return WindingPhase(reduce_alpha(self.alpha), True)

    def __post_init__(self):
        if self.reduced and not 0.0 <= self.alpha <= 1.0:
            raise ValueError("reduced phase must lie in [0, 1]")


@dataclass(frozen=True)
class SectorLabel:
    """Winding label of a sector: total winding and/or the per-path tuple."""

    total_n: int
    tuple_n: tuple | None = None

    def __post_init__(self):
        if self.tuple_n is not None and sum(self.tuple_n) != self.total_n:
            raise ValueError("tuple windings must sum to total_n")

    @property
    def m(self) -> int | None:
        return None if self.tuple_n is None else len(self.tuple_n)


# ---------------------------------------------------------------------------
# winding characteristic function


def one_minus_g_alpha_vec(alpha: float, xs, spec: QuadSpec | None = None) -> np.ndarray:
    """1 - G_alpha at an array of x >= 0, for reduced alpha in (0, 1).

    Integrand over u (even):  exp(-x(1+cosh u)) cosh((alpha-1/2)u) / (2 cosh(u/2)),
    assembled in log space so huge-u nodes underflow instead of overflowing.
    """
    xs = np.asarray(xs, dtype=float)
    a = reduce_alpha(alpha)
    if np.any(xs < 0.0):
        raise ValueError("x must be >= 0")
    if a == 0.0:
        return np.zeros_like(xs)
    # below the floor the complement is indistinguishable from its x=0 limit
    # at working precision, while the cosh cutoff at u ~ ln(1/x) would force
    # absurdly deep refinement; snap to the exactly-clean x = 0 integrand
    xs = np.where(xs < 1e-12, 0.0, xs)
    beta = abs(a - 0.5)

    def fvec(u):
        expo = (beta - 0.5) * u - np.log1p(np.exp(-u)) - math.log(2.0)
        core = -np.outer(xs, 1.0 + _cosh_capped(u))
        return np.exp(core + expo) * (1.0 + np.exp(-2.0 * beta * u)) if beta > 0.0 else np.exp(
            core + expo
        ) * 2.0

    values, _, _, ok = integrate_vec(fvec, Infinite(even=True), spec or _INNER_SPEC)
    if not ok:
        raise QuadratureError("winding characteristic integral did not converge")
    return math.sin(math.pi * a) / math.pi * values


def g_alpha(alpha: float, x: float) -> float:
    """Winding characteristic function G_alpha(x), in [0, 1]; G_0 = 1."""
    if x < 0.0:
        raise ValueError("x must be >= 0")
    a = reduce_alpha(alpha)
    if a == 0.0:
        return 1.0
    return 1.0 - float(one_minus_g_alpha_vec(a, np.array([x]))[0])


# ---------------------------------------------------------------------------
# f(x) and the master integrals


def f_of_x_vec(xs, spec: QuadSpec | None = None) -> np.ndarray:
    """Phase-averaged complement f(x) = integral over u of
    exp(-x(1+cosh u)) / (u^2 + pi^2), vectorized over x >= 0."""
    xs = np.asarray(xs, dtype=float)
    if np.any(xs < 0.0):
        raise ValueError("x must be >= 0")
    xs = np.where(xs < 1e-12, 0.0, xs)  # same floor as the complement integral

    def fvec(u):
        return np.exp(-np.outer(xs, 1.0 + _cosh_capped(u))) / (u * u + math.pi**2)

    values, _, _, ok = integrate_vec(fvec, Infinite(even=True), spec or _INNER_SPEC)
    if not ok:
        raise QuadratureError("f(x) integral did not converge")
    return values


def f_of_x(x: float) -> float:
    return float(f_of_x_vec(np.array([x]))[0])


def _one_minus_pow(z: np.ndarray, m: int) -> np.ndarray:
    """1 - (1 - z)^m for z in [0, 1], stable for tiny z and huge m."""
    z = np.clip(z, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        out = -np.expm1(m * np.log1p(-z))
    return np.where(z >= 1.0, 1.0, out)


def sector_transform(
    alpha: float,
    m: int,
    spec: QuadSpec | None = None,
    inner_spec: QuadSpec | None = None,
) -> Estimate:
    """pi * integral of 1 - G_alpha(x)^m over x >= 0.

    Equals the (1 - cos) weighted sum of per-winding sector areas; for one
    path it reduces to pi*a*(1-a) with a the reduced phase.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    a = reduce_alpha(alpha)
    if a == 0.0:
        return Estimate(0.0, 0.0, "closed_form")
    # 1 - G^m <= m (1 - G), so the transform is bounded by pi m a (1-a);
    # below working precision return 0 instead of chasing a near-divergent
    # integrand (the complement decays like exp(-a u) at the origin)
    bound = math.pi * m * a * (1.0 - a)
    if bound < 1e-13:
        return Estimate(0.0, bound, "closed_form")
    sub = 0.5 * math.log(m) if m >= 16 else 1.0

    def f(xs):
        return _one_minus_pow(one_minus_g_alpha_vec(a, sub * xs, inner_spec), m)

    r = integrate_1d(f, SemiInfinite(0.0), spec or _OUTER_SPEC)
    return Estimate(math.pi * sub * r.value, math.pi * sub * r.err_est, "quadrature",
                    () if r.converged else ("tolerance not met",))


# ---------------------------------------------------------------------------
# sector areas by total winding number


def _lncosh(z):
    z = np.abs(z)
    return z - math.log(2.0) + np.log1p(np.exp(-2.0 * z))


def _phi_sum_odd(n: int, j: int, s):
    """Alternating Lorentzian sum entering the odd-j phase integral."""
    k = (j - 1) // 2
    s2 = s * s
    out = 0.0
    for N in range(n - k, n + k + 2):
        c = (-1) ** (N + k - n) * math.comb(j, N + k - n)
        out = out + c * (2 * N - 1) / ((math.pi * (2 * N - 1)) ** 2 + s2)
    return out


def _sinhc_half(s):
    """sinh(s/2)/s, finite at s = 0."""
    small = np.abs(s) < 1e-4
    safe = np.where(small, 1.0, s)
    series = 0.5 + s * s / 48.0
    return np.where(small, series, np.sinh(0.5 * safe) / safe)


def _sinhc_sech(s, ln_sech_prod, ln_cap=math.inf):
    """sinh(s/2)/s times exp(ln_sech_prod), stable at s = 0 and for huge |s|.

    ln_cap bounds the combined exponent; passing the exact analytic bound
    (j-1)ln 2 of cosh(s/2)/prod cosh(u_i/2) neutralizes the cancellation of
    the two huge log terms at the farthest nodes."""
    small = np.abs(s) < 1e-4
    safe = np.where(small, 1.0, np.abs(s))
    with np.errstate(divide="ignore"):
        big = np.exp(np.minimum(_lnsinh_abs(0.5 * safe) + ln_sech_prod, ln_cap)) / safe
    return np.where(small, (0.5 + s * s / 48.0) * np.exp(ln_sech_prod), big)


def _i_nj_integrand(n: int, j: int, us: Sequence[np.ndarray]):
    """Integrand of the j-fold u-representation of I_{n,j} (plain du measure)."""
    s = us[0]
    for u in us[1:]:
        s = s + u
    denom = float(j)
    ln_sech_prod = 0.0
    for u in us:
        denom = denom + np.cosh(u)
        ln_sech_prod = ln_sech_prod - _lncosh(0.5 * u)
    ln_cap = (j - 1) * math.log(2.0)  # exact bound of cosh(s/2)/prod cosh(u_i/2)
    if j % 2 == 1:
        k = (j - 1) // 2
        sign = (-1.0) ** k
        const = 2.0 * math.pi**2 / (4.0 * math.pi) ** j
        ratio = np.exp(np.minimum(_lncosh(0.5 * s) + ln_sech_prod, ln_cap))
        return sign * const * ratio * _phi_sum_odd(n, j, s) / denom
    k = j // 2
    sign = (-1.0) ** (k + 1)
    const = 2.0 * math.pi / (4.0 * math.pi) ** j
    s2 = s * s
    acc = 0.0
    for N in range(n - k, n + k + 1):
        c = (-1) ** (N + k - n) * math.comb(j, N + k - n)
        if N == 0:
            acc = acc + c * _sinhc_sech(s, ln_sech_prod, ln_cap)
        else:
            lnscaled = np.minimum(_lnsinh_abs(0.5 * np.abs(s)) + ln_sech_prod, ln_cap)
            term = np.exp(lnscaled) * np.abs(s) / ((2.0 * math.pi * N) ** 2 + s2)
            acc = acc + c * term
    return sign * const * acc / denom


def _lnsinh_abs(z):
    """log sinh(z) for z >= 0 (−inf at 0)."""
    with np.errstate(divide="ignore"):
        return z - math.log(2.0) + np.log1p(-np.exp(-2.0 * z))


def _phi_nj_closed(n: int, j: int, s):
    """Phase integral of sin^j(pi a) cos(2 pi a n) cosh((a-1/2)s) over [0,1]."""
    if j % 2 == 1:
        k = (j - 1) // 2
        pref = ((-1.0) ** (k + 1) / 2.0**j) * 2.0 * math.pi * np.cosh(0.5 * s)
        return pref * _phi_sum_odd(n, j, s)
    k = j // 2
    s2 = s * s
    acc = 0.0
    for N in range(n - k, n + k + 1):
        c = (-1) ** (N + k - n) * math.comb(j, N + k - n)
        if N == 0:
            acc = acc + c * _sinhc_half(s)
        else:
            acc = acc + c * np.sinh(0.5 * s) * s / ((2.0 * math.pi * N) ** 2 + s2)
    return ((-1.0) ** k / 2.0**j) * 2.0 * acc


_MC_SAMPLES = 1 << 13
_MC_BATCHES = 24


def _i_nj_mc(n: int, j: int, seed: int = 20260810) -> Estimate:
    """Latin-hypercube importance sampling of the j-fold u-integral.

    Draws u_i from the sech(u/2)/(2 pi) density (its mass is exactly 1), so
    the estimator averages -pi * Phi_{n,j}(sum u) / (j + sum cosh u_i).
    """
    sampler = qmc.LatinHypercube(d=j, seed=seed)
    means = []
    for _ in range(_MC_BATCHES):
        F = sampler.random(_MC_SAMPLES)
        u = 2.0 * np.log(np.tan(0.5 * math.pi * F))
        s = u.sum(axis=1)
        denom = float(j) + np.cosh(u).sum(axis=1)
        w = -math.pi * _phi_nj_closed(n, j, s) / denom
        means.append(w.mean())
    means = np.array(means)
    err = means.std(ddof=1) / math.sqrt(len(means))
    return Estimate(float(means.mean()), float(err), "mc_integration")


@lru_cache(maxsize=None)
def i_nj(n: int, j: int) -> Estimate:
    """Sector-moment integral I_{n,j}; even in n, defined for n != 0.

    j <= 3 by deterministic tensor quadrature, 4 <= j <= 6 by stratified
    Monte Carlo with the sampling error reported."""
    if n == 0:
        raise ValueError("n = 0 is excluded; zero-winding areas go through mean_s00")
    if j < 1:
        raise ValueError("j must be >= 1")
    if j > 6:
        raise ValueError("I_{n,j} unsupported beyond j = 6")
    n = abs(n)
    if j == 1:
        def f(u):
            return _i_nj_integrand(n, 1, [u])

        r = integrate_1d(f, Infinite(), QuadSpec(rel_tol=1e-12, abs_tol=1e-16))
        return Estimate(r.value, r.err_est, "quadrature",
                        () if r.converged else ("tolerance not met",))
    if j <= 3:
        def f(*us):
            return _i_nj_integrand(n, j, list(us))

        spec = QuadSpec.for_dim(j, abs_tol=1e-14)
        r = integrate_nd(f, [Infinite()] * j, spec)
        return Estimate(r.value, r.err_est, "quadrature",
                        () if r.converged else ("tolerance not met",))
    return _i_nj_mc(n, j)


_BINOMIAL_MAX_M = 6


def mean_sn(m: int, n: int) -> Estimate:
    """Mean area of total-winding-n sectors for m paths, n != 0.

    Small m: alternating binomial sum over I_{n,j} (complete, j runs to m).
    Larger m: the binomial terms cancel catastrophically, so the phase
    integral of the sector transform is used instead.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if n == 0:
        raise ValueError(
            "n = 0 is excluded here; use mean_s00 / mean_s for zero-winding areas"
        )
    n = abs(n)
    if m <= _BINOMIAL_MAX_M:
        val = 0.0
        var = 0.0
        method = "quadrature"
        for j in range(1, m + 1):
            est = i_nj(n, j)
            coef = (-1.0) ** (j + 1) * math.comb(m, j)
            val += coef * est.value
            var += (coef * est.err) ** 2
            if est.method == "mc_integration":
                method = "mc_integration"
        return Estimate(val, math.sqrt(var), method)
    return _mean_sn_direct(m, n)


@lru_cache(maxsize=None)
def _z_alpha_cached(alpha: float, m: int) -> float:
    # report-grade accuracy; the alpha grid repeats across n so this cache
    # makes every winding number after the first nearly free
    return sector_transform(
        alpha,
        m,
        spec=QuadSpec(rel_tol=1e-8, abs_tol=1e-12),
        inner_spec=QuadSpec(rel_tol=1e-8, abs_tol=1e-13, max_levels=10),
    ).value


def _mean_sn_direct(m: int, n: int) -> Estimate:
    """- integral over the phase of Z_alpha(m) cos(2 pi alpha n).

    Both factors are symmetric about the half-way phase, so only the lower
    half is integrated."""

    def f(alphas):
        out = np.empty_like(alphas)
        for i, a in enumerate(alphas):
            out[i] = _z_alpha_cached(float(a), m)
        return -out * np.cos(2.0 * math.pi * n * alphas)

    r = integrate_1d(f, Finite(0.0, 0.5), QuadSpec(rel_tol=1e-7, abs_tol=1e-11, max_levels=6))
    return Estimate(2.0 * r.value, 2.0 * r.err_est, "quadrature",
                    () if r.converged else ("tolerance not met",))


def mean_sn_asymptotic(m: int, n: int) -> float:
    """Two-term large-n expansion of mean_sn using the computed constants."""
    if n == 0:
        raise ValueError("n must be nonzero")
    n = abs(n)
    d2 = constant_dj(2).value
    c3 = constant_cj(3).value
    lead = m / (2.0 * math.pi * n * n)
    sub = 3.0 / (4.0 * math.pi**3 * n**4) * (
        2.0 * math.comb(m, 2) * d2 + math.comb(m, 3) * c3
    )
    return lead - sub


# ---------------------------------------------------------------------------
# per-path tuple sectors


def _p_kernel(u, n: int):
    """Sector kernel P(u, n); P(u, 0) is the Cauchy kernel 1/(u^2+pi^2)."""
    u2 = u * u
    num = u2 + (1.0 - 4.0 * n * n) * math.pi**2
    den = (u2 + (math.pi * (2 * n + 1)) ** 2) * (u2 + (math.pi * (2 * n - 1)) ** 2)
    return num / den


def _q_kernel_vec(xs, n: int) -> np.ndarray:
    """integral over u of exp(-x(1+cosh u)) P(u, n), vectorized over x."""
    xs = np.asarray(xs, dtype=float)
    xs = np.where(xs < 1e-12, 0.0, xs)

    def fvec(u):
        return np.exp(-np.outer(xs, 1.0 + _cosh_capped(u))) * _p_kernel(u, n)

    values, _, _, ok = integrate_vec(fvec, Infinite(even=True), _INNER_SPEC)
    if not ok:
        raise QuadratureError("tuple kernel integral did not converge")
    return values


def mean_s_tuple(m: int, ns: Sequence[int]) -> Estimate:
    """Mean area of the sector where paths 1..j wind (n_1, ..., n_j) times
    and the remaining m - j paths wind zero times.

    j <= 3 deterministic; for j >= 4 the large-n product form with the
    c_{j,m} constant is substituted and flagged."""
    ns = tuple(int(v) for v in ns)
    j = len(ns)
    if j < 1 or j > m:
        raise ValueError("need 1 <= len(ns) <= m")
    if any(v == 0 for v in ns):
        raise ValueError("tuple entries must be nonzero; zeros are implied by m - j")
    if j >= 4:
        cjm = constant_cjm(j, m)
        denom = 2.0**j * math.pi ** (2 * j - 1)
        prod = 1.0
        for v in ns:
            prod *= float(v) * float(v)
        return Estimate(
            cjm.value / (denom * prod),
            cjm.err / (denom * prod),
            cjm.method,
            ("asymptotic large-n fallback",),
        )

    def f(xs):
        prod = _q_kernel_vec(xs, ns[0])
        for v in ns[1:]:
            prod = prod * _q_kernel_vec(xs, v)
        if m > j:
            fx = np.clip(f_of_x_vec(xs), 0.0, 1.0)
            with np.errstate(divide="ignore"):
                prod = prod * np.exp((m - j) * np.log1p(-fx))
        return prod

    r = integrate_1d(f, SemiInfinite(0.0), _OUTER_SPEC)
    val = math.pi * (-1.0) ** j * r.value
    return Estimate(val, math.pi * r.err_est, "quadrature",
                    () if r.converged else ("tolerance not met",))


def sum_s_single_nonzero(m: int, spec: QuadSpec | None = None) -> Estimate:
    """Sum over n != 0 of the single-nonzero tuple area: pi * integral of
    f (1-f)^(m-1)."""
    return sector_sum_ak(m, 1, spec)


def sector_sum_ak(m: int, k: int, spec: QuadSpec | None = None) -> Estimate:
    """A_k: total area of sectors with exactly k nonzero per-path windings,
    binom(m,k) * pi * integral of f^k (1-f)^(m-k)."""
    if not 1 <= k <= m:
        raise ValueError("need 1 <= k <= m")

    def f(xs):
        fx = np.clip(f_of_x_vec(xs), 0.0, 1.0)
        out = fx**k
        if m > k:
            with np.errstate(divide="ignore"):
                out = out * np.exp((m - k) * np.log1p(-fx))
        return out

    r = integrate_1d(f, SemiInfinite(0.0), spec or _OUTER_SPEC)
    c = math.comb(m, k) * math.pi
    return Estimate(c * r.value, c * r.err_est, "quadrature",
                    () if r.converged else ("tolerance not met",))


# ---------------------------------------------------------------------------
# the Phi pipeline


def phi_q(m: int, q: float, spec: QuadSpec | None = None) -> Estimate:
    """Master integral pi * integral of 1 - (1 - (1-q) f(x))^m over x >= 0.

    For large m the integration variable is rescaled by ln(m)/2 so the node
    budget concentrates where the integrand switches from 1 to 0."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if not 0.0 <= q < 1.0:
        raise ValueError("q must lie in [0, 1)")
    sub = 0.5 * math.log(m) if m >= 16 else 1.0

    def f(ys):
        z = (1.0 - q) * f_of_x_vec(sub * ys)
        return _one_minus_pow(z, m)

    r = integrate_1d(f, SemiInfinite(0.0), spec or _OUTER_SPEC)
    return Estimate(math.pi * sub * r.value, math.pi * sub * r.err_est, "quadrature",
                    () if r.converged else ("tolerance not met",))


def mean_s(m: int, q: float = Q_DEFAULT) -> Estimate:
    """Mean total arithmetic area inside the external frontier of m paths:
    2 Phi_0(m) - Phi_q(m)."""
    p0 = phi_q(m, 0.0)
    pq = phi_q(m, q)
    return Estimate(2.0 * p0.value - pq.value,
                    2.0 * p0.err + pq.err, "quadrature",
                    p0.flags + pq.flags)


def mean_s00(m: int, q: float = Q_DEFAULT) -> Estimate:
    """Mean area of sectors where every individual path winds zero times:
    Phi_0(m) - Phi_q(m)."""
    p0 = phi_q(m, 0.0)
    pq = phi_q(m, q)
    return Estimate(p0.value - pq.value, p0.err + pq.err, "quadrature",
                    p0.flags + pq.flags)


# ---------------------------------------------------------------------------
# asymptotics


def phi_q_asymptotic(m: int, q: float) -> float:
    """Large-m expansion of the master integral (valid for m >= 3)."""
    if m < 3:
        raise ValueError("asymptotic form needs m >= 3")
    if not 0.0 <= q < 1.0:
        raise ValueError("q must lie in [0, 1)")
    lm = math.log(m)
    return (
        0.5 * math.pi * lm
        - 0.25 * math.pi * math.log(lm)
        + 0.5 * math.pi * (math.log(1.0 - q) + 0.5 * math.log(4.0 / math.pi**3) + EULER_GAMMA)
    )


def mean_s_asymptotic(m: int) -> float:
    """Large-m mean total area: (pi/2)ln m - (pi/4)ln ln m + const."""
    if m < 2:
        raise ValueError("needs m >= 2")
    lm = math.log(m)
    const = 0.5 * math.log(25.0 / (4.0 * math.pi**3)) + EULER_GAMMA
    return 0.5 * math.pi * lm - 0.25 * math.pi * math.log(lm) + 0.5 * math.pi * const


def mean_s_minus_s0_asymptotic(m: int) -> float:
    """Large-m mean area of nonzero-total-winding sectors."""
    if m < 2:
        raise ValueError("needs m >= 2")
    lm = math.log(m)
    const = EULER_GAMMA - 0.5 * math.log(4.0 * math.pi)
    return 0.5 * math.pi * lm - 0.25 * math.pi * math.log(lm) + 0.5 * math.pi * const


def s0_limit() -> float:
    """Limit of the zero-total-winding inside area as m grows: (pi/2)ln(5/pi)."""
    return 0.5 * math.pi * math.log(5.0 / math.pi)


# ---------------------------------------------------------------------------
# two-path overlap quantities


def _overlap_kernel(u1, u2):
    denom = 2.0 + np.cosh(u1) + np.cosh(u2)
    c1 = u1 * u1 + math.pi**2
    c2 = u2 * u2 + math.pi**2
    return 1.0 / (denom * c1 * c2)


@lru_cache(maxsize=1)
def _overlap_integral() -> Estimate:
    r = integrate_nd(_overlap_kernel, [Infinite(even=True)] * 2,
                     QuadSpec.for_dim(2, rel_tol=1e-9))
    return Estimate(r.value, r.err_est, "quadrature")


def overlap_two_paths(q: float = Q_DEFAULT) -> Estimate:
    """Mean area overlap of two paths, 2 <S(1)> - <S(2)> =
    pi (2 - (1-q)^2) * integral of f^2."""
    base = _overlap_integral()
    c = math.pi * (2.0 - (1.0 - q) ** 2)
    return Estimate(c * base.value, c * base.err, "quadrature")


def circle_overlap_reference() -> float:
    """Overlap fraction for two equal circles pinned at one common point."""
    return 0.5 - 2.0 / math.pi**2


def _tanh_pair_kernel(u1, u2):
    """(tanh(u1/2)+tanh(u2/2)) / ((u1+u2)((2 pi)^2+(u1+u2)^2)(2+cosh u1+cosh u2)),
    with the removable u1 = -u2 singularity folded into sinh((u1+u2)/2)/(u1+u2)."""
    s = u1 + u2
    ratio = _sinhc_sech(s, -_lncosh(0.5 * u1) - _lncosh(0.5 * u2), math.log(2.0))
    denom = (2.0 + np.cosh(u1) + np.cosh(u2)) * ((2.0 * math.pi) ** 2 + s * s)
    return ratio / denom


@lru_cache(maxsize=1)
def _tanh_pair_integral() -> Estimate:
    r = integrate_nd(_tanh_pair_kernel, [Infinite()] * 2, QuadSpec.for_dim(2, rel_tol=1e-9))
    return Estimate(r.value, r.err_est, "quadrature")


def sum_sn_2() -> Estimate:
    """Sum over n != 0 of the two-path total-winding-n sector areas."""
    t = _tanh_pair_integral()
    return Estimate(math.pi / 3.0 - math.pi * t.value, math.pi * t.err, "quadrature")


def s0_overlap_two_paths(q: float = Q_DEFAULT) -> Estimate:
    """Zero-winding overlap 2 <S0(1)> - <S0(2)>, evaluated directly and
    cross-checked against the assembly from the other two-path quantities."""

    def f(u1, u2):
        denom = 2.0 + np.cosh(u1) + np.cosh(u2)
        c = (2.0 - (1.0 - q) ** 2) / ((u1 * u1 + math.pi**2) * (u2 * u2 + math.pi**2))
        s = u1 + u2
        ratio = _sinhc_sech(s, -_lncosh(0.5 * u1) - _lncosh(0.5 * u2), math.log(2.0))
        t = ratio / ((2.0 * math.pi) ** 2 + s * s)
        return (c - t) / denom

    r = integrate_nd(f, [Infinite()] * 2, QuadSpec.for_dim(2, rel_tol=1e-9))
    direct = math.pi * r.value
    # identity route: 2 S0(1) - S0(2) with S0(2) = 2 S(1) - overlap - sum_{n!=0} S_n(2)
    s1 = math.pi / 5.0
    s01 = math.pi / 30.0
    ov = overlap_two_paths(q)
    sn2 = sum_sn_2()
    assembled = 2.0 * s01 - (2.0 * s1 - ov.value - sn2.value)
    tol = 1e-6 + 10.0 * (r.err_est + ov.err + sn2.err)
    if abs(direct - assembled) > tol:
        raise AssertionError(
            f"two-path zero-winding overlap inconsistent: direct={direct}, "
            f"assembled={assembled}"
        )
    return Estimate(direct, math.pi * r.err_est, "quadrature")


# ---------------------------------------------------------------------------
# constants


def _k0_pow_integral(j: int, extra=None, spec: QuadSpec | None = None) -> Estimate:
    """integral over x > 0 of exp(-j x) K0(x)^j * extra(x), split at x = 1
    because K0 is logarithmic at the origin."""
    spec = spec or QuadSpec(rel_tol=1e-11, abs_tol=1e-14)

    def f(xs):
        # the sub-1e-16 tail contributes O(1e-11) and would force the K0
        # quadrature out to its cosh cutoff at u ~ ln(1/x); floor it
        xs = np.maximum(xs, 1e-16)
        k0, _, ok = bessel_k_vec(0.0, xs)
        if not ok:
            raise QuadratureError("K0 evaluation did not converge")
        out = np.exp(-j * xs) * k0**j
        if extra is not None:
            out = out * extra(xs)
        return out

    lo = integrate_1d(f, Finite(0.0, 1.0), spec)
    hi = integrate_1d(f, SemiInfinite(1.0), spec)
    return Estimate(lo.value + hi.value, lo.err_est + hi.err_est, "quadrature",
                    () if lo.converged and hi.converged else ("tolerance not met",))


@lru_cache(maxsize=None)
def constant_cj(j: int) -> Estimate:
    """c_j = integral of exp(-j x) K0(x)^j over x > 0."""
    if j < 1:
        raise ValueError("j must be >= 1")
    return _k0_pow_integral(j)


def _u_tanh_weight_vec(xs) -> np.ndarray:
    """integral over u > 0 of exp(-x cosh u) u tanh(u/2), vectorized."""
    xs = np.asarray(xs, dtype=float)

    def fvec(u):
        core = -np.outer(xs, np.cosh(u))
        return np.exp(core) * u * np.tanh(0.5 * u)

    values, _, _, ok = integrate_vec(fvec, SemiInfinite(0.0), _INNER_SPEC)
    if not ok:
        raise QuadratureError("u tanh weight integral did not converge")
    return values


@lru_cache(maxsize=None)
def constant_dj(j: int) -> Estimate:
    """d_j = integral of exp(-j x) K0(x)^(j-1) times the u-tanh weight."""
    if j < 1:
        raise ValueError("j must be >= 1")

    def f(xs):
        xs = np.maximum(xs, 1e-16)  # same tail floor as the c_j integrals
        k0, _, ok = bessel_k_vec(0.0, xs)
        if not ok:
            raise QuadratureError("K0 evaluation did not converge")
        return np.exp(-j * xs) * k0 ** (j - 1) * _u_tanh_weight_vec(xs)

    spec = QuadSpec(rel_tol=1e-11, abs_tol=1e-14)
    lo = integrate_1d(f, Finite(0.0, 1.0), spec)
    hi = integrate_1d(f, SemiInfinite(1.0), spec)
    return Estimate(lo.value + hi.value, lo.err_est + hi.err_est, "quadrature",
                    () if lo.converged and hi.converged else ("tolerance not met",))


@lru_cache(maxsize=None)
def constant_cjm(j: int, m: int) -> Estimate:
    """c_{j,m} = integral of exp(-j x) K0(x)^j (1 - f(x))^(m-j); c_{j,j} = c_j."""
    if j < 1:
        raise ValueError("j must be >= 1")
    if m < j:
        raise ValueError("need m >= j")
    if m == j:
        return constant_cj(j)

    def extra(xs):
        fx = np.clip(f_of_x_vec(xs), 0.0, 1.0)
        with np.errstate(divide="ignore"):
            return np.exp((m - j) * np.log1p(-fx))

    return _k0_pow_integral(j, extra)


def c22_series(n_terms: int = 2_000_000) -> Estimate:
    """Series route to c_{2,2}: (3/2) z2 - 1 + sum over k of
    [(3/2) z2 prod(1-1/(2i))^2 - prod(1-1/(2i+1))^2].

    The two product sequences diverge separately and cancel at leading
    order; terms fall off like 1/k^2, so the tail beyond the summed range
    is extrapolated from a fitted a/k^2 + b/k^3 law."""
    z2 = math.pi**2 / 6.0
    total = 1.5 * z2 - 1.0
    p = 1.0  # prod (1 - 1/(2i))^2
    r = 1.0  # prod (1 - 1/(2i+1))^2
    chunk = 200_000
    k = 0
    last_terms = None
    while k < n_terms:
        nn = min(chunk, n_terms - k)
        i = np.arange(k + 1, k + nn + 1, dtype=float)
        pf = np.cumprod(((2.0 * i - 1.0) / (2.0 * i)) ** 2) * p
        rf = np.cumprod(((2.0 * i) / (2.0 * i + 1.0)) ** 2) * r
        terms = 1.5 * z2 * pf - rf
        total += float(terms.sum())
        p = float(pf[-1])
        r = float(rf[-1])
        k += nn
        last_terms = terms
    # tail: fit term_k ~ a/k^2 + b/k^3 on the last chunk, integrate beyond K
    i = np.arange(k - last_terms.size + 1, k + 1, dtype=float)
    A = np.stack([1.0 / i**2, 1.0 / i**3], axis=1)
    coef, *_ = np.linalg.lstsq(A, last_terms, rcond=None)
    a, b = float(coef[0]), float(coef[1])
    tail = a * (1.0 / k) + (a + b) * (0.5 / k**2)
    err = abs(a) / k**2 + 10.0 * abs(b) / k**2
    return Estimate(total + tail, err, "series")


@dataclass
class PaperConstants:
    """Configured q and cached numerical constants of the sector expansions."""

    q: float = Q_DEFAULT
    euler_gamma: float = EULER_GAMMA
    _cj: dict = field(default_factory=dict)
    _dj: dict = field(default_factory=dict)
    _cjm: dict = field(default_factory=dict)

    def cj(self, j: int) -> Estimate:
        if j not in self._cj:
            self._cj[j] = constant_cj(j)
        return self._cj[j]

    def dj(self, j: int) -> Estimate:
        if j not in self._dj:
            self._dj[j] = constant_dj(j)
        return self._dj[j]

    def cjm(self, j: int, m: int) -> Estimate:
        if (j, m) not in self._cjm:
            self._cjm[(j, m)] = constant_cjm(j, m)
        return self._cjm[(j, m)]

    @property
    def d2(self) -> float:
        return self.dj(2).value

    @property
    def c3(self) -> float:
        return self.cj(3).value
