import math

import numpy as np
import pytest

from winding_sectors.analytic import g_alpha
from winding_sectors.bessel import bessel_i, bessel_k, g_alpha_series


@pytest.mark.parametrize("x", [0.3, 1.0, 5.0, 20.0])
def test_k_half_closed_form(x):
    exact = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x)
    assert abs(bessel_k(0.5, x) - exact) <= 1e-10 * exact


def test_k0_large_x_asymptotic():
    x = 20.0
    # three-term large-x expansion; truncation error ~ 1e-6 relative here
    asym = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * (
        1.0 - 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x))
    got = bessel_k(0.0, x)
    assert abs(got - asym) / asym < 1e-5


def test_k_even_in_alpha():
    assert bessel_k(0.3, 2.0) == bessel_k(-0.3, 2.0)
    a = 0.27
    assert bessel_k(a, 1.5) == pytest.approx(bessel_k(1.0 - (1.0 - a), 1.5), rel=1e-14)


def test_k_times_exp_monotone_decreasing():
    for a in (0.0, 0.4, 1.0):
        xs = np.array([0.1, 0.3, 1.0, 3.0, 10.0, 30.0])
        vals = [bessel_k(a, x) * math.exp(x) for x in xs]
        assert all(v1 > v2 for v1, v2 in zip(vals, vals[1:]))


def test_k_domain_errors():
    with pytest.raises(ValueError):
        bessel_k(0.0, 0.0)
    with pytest.raises(ValueError):
        bessel_k(0.0, -1.0)
    with pytest.raises(ValueError):
        bessel_k(1.5, 1.0)


def test_i_series_values():
    assert bessel_i(0.0, 0.0) == 1.0
    assert bessel_i(1.0, 0.0) == 0.0
    # independent reference route for a nontrivial point
    from scipy.special import iv
    for nu, x in ((0.0, 1.0), (0.7, 3.0), (4.0, 25.0), (0.25, 50.0)):
        assert bessel_i(nu, x) == pytest.approx(float(iv(nu, x)), rel=1e-12)


def test_i_refuses_out_of_range():
    with pytest.raises(ValueError):
        bessel_i(0.0, 51.0)
    with pytest.raises(ValueError):
        bessel_i(-0.5, 1.0)
    with pytest.raises(ValueError):
        bessel_i(0.5, -1.0)


def test_dual_representation_of_winding_characteristic():
    # Bessel-series route vs integral route at the spec point
    assert abs(g_alpha_series(0.3, 1.0) - g_alpha(0.3, 1.0)) < 1e-8


def test_series_vs_integral_on_grid():
    for a in (0.1, 0.3, 0.5, 0.7, 0.9):
        for x in (0.1, 1.0, 5.0, 20.0):
            assert abs(g_alpha_series(a, x) - g_alpha(a, x)) < 1e-8
