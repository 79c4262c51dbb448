import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import optimize, stats

from lindeberg.constants import (compute_constants, constants, delta1, delta1_array, phi_sqrt_odds,
                                 phi_sqrt_odds_derivative, psi, psi_tilde, t_thresholds)
from lindeberg.specfun import Tolerance

mpmath.mp.dps = 30


def _kappa_profile(x):
    return mpmath.sqrt((mpmath.cos(x) - 1 + x ** 2 / 2) ** 2 + (mpmath.sin(x) - x) ** 2) / x ** 2


def test_x0_and_kappa_maximise_profile():
    # x0 is the stationary point of the kappa profile on (pi, 2 pi); solve it independently
    x0 = mpmath.findroot(lambda x: mpmath.diff(_kappa_profile, x), 5.5)
    c = constants()
    assert c.x0 == pytest.approx(float(x0), abs=1e-10)
    assert c.kappa == pytest.approx(float(_kappa_profile(x0)), abs=1e-12)
    assert c.gamma_star == pytest.approx(1 / math.sqrt(6 * float(_kappa_profile(x0))), abs=1e-12)


def test_psi_peak_defines_x_phi_and_c_phi():
    res = optimize.minimize_scalar(lambda x: -psi(x), bounds=(0.01, 1.0), method="bounded",
                                   options={"xatol": 1e-12})
    c = constants()
    assert c.x_phi == pytest.approx(res.x, abs=1e-6)
    assert c.c_phi == pytest.approx(-res.fun, abs=1e-12)
    assert c.p_phi == pytest.approx(1 / (1 + res.x ** 2), abs=1e-6)


def test_p0_is_real_root_of_cubic():
    roots = np.roots([1.0, 0.0, 1.0, -1.0])
    real = roots[np.abs(roots.imag) < 1e-12].real
    assert len(real) == 1
    assert constants().p0 == pytest.approx(real[0], abs=1e-14)


def test_named_values_to_printed_digits():
    c = constants()
    assert abs(c.x0 - 5.487414) < 1e-5
    assert abs(c.kappa - 0.5315) < 1e-4
    assert abs(c.gamma_star - 0.5599) < 1e-4
    assert abs(c.x_phi - 0.213105) < 1e-6
    assert abs(c.c_phi - 0.54093) < 1e-5
    assert abs(c.p_phi - 0.9565) < 1e-4
    assert abs(c.p0 - 0.6823) < 1e-4


def test_tolerance_changes_do_not_move_constants():
    loose = compute_constants(Tolerance(abs_tol=1e-10, rel_tol=1e-10))
    tight = constants()
    for k, v in tight.as_dict().items():
        assert getattr(loose, k) == pytest.approx(v, abs=1e-8)


@given(st.floats(min_value=1e-6, max_value=1 - 1e-6))
def test_delta1_matches_scipy_formula(p):
    big, small = max(p, 1 - p), min(p, 1 - p)
    expected = stats.norm.cdf(math.sqrt(small / big)) - small
    assert delta1(p) == pytest.approx(expected, rel=1e-13)
    assert delta1(p) == delta1(1 - p) or delta1(p) == pytest.approx(delta1(1 - p), rel=1e-15)


def test_delta1_array_agrees_with_scalar():
    ps = np.linspace(0.01, 0.99, 199)
    np.testing.assert_allclose(delta1_array(ps), [delta1(p) for p in ps], rtol=1e-14)
    assert delta1(0.5) == pytest.approx(stats.norm.cdf(1) - 0.5, rel=1e-15)
    assert psi_tilde(0.7) == pytest.approx(delta1(0.7), rel=1e-15)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.5])
def test_delta1_domain(bad):
    with pytest.raises(ValueError):
        delta1(bad)
    with pytest.raises(ValueError):
        delta1_array([0.5, bad])


@given(st.floats(min_value=0.01, max_value=0.99))
def test_phi_sqrt_odds_derivative_is_numeric_derivative(p):
    numeric = mpmath.diff(lambda t: mpmath.ncdf(mpmath.sqrt(t / (1 - t))), mpmath.mpf(p))
    assert phi_sqrt_odds_derivative(p) == pytest.approx(float(numeric), rel=1e-12)


@given(st.floats(min_value=0.01, max_value=50.0))
def test_t_thresholds_order_and_continuity(gamma):
    th = t_thresholds(gamma)
    assert 0 < th.t_gamma
    assert 0 <= th.t1_gamma <= th.t2_gamma


def test_t_thresholds_limits():
    gs = constants().gamma_star
    big = t_thresholds(1e9)
    inf = t_thresholds(math.inf)
    assert big.t_gamma == pytest.approx(inf.t_gamma, rel=1e-6)
    assert big.t2_gamma == pytest.approx(inf.t2_gamma, rel=1e-6)
    at = t_thresholds(gs)
    assert at.t1_gamma == pytest.approx(at.t2_gamma, rel=1e-12)
    with pytest.raises(ValueError):
        t_thresholds(0.0)
