from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from higherfermi.errors import PoleError, UnderflowError
from higherfermi.special import (
    bessel_k,
    bessel_k_array,
    bessel_k_scaled,
    gamma,
    log_gamma,
    rgamma,
    sinpi,
    trapezoid_line,
    xi,
    zeta,
)

mpmath.mp.dps = 30

finite_re = st.floats(-30, 30, allow_nan=False)
finite_im = st.floats(-60, 60, allow_nan=False)


def rel(a, b):
    return abs(complex(a) - complex(b)) / max(abs(complex(b)), 1e-300)


@pytest.mark.parametrize("z", [0.5, 1.0, 3.7, 0.25 + 7j, -2.5 + 0.1j, 12 - 40j, 1e-3, -0.999])
def test_gamma_against_mpmath(z):
    assert rel(gamma(z), complex(mpmath.gamma(z))) < 1e-13


@given(finite_re, finite_im)
@settings(max_examples=200, deadline=None)
def test_log_gamma_matches_mpmath_branch(x, y):
    z = complex(x, y)
    if abs(z - round(x)) < 1e-6 and round(x) <= 0:
        return
    want = complex(mpmath.loggamma(z))
    got = log_gamma(z)
    assert abs(got - want) < 1e-11 * max(1.0, abs(want))


@given(st.floats(0.1, 20), finite_im)
@settings(max_examples=100, deadline=None)
def test_gamma_recurrence(x, y):
    z = complex(x, y)
    lhs = log_gamma(z + 1)
    rhs = log_gamma(z) + cmath.log(z)
    d = lhs - rhs
    assert abs(d.real) < 1e-11 * max(1, abs(lhs))
    assert abs((d.imag / (2 * math.pi)) - round(d.imag / (2 * math.pi))) < 1e-11 * max(1, abs(lhs))


@given(st.floats(-10, 10), st.floats(-10, 10))
@settings(max_examples=100, deadline=None)
def test_gamma_conjugation(x, y):
    z = complex(x, y)
    if abs(y) < 1e-3 and x <= 0:
        return
    assert log_gamma(z.conjugate()) == pytest.approx(log_gamma(z).conjugate(), rel=1e-13, abs=1e-13)


@given(st.floats(-6, 6), st.floats(-6, 6))
@settings(max_examples=100, deadline=None)
def test_reflection_formula(x, y):
    z = complex(x, y)
    if abs(sinpi(z)) < 1e-6:
        return
    lhs = gamma(z) * gamma(1 - z)
    assert rel(lhs, math.pi / sinpi(z)) < 1e-11


def test_gamma_poles_and_rgamma_zeros():
    for n in range(0, 6):
        with pytest.raises(PoleError):
            gamma(-n)
        assert rgamma(-n) == 0


def test_trapezoid_gaussian():
    val, err, n = trapezoid_line(lambda t: np.exp(-t * t), -10, 10, 16)
    assert abs(val - math.sqrt(math.pi)) < 1e-14
    assert err < 1e-10


@pytest.mark.parametrize(
    "nu,x",
    [(0, 1.0), (0.5, 2.0), (3j, 0.7), (9.53j, 0.4), (15j, 3.0), (2.5 + 1j, 5.0), (0.1j, 40.0), (30j, 20.0)],
)
def test_bessel_k_against_mpmath(nu, x):
    want = complex(mpmath.besselk(nu, x))
    assert rel(bessel_k(nu, x), want) < 1e-10


def test_bessel_k_half_order_closed_form():
    for x in (0.3, 1.0, 7.0):
        assert rel(bessel_k(0.5, x), math.sqrt(math.pi / (2 * x)) * math.exp(-x)) < 1e-13


def test_bessel_k_scaled_consistent():
    x = 50.0
    assert rel(bessel_k_scaled(4j, x) * math.exp(-x), bessel_k(4j, x)) < 1e-12


def test_bessel_k_real_for_imaginary_order():
    assert isinstance(bessel_k(5j, 1.3), complex) or isinstance(bessel_k(5j, 1.3), float)
    assert abs(complex(bessel_k(5j, 1.3)).imag) == 0


def test_bessel_k_array_matches_scalar():
    x = np.geomspace(0.05, 60, 57)
    for nu in (0, 9.53j, 2 + 0.5j):
        arr = bessel_k_array(nu, x)
        ref = np.array([complex(bessel_k(nu, float(v))) for v in x])
        assert np.max(np.abs(arr - ref) / np.abs(ref)) < 1e-10


def test_bessel_k_array_underflow():
    with pytest.raises(UnderflowError):
        bessel_k_array(1j, np.array([800.0]))
    mant, logs = bessel_k_array(1j, np.array([800.0]), log_scale=True)
    want = float(mpmath.log(abs(mpmath.besselk(1j, 800))))
    assert abs(logs[0] + math.log(abs(mant[0])) - want) < 1e-9


@pytest.mark.parametrize("s", [2, 3.5, 0.5 + 14.134725j, -3.5, 0.3 - 20j, 1.5 + 100j])
def test_zeta_against_mpmath(s):
    want = complex(mpmath.zeta(s))
    got = zeta(s)
    assert abs(got - want) < 1e-11 * max(1.0, abs(want))


def test_zeta_pole():
    with pytest.raises(PoleError):
        zeta(1)


@given(st.floats(-3, 4), st.floats(-40, 40))
@settings(max_examples=60, deadline=None)
def test_xi_functional_equation(x, y):
    s = complex(x, y)
    a, b = xi(s), xi(1 - s)
    assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_xi_finite_at_one():
    assert rel(xi(1.0), xi(1.0 + 1e-7)) < 1e-5


def test_named_values():
    assert abs(log_gamma(1)) < 1e-15
    assert abs(log_gamma(0.5) - 0.5723649429247001) < 1e-14
    assert abs(bessel_k(0.5, 1.0) - 0.46106850444789454) < 1e-14
    assert abs(bessel_k(0, 2.0) - 0.1138938727) < 1e-10
    assert abs(zeta(2) - math.pi**2 / 6) < 1e-14
    assert abs(zeta(3) - 1.2020569032) < 1e-10
    assert abs(zeta(0.5 + 14.1347j)) < 1e-3


def test_reflection_on_thousand_points():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(1000):
        z = complex(rng.uniform(-10, 10), rng.uniform(-20, 20))
        worst = max(worst, abs(gamma(z) * gamma(1 - z) * sinpi(z) / math.pi - 1))
    assert worst < 1e-10


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.5, 20))
@settings(max_examples=60, deadline=None)
def test_bessel_k_conjugation_and_recurrence(a, b, x):
    nu = complex(a, b)
    k = complex(bessel_k(nu, x))
    assert abs(complex(bessel_k(nu.conjugate(), x)) - k.conjugate()) <= 1e-12 * abs(k)
    lhs = complex(bessel_k(nu - 1, x)) - complex(bessel_k(nu + 1, x))
    rhs = -(2 * nu / x) * k
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs), abs(complex(bessel_k(nu + 1, x))))


def test_imaginary_order_two_schemes():
    # shifted-line quadrature against the real-axis cosh(nu t) integral done by mpmath
    nu, x = 9.5337j, 1.0
    ref = mpmath.quad(lambda t: mpmath.exp(-x * mpmath.cosh(t)) * mpmath.cos(9.5337 * t), [0, 2, 4, 8])
    assert abs(complex(bessel_k(nu, x)) - float(ref)) < 1e-10 * abs(float(ref))
