from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kekule_integrals.numtheory import DomainError
from kekule_integrals.realfield import (
    BigReal,
    Limit,
    PrecisionContext,
    QuadratureError,
    complex_log_integral,
    double_integral_numeric,
    fubini_single,
    inner_integral_numeric,
    integrate_tanh_sinh,
    mpcontext,
)

CTX = PrecisionContext(60)


def oracle(dps=80):
    mp = mpmath.mp.clone() if hasattr(mpmath.mp, "clone") else mpmath.MPContext()
    mp.dps = dps
    return mp


def test_precision_context_bounds():
    with pytest.raises(DomainError):
        PrecisionContext(10)
    assert PrecisionContext(40).mp.dps == 55


def test_contexts_are_independent():
    a, b = mpcontext(30), mpcontext(90)
    assert a is not b and a.dps == 30 and b.dps == 90


@pytest.mark.parametrize("token,coeff,rad,tag", [
    ("1", 1, 1, "1"),
    ("5/4", Fraction(5, 4), 1, "5/4"),
    ("3*sqrt2", 3, 2, "3*sqrt2"),
    ("sqrt8", 2, 2, "2*sqrt2"),
    ("√2", 1, 2, "sqrt2"),
])
def test_limit_parse(token, coeff, rad, tag):
    lim = Limit.parse(token)
    assert (lim.coeff, lim.radicand, lim.tag) == (Fraction(coeff), rad, tag)


@pytest.mark.parametrize("token", ["1.5", "0.25", "1e-3", "abc", ""])
def test_limit_rejects_decimals_and_junk(token):
    with pytest.raises(DomainError):
        Limit.parse(token)


def test_from_decimal_error_bound():
    x = BigReal.from_decimal("0.125")
    assert float(x.error_bound) == pytest.approx(5e-4)
    y = BigReal.from_decimal("1.5", "1e-40")
    assert float(y.error_bound) == pytest.approx(1e-40)


def test_inverse_sqrt_singularity():
    r = integrate_tanh_sinh(lambda t: 1 / CTX.mp.sqrt(t), 0, 1, CTX)
    assert abs(r.value - 2) < 1e-55
    assert r.error_bound < 1e-50


def test_log_singularity():
    r = integrate_tanh_sinh(lambda t: CTX.mp.log(t), 0, 1, CTX)
    assert abs(r.value + 1) < 1e-55


def test_reversed_and_empty_interval():
    mp = CTX.mp
    r = integrate_tanh_sinh(mp.exp, 1, 0, CTX)
    assert abs(r.value + (mp.e - 1)) < 1e-55
    assert integrate_tanh_sinh(mp.exp, 1, 1, CTX).value == 0


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=1, max_size=6), st.integers(1, 5))
def test_polynomials_against_exact_antiderivative(coeffs, b):
    mp = CTX.mp
    r = integrate_tanh_sinh(lambda x: mp.fsum(c * x**i for i, c in enumerate(coeffs)), 0, b, CTX)
    exact = sum(Fraction(c * b ** (i + 1), i + 1) for i, c in enumerate(coeffs))
    assert abs(r.value - mp.mpf(exact.numerator) / exact.denominator) < 1e-50 * max(1, abs(float(exact)))


def test_nonconvergence_raises_with_estimate():
    mp = CTX.mp
    with pytest.raises(QuadratureError) as info:
        integrate_tanh_sinh(lambda x: mp.sin(1 / x), 0, 1, CTX, max_level=4)
    assert isinstance(info.value.estimate, BigReal)


@pytest.mark.parametrize("n,k", [(0, 2), (4, Fraction(1, 2)), (6, 3), (3, 5), (10, Fraction(7, 3))])
def test_inner_integral_against_mpmath_quad(n, k):
    mp = oracle()
    kk = mp.mpf(k.numerator) / k.denominator if isinstance(k, Fraction) else mp.mpf(k)
    ref = mp.quad(lambda x: mp.cos(n * x) / (kk + mp.sin(x) ** 2), [-mp.pi, -mp.pi / 2, 0, mp.pi / 2, mp.pi])
    got = inner_integral_numeric(n, k, CTX)
    assert abs(got.value - ref) < 1e-45


def test_inner_integral_domain():
    with pytest.raises(DomainError):
        inner_integral_numeric(2, 0, CTX)
    with pytest.raises(DomainError):
        inner_integral_numeric(-1, 1, CTX)


@pytest.mark.parametrize("n,upper", [(0, "1"), (2, "3"), (4, "5/4"), (6, "1/2"), (2, "2*sqrt2")])
def test_double_integral_matches_fubini_reduction(n, upper):
    a = double_integral_numeric(n, upper, CTX)
    b = fubini_single(n, upper, CTX)
    assert abs(a.value - b.value) < 1e-45


def test_double_integral_with_lower_limit_is_additive():
    mp = CTX.mp
    whole = double_integral_numeric(4, "2", CTX)
    left = double_integral_numeric(4, "1", CTX)
    right = double_integral_numeric(4, "2", CTX, lower="1")
    assert abs(whole.value - left.value - right.value) < 1e-45


def test_double_integral_nested_path():
    ctx = PrecisionContext(25)
    nested = double_integral_numeric(2, "1", ctx, lower="1/2", nested=True)
    fast = double_integral_numeric(2, "1", ctx, lower="1/2")
    assert abs(nested.value - fast.value) < 1e-20
    with pytest.raises(DomainError):
        double_integral_numeric(2, "1", ctx, nested=True)


def test_fubini_against_mpmath_quad():
    mp = oracle()
    m = 3
    ref = mp.quad(lambda x: mp.cos(4 * x) * mp.log1p(m / mp.sin(x) ** 2), [-mp.pi, 0, mp.pi])
    assert abs(fubini_single(4, m, CTX).value - ref) < 1e-40


@pytest.mark.parametrize("mode,n", [("cos", 1), ("cos", 4), ("sin", 3), ("sin", 6), ("cos", 9)])
def test_complex_log_integral_against_mpmath_quad(mode, n):
    mp = oracle()
    trig = mp.cos if mode == "cos" else mp.sin
    pts = [-mp.pi, -mp.pi / 4, 3 * mp.pi / 4, mp.pi]
    ref = mp.quad(lambda x: trig(n * x) * mp.log(mp.mpc(mp.sin(x) + mp.cos(x))), pts)
    got = complex_log_integral(mode, n, CTX)
    assert abs(got.re.value - ref.real) < 1e-40
    assert abs(got.im.value - ref.imag) < 1e-40
