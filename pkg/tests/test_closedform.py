from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kekule_integrals import numtheory as nt
from kekule_integrals.closedform import (
    VerificationError,
    dn_trig,
    fourier_series_eval,
    inner_integral_closed,
    j_closed_oracle,
    kekule_from_integral,
    lemma_form,
    principal_log_sin_plus_cos,
    prop_fourier_coeff,
    series_partial,
    series_target,
    yz_closed,
)
from kekule_integrals.numtheory import DomainError
from kekule_integrals.realfield import (
    PrecisionContext,
    complex_log_integral,
    double_integral_numeric,
    inner_integral_numeric,
)

CTX = PrecisionContext(60)
MP = CTX.mp


def close(a, b, tol):
    return abs(MP.mpf(a) - MP.mpf(b)) < tol


# ---------------------------------------------------------------- inner integral

def test_inner_closed_examples():
    pi, s6 = MP.pi, MP.sqrt(6)
    assert close(inner_integral_closed(0, 2, CTX).value.value, 2 * pi / s6, 1e-55)
    v4 = inner_integral_closed(4, 2, CTX)
    assert close(v4.value.value, pi * (-40 + 49 * 2 / s6), 1e-50)
    assert v4.exact_parts == (40, 49)
    assert inner_integral_closed(7, 5, CTX).value.value == 0


def test_inner_closed_rejects_nonpositive_k():
    with pytest.raises(DomainError):
        inner_integral_closed(2, 0, CTX)
    with pytest.raises(DomainError):
        inner_integral_closed(2, "-1", CTX)


@pytest.mark.parametrize("n", [0, 2, 6, 10, 14, 20])
@pytest.mark.parametrize("k", [Fraction(1, 2), 1, 2, 3, 4, Fraction(7, 3)])
def test_inner_closed_matches_quadrature(n, k):
    closed = inner_integral_closed(n, k, CTX).value
    numeric = inner_integral_numeric(n, k, CTX)
    assert abs(closed.value - numeric.value) <= closed.error_bound + numeric.error_bound + MP.mpf(10) ** -55


def test_real_k_path_agrees_with_rational_path():
    exact = inner_integral_closed(8, Fraction(5, 2), CTX).value
    real = inner_integral_closed(8, MP.mpf(5) / 2, CTX).value
    assert abs(exact.value - real.value) < 1e-50


@pytest.mark.parametrize("n", [0, 2, 4, 8, 12])
@pytest.mark.parametrize("k", [1, 2, 5, Fraction(1, 3)])
def test_triangular_reading_coincides(n, k):
    a = lemma_form(n, k, CTX)
    b = inner_integral_closed(n, k, CTX).value
    assert abs(a.value - b.value) < 1e-45 * max(1, abs(float(b.value)))


# ---------------------------------------------------------------- y, z closed forms

def test_yz_closed_examples():
    y, z = yz_closed(1, 3, CTX)
    assert close(y.value, 4, 1e-50) and close(z.value, 7, 1e-50)
    y, z = yz_closed(2, 1, CTX)
    assert close(y.value, 24, 1e-50) and close(z.value, 17, 1e-50)
    y, z = yz_closed(0, Fraction(9, 4), CTX)
    assert close(y.value, 0, 1e-50) and close(z.value, 1, 1e-50)


@pytest.mark.parametrize("k", range(1, 9))
def test_yz_closed_matches_recurrence(k):
    for n in range(41):
        y, z = yz_closed(n, k, CTX)
        assert abs(y.value - nt.y_seq(n, k)) <= 1e-40
        assert abs(z.value - nt.z_seq(n, k)) <= 1e-40


# ---------------------------------------------------------------- d_n and K(P_n)

def test_dn_trig_examples():
    assert [dn_trig(n, CTX).rounded() for n in (0, 1, 3)] == [1, 5, 485]


def test_dn_trig_matches_companion_up_to_60():
    for n in range(61):
        t = dn_trig(n, CTX)
        assert t.rounded() == nt.companion_d(n)
        assert abs(t.value.value - nt.companion_d(n)) < MP.mpf(10) ** (-CTX.digits + 15)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 9])
def test_dn_complex_path_agrees(n):
    assert dn_trig(n, CTX, via="complex").rounded() == nt.companion_d(n)


@pytest.mark.parametrize("n,expected", [(0, 0), (2, 40), (5, 38804)])
def test_kekule_from_integral_examples(n, expected):
    assert kekule_from_integral(n, CTX) == expected == nt.kekule_c(n)


def test_kekule_from_integral_tolerance_is_enforced():
    with pytest.raises(VerificationError):
        kekule_from_integral(3, PrecisionContext(20), tolerance=1e-80)


# ---------------------------------------------------------------- J(n, M)

def _inner(n, t, mp):
    """Independent oracle for the t-integrand, via mpmath.quad at 45 digits."""
    return mp.quad(lambda x: mp.cos(n * x) / (t + mp.sin(x) ** 2),
                   [-mp.pi, -mp.pi / 2, 0, mp.pi / 2, mp.pi])


@pytest.mark.parametrize("n", [0, 2, 4])
def test_j_oracle_derivative_is_the_inner_integral(n):
    # fourth-order central difference with step 1e-12 at 80 digits
    mp = mpmath.MPContext()
    mp.dps = 80
    ctx = PrecisionContext(80)
    h = mp.mpf(10) ** -12

    def J(m):
        return mp.mpf(j_closed_oracle(n, m, ctx).value)

    for t in ("1/3", "1/2", "1", "2", "7/2"):
        tv = mp.mpf(Fraction(t).numerator) / Fraction(t).denominator
        deriv = (-J(tv + 2 * h) + 8 * J(tv + h) - 8 * J(tv - h) + J(tv - 2 * h)) / (12 * h)
        mp.dps = 45
        ref = _inner(n, tv, mp)
        mp.dps = 80
        assert abs(deriv - ref) < 1e-30


def test_j_oracle_examples():
    pi = MP.pi
    assert close(j_closed_oracle(2, 1, CTX).value, 4 * pi * (MP.sqrt(2) - 1), 1e-55)
    assert close(j_closed_oracle(4, 2, CTX).value, 4 * (-12 + 5 * MP.sqrt(6)) * pi, 1e-55)
    target = 2 * pi * MP.log((7 + 3 * MP.sqrt(5)) / 2)
    assert close(j_closed_oracle(0, "5/4", CTX).value, target, 1e-55)
    with pytest.raises(DomainError):
        j_closed_oracle(6, 1, CTX)


@pytest.mark.parametrize("n", [0, 2, 4])
@pytest.mark.parametrize("m", ["1/3", "1/2", "1", "2", "3", "5/4", "sqrt2"])
def test_j_oracle_matches_double_integral(n, m):
    a = j_closed_oracle(n, m, CTX)
    b = double_integral_numeric(n, m, CTX)
    assert abs(a.value - b.value) <= a.error_bound + b.error_bound + MP.mpf(10) ** -55


def test_precision_scaling_on_oracle_cases():
    lo, hi = PrecisionContext(25), PrecisionContext(50)
    for n, m in [(0, "2"), (2, "1"), (4, "1/2")]:
        exact = j_closed_oracle(n, m, PrecisionContext(90)).value
        r_lo = abs(double_integral_numeric(n, m, lo).value - exact)
        r_hi = abs(double_integral_numeric(n, m, hi).value - exact)
        assert r_hi * MP.mpf(10) ** 10 <= max(r_lo, MP.mpf(10) ** -40)


# ---------------------------------------------------------------- Fourier coefficients

def test_prop_examples_verbatim():
    c2 = prop_fourier_coeff("cos", 2, CTX)
    assert c2.re.value == 0 and c2.im.value == 0
    c4 = prop_fourier_coeff("cos", 4, CTX)
    assert close(c4.re.value, -MP.pi / 2, 1e-55) and c4.im.value == 0
    c1 = prop_fourier_coeff("cos", 1, CTX)
    assert close(c1.im.value, -MP.sqrt(2) * MP.pi, 1e-55) and c1.re.value == 0


def test_prop_domain():
    with pytest.raises(DomainError):
        prop_fourier_coeff("cos", 0, CTX)
    with pytest.raises(DomainError):
        prop_fourier_coeff("tan", 3, CTX)


CASES = [(mode, n) for mode in ("cos", "sin") for n in range(1, 17)]


@pytest.mark.parametrize("mode,n", [c for c in CASES if not (c[0] == "cos" and c[1] % 4 == 0)])
def test_prop_matches_integral(mode, n):
    stated = prop_fourier_coeff(mode, n, CTX)
    numeric = complex_log_integral(mode, n, CTX)
    assert abs(stated.re.value - numeric.re.value) < 1e-40
    assert abs(stated.im.value - numeric.im.value) < 1e-40


@pytest.mark.parametrize("n", [4, 8, 12, 16])
def test_cos_real_part_sign_at_multiples_of_four(n):
    # the stated real part is the negative of the integral for n = 0 mod 4
    stated = prop_fourier_coeff("cos", n, CTX)
    numeric = complex_log_integral("cos", n, CTX)
    assert abs(stated.re.value + numeric.re.value) < 1e-40
    assert abs(stated.re.value) > 0.1
    assert abs(stated.im.value - numeric.im.value) < 1e-40


def test_fourier_series_imaginary_part_converges():
    for x, target in [("0", 0), ("pi/2", 0), ("pi", MP.pi)]:
        got = fourier_series_eval(x, 4000, CTX)
        assert abs(got.im.value - target) < 1e-2


def test_fourier_series_real_part_offset_is_ln2():
    # with the stated coefficients the real part settles at -ln 2 rather than 0
    for x in ("0", "pi/2", "pi"):
        got = fourier_series_eval(x, 4000, CTX)
        assert abs(got.re.value + MP.log(2)) < 1e-2


def test_fourier_series_singular_points():
    with pytest.raises(DomainError):
        fourier_series_eval("3*pi/4", 10, CTX)
    with pytest.raises(DomainError):
        fourier_series_eval("-1*pi/4", 10, CTX)


def test_principal_log():
    v = principal_log_sin_plus_cos("pi", CTX)
    assert close(v.re.value, 0, 1e-50) and close(v.im.value, MP.pi, 1e-50)


# ---------------------------------------------------------------- series

def test_series_examples():
    assert series_partial("ln2", 4, CTX).value == Fraction(-1, 4) or close(series_partial("ln2", 4, CTX).value, -0.25, 1e-55)
    assert close(series_partial("sqrt2", 1, CTX).value, -2, 1e-55)
    with pytest.raises(DomainError):
        series_partial("pi", 3, CTX)


@pytest.mark.parametrize("which", ["sqrt2", "ln2"])
@pytest.mark.parametrize("N", [10**3, 10**4, 10**5])
def test_series_tail_bound(which, N):
    ctx = PrecisionContext(20)
    assert abs(series_partial(which, N, ctx).value - series_target(which, ctx)) <= 10 / N


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 400))
def test_series_partial_sums_are_consistent(N):
    # consecutive partial sums differ by exactly one term
    ctx = PrecisionContext(20)
    a = series_partial("sqrt2", N, ctx).value
    b = series_partial("sqrt2", N + 1, ctx).value
    n = N + 1
    term = (-1) ** ((n + 3) // 4) * ((-1) ** (n + 1) + 1) / (2 * (n // 2) + 1)
    assert abs(b - a - term) < 1e-15
