"""Closed-form evaluators.

Covers the evaluation of the integral of cos(n x)/(k + sin^2 x) over
[-pi, pi] through the (y, z) recurrences, the Binet/hyperbolic forms of
y and z, the trigonometric form of the companion sequence, the integral
representation of the Kekulé numbers, antiderivatives of the double
integral for n = 0, 2, 4, the Fourier coefficients of ln(sin x + cos x) and
the two series obtained from them.

Formulas for the Fourier coefficients are evaluated exactly as stated,
floors and parities included; they are not simplified.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import numtheory as nt
from .numtheory import DomainError
from .realfield import (
    DEFAULT_CONTEXT,
    GUARD_DIGITS,
    BigComplex,
    BigReal,
    Limit,
    PrecisionContext,
    inner_integral_numeric,
    mpcontext,
    to_mpf,
)


class VerificationError(ArithmeticError):
    """A numerically evaluated identity missed its tolerance."""


@dataclass(frozen=True)
class InnerIntegralValue:
    n: int
    k: object
    value: BigReal
    exact_parts: Optional[tuple] = None  # (y, z) for rational k

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class TrigClosedForm:
    n: int
    value: BigReal

    def rounded(self) -> int:
        return int(mpcontext(self.value.digits + GUARD_DIGITS).nint(self.value.value))


def _digits_of(x) -> int:
    """Rough decimal size of |x| (>= 0)."""
    x = abs(float(x)) if not isinstance(x, int) else abs(x)
    if isinstance(x, int):
        return len(str(x)) if x else 0
    return max(0, int(math.log10(x)) + 1) if x >= 1 else 0


def _is_exact(k) -> bool:
    return isinstance(k, (int, Fraction)) and not isinstance(k, bool)


def theorem2_real(n: int, k, mp):
    """Right-hand side of the closed evaluation for real k > 0, in context ``mp``.

    pi * ((-1)^n + 1)/2 * ( -[(2k+1+2r)^j - (2k+1-2r)^j]/r
                            + cosh(2 j asinh(sqrt k)) * 2/r ),  r = sqrt(k(k+1)), j = floor(n/2)
    """
    if n % 2:
        return mp.zero
    j = n // 2
    k = mp.mpf(k)
    r = mp.sqrt(k * (k + 1))
    y = ((2 * k + 1 + 2 * r) ** j - (2 * k + 1 - 2 * r) ** j) / r
    z = mp.cosh(2 * j * mp.asinh(mp.sqrt(k)))
    return mp.pi * (-y + z * 2 / r)


def inner_integral_closed(n: int, k, ctx: PrecisionContext = DEFAULT_CONTEXT) -> InnerIntegralValue:
    """Closed form of the integral of cos(n x)/(k + sin^2 x) over [-pi, pi].

    Rational ``k`` goes through the exact y/z recurrences and a single square
    root; other ``k`` (mpf, BigReal, decimal string) through the Binet and
    cosh forms.  Odd ``n`` gives exactly zero.
    """
    if not isinstance(n, int) or n < 0:
        raise DomainError("n must be a natural number")
    exact = _is_exact(k)
    if exact:
        k = nt.as_rational(k)
        if k <= 0:
            raise DomainError("k must be positive")
    else:
        if to_mpf(k, ctx.mp) <= 0:
            raise DomainError("k must be positive")
    if n % 2:
        zero = BigReal(ctx.mp.zero, ctx.mp.zero, ctx.digits)
        parts = (0, 0) if exact else None
        return InnerIntegralValue(n, k, zero, parts)

    j = n // 2
    if exact:
        y, z = nt.y_seq(j, k), nt.z_seq(j, k)
        size = _digits_of(float(abs(y)) + 2 * float(abs(z)) / math.sqrt(float(k * (k + 1))))
        mp = mpcontext(ctx.digits + GUARD_DIGITS + size)
        kk = to_mpf(Fraction(k), mp)
        value = mp.pi * (-to_mpf(Fraction(y), mp) + to_mpf(Fraction(z), mp) * 2 / mp.sqrt(kk * (kk + 1)))
        err = mp.mpf(10) ** (size - mp.dps + 2)
        return InnerIntegralValue(n, k, BigReal(value, err, ctx.digits), (y, z))

    kf = float(to_mpf(k, ctx.mp))
    size = int(j * math.log10(4 * kf + 3)) + 2 + max(0, int(-math.log10(kf)) if kf < 1 else 0)
    mp = mpcontext(ctx.digits + GUARD_DIGITS + size)
    value = theorem2_real(n, to_mpf(k, mp), mp)
    err = mp.mpf(10) ** (size - mp.dps + 2)
    return InnerIntegralValue(n, k, BigReal(value, err, ctx.digits))


def lemma_form(n: int, k, ctx: PrecisionContext = DEFAULT_CONTEXT) -> BigReal:
    """The same integral written with the triangular number T_k = k(k+1)/2.

    ((-1)^n + 1)/2 * pi * (-y + z * sqrt(2 / T_k)); for k = 2 this is the
    c_n, d_n, sqrt(2/3) form.
    """
    k = nt.as_rational(k)
    if k <= 0:
        raise DomainError("k must be positive")
    if n % 2:
        return BigReal(ctx.mp.zero, ctx.mp.zero, ctx.digits)
    j = n // 2
    if k == 2:
        y, z = nt.kekule_c(j), nt.companion_d(j)
    else:
        y, z = nt.y_seq(j, k), nt.z_seq(j, k)
    t_k = Fraction(k) * (k + 1) / 2
    size = _digits_of(float(abs(y)) + 3 * float(abs(z)))
    mp = mpcontext(ctx.digits + GUARD_DIGITS + size)
    value = mp.pi * (-to_mpf(Fraction(y), mp) + to_mpf(Fraction(z), mp) * mp.sqrt(2 / to_mpf(t_k, mp)))
    return BigReal(value, mp.mpf(10) ** (size - mp.dps + 2), ctx.digits)


def yz_closed(n: int, k, ctx: PrecisionContext = DEFAULT_CONTEXT) -> tuple[BigReal, BigReal]:
    """Binet form of y_{n,k} and cosh(2 n asinh(sqrt k)) form of z_{n,k}."""
    if not isinstance(n, int) or n < 0:
        raise DomainError("n must be a natural number")
    kf = float(to_mpf(k, ctx.mp))
    if kf <= 0:
        raise DomainError("k must be positive")
    size = int(n * math.log10(4 * kf + 3)) + 2
    mp = mpcontext(ctx.digits + GUARD_DIGITS + size)
    kk = to_mpf(k, mp)
    r = mp.sqrt(kk * (kk + 1))
    y = ((2 * kk + 1 + 2 * r) ** n - (2 * kk + 1 - 2 * r) ** n) / r
    z = mp.cosh(2 * n * mp.asinh(mp.sqrt(kk)))
    err = mp.mpf(10) ** (size - mp.dps + 2)
    return BigReal(y, err, ctx.digits), BigReal(z, err, ctx.digits)


def dn_trig(n: int, ctx: PrecisionContext = DEFAULT_CONTEXT, *, via: str = "hyperbolic") -> TrigClosedForm:
    """d_n from (-1)^n cos(2n asin(sqrt 3)).

    asin(sqrt 3) is complex; the default path uses the equivalent real form
    cosh(2n acosh(sqrt 3)).  ``via="complex"`` evaluates the trigonometric
    expression in complex arithmetic instead.
    """
    if not isinstance(n, int) or n < 0:
        raise DomainError("n must be a natural number")
    mp = mpcontext(ctx.digits + GUARD_DIGITS + n + 2)
    if via == "hyperbolic":
        value = mp.cosh(2 * n * mp.acosh(mp.sqrt(3)))
    elif via == "complex":
        w = (-1) ** n * mp.cos(2 * n * mp.asin(mp.mpc(mp.sqrt(3))))
        if abs(w.imag) > mp.mpf(10) ** (-ctx.digits):
            raise VerificationError(f"imaginary residue {mp.nstr(w.imag, 5)} in d_{n}")
        value = w.real
    else:
        raise DomainError("via must be 'hyperbolic' or 'complex'")
    err = mp.mpf(10) ** (n + 4 - mp.dps)
    return TrigClosedForm(n, BigReal(value, err, ctx.digits))


def kekule_integral_value(n: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> BigReal:
    """-I/pi + (-1)^n cos(2n asin sqrt 3) sqrt(2/3), I the k = 2, cos(2n x) integral."""
    integral = inner_integral_numeric(2 * n, 2, ctx)
    d = dn_trig(n, ctx)
    mp = mpcontext(ctx.digits + GUARD_DIGITS + n + 2)
    value = -mp.mpf(integral.value) / mp.pi + mp.mpf(d.value.value) * mp.sqrt(mp.mpf(2) / 3)
    err = integral.error_bound / mp.pi + d.value.error_bound
    return BigReal(value, err, ctx.digits)


def kekule_from_integral(n: int, ctx: PrecisionContext = DEFAULT_CONTEXT, *,
                         tolerance: float = 1e-30) -> int:
    """K(P_n) recovered from the integral representation, rounded.

    Raises :class:`VerificationError` when the pre-rounding value is farther
    than ``tolerance`` from the nearest integer.
    """
    v = kekule_integral_value(n, ctx)
    mp = mpcontext(ctx.digits + GUARD_DIGITS + n + 2)
    nearest = mp.nint(v.value)
    residual = abs(mp.mpf(v.value) - nearest)
    if residual >= tolerance:
        raise VerificationError(f"K(P_{n}): residual {mp.nstr(residual, 5)} >= {tolerance}")
    return int(nearest)


# --------------------------------------------------------------------------
# antiderivatives of the double integral in t
# --------------------------------------------------------------------------

def j_closed_oracle(n: int, upper, ctx: PrecisionContext = DEFAULT_CONTEXT) -> BigReal:
    """Integral over t in [0, M] of the inner integral, for n in {0, 2, 4}.

    n=0: 2 pi ln(2M + 1 + 2 sqrt(M(M+1)))
    n=2: 4 pi (sqrt(M(M+1)) - M)
    n=4: pi ((8M + 4) sqrt(M(M+1)) - 8M^2 - 8M)
    """
    if n not in (0, 2, 4):
        raise DomainError("closed antiderivative available only for n in {0, 2, 4}")
    if isinstance(upper, str):
        upper = Limit.parse(upper)
    mf = float(to_mpf(upper, ctx.mp))
    if mf <= 0:
        raise DomainError("upper limit must be positive")
    size = _digits_of(8 * mf * mf + 8 * mf + 1)
    mp = mpcontext(ctx.digits + GUARD_DIGITS + size)
    m = to_mpf(upper, mp)
    root = mp.sqrt(m * (m + 1))
    if n == 0:
        value = 2 * mp.pi * mp.log(2 * m + 1 + 2 * root)
    elif n == 2:
        value = 4 * mp.pi * (root - m)
    else:
        value = mp.pi * ((8 * m + 4) * root - 8 * m * m - 8 * m)
    return BigReal(value, mp.mpf(10) ** (size - mp.dps + 2), ctx.digits)


# --------------------------------------------------------------------------
# Fourier coefficients of ln(sin x + cos x)
# --------------------------------------------------------------------------

def _sgn(e: int) -> int:
    return -1 if e % 2 else 1


def _cos_coeff_parts(n: int):
    """Return (imag_factor, real_factor) with coefficient = pi*(imag_factor*i + real_factor)."""
    imag = Fraction(_sgn((n + 3) // 4) * (_sgn(n + 1) + 1), 2 * (n // 2) + 1)  # times 1/sqrt2
    real = Fraction(((n + 3) % 4) // 3 * _sgn(n // 4) * 2, n)
    return imag, real


def _sin_coeff_parts(n: int):
    imag = Fraction(_sgn((n + 5) // 4) * (_sgn(n + 3) + 1), n)  # times 1/sqrt2
    real = -Fraction(((n + 5) % 4) // 3 * _sgn((n + 2) // 4), 2 * (n // 4) + 1)
    return imag, real


def prop_fourier_coeff(mode: str, n: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> BigComplex:
    """Stated closed forms of the cos / sin Fourier coefficients (times pi).

    cos: (-1)^floor((n+3)/4) ((-1)^(n+1) + 1)/sqrt2 * 1/(2 floor(n/2) + 1) * i pi
         + floor(((n+3) mod 4)/3) (-1)^floor(n/4) 2 pi / n
    sin: (-1)^floor((n+5)/4) ((-1)^(n+3) + 1) pi i / (sqrt2 n)
         - floor(((n+5) mod 4)/3) (-1)^floor((n+2)/4) pi / (2 floor(n/4) + 1)
    """
    if mode not in ("cos", "sin"):
        raise DomainError("mode must be 'cos' or 'sin'")
    if not isinstance(n, int) or n < 1:
        raise DomainError("n must be >= 1")
    imag, real = _cos_coeff_parts(n) if mode == "cos" else _sin_coeff_parts(n)
    mp = ctx.mp
    im = mp.pi * to_mpf(imag, mp) / mp.sqrt(2)
    re_ = mp.pi * to_mpf(real, mp)
    err = mp.mpf(10) ** (-mp.dps + 2)
    return BigComplex(BigReal(re_, err, ctx.digits), BigReal(im, err, ctx.digits))


_ANGLE_RE = re.compile(r"^\s*([+-]?\d+(?:/\d+)?)?\s*\*?\s*(pi)?\s*(?:/\s*(\d+))?\s*$")


def parse_angle(x, mp):
    """Accept numbers or strings such as ``"pi"``, ``"pi/2"``, ``"3*pi/4"``."""
    if not isinstance(x, str):
        return to_mpf(x, mp)
    m = _ANGLE_RE.match(x)
    if not m or not (m.group(1) or m.group(2)):
        return mp.mpf(x)
    v = to_mpf(Fraction(m.group(1)), mp) if m.group(1) else mp.one
    if m.group(2):
        v *= mp.pi
    if m.group(3):
        v /= int(m.group(3))
    return v


def fourier_series_eval(x, N: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> BigComplex:
    """Partial Fourier sum for ln(sin x + cos x) through order N.

    Constant term i(pi + i ln 2)/2, then cos(n x) and sin(n x) with the
    stated coefficient formulas divided by pi.
    """
    mp = ctx.mp
    xv = parse_angle(x, mp)
    if abs(mp.sin(xv) + mp.cos(xv)) < mp.mpf(10) ** (-(ctx.digits // 2)):
        raise DomainError("ln(sin x + cos x) is singular at this x")
    s2 = mp.sqrt(2)
    re_ = -mp.log(2) / 2
    im = mp.pi / 2
    for n in range(1, N + 1):
        c, s = mp.cos(n * xv), mp.sin(n * xv)
        ci, cr = _cos_coeff_parts(n)
        si, sr = _sin_coeff_parts(n)
        re_ += c * to_mpf(cr, mp) + s * to_mpf(sr, mp)
        im += (c * to_mpf(ci, mp) + s * to_mpf(si, mp)) / s2
    err = mp.mpf(10) ** (-mp.dps + 2) * N
    return BigComplex(BigReal(re_, err, ctx.digits), BigReal(im, err, ctx.digits))


def principal_log_sin_plus_cos(x, ctx: PrecisionContext = DEFAULT_CONTEXT) -> BigComplex:
    mp = ctx.mp
    w = mp.log(mp.mpc(mp.sin(parse_angle(x, mp)) + mp.cos(parse_angle(x, mp))))
    err = mp.mpf(10) ** (-mp.dps + 2)
    return BigComplex(BigReal(w.real, err, ctx.digits), BigReal(w.imag, err, ctx.digits))


# --------------------------------------------------------------------------
# the two series
# --------------------------------------------------------------------------

SERIES = ("sqrt2", "ln2")


def series_target(which: str, ctx: PrecisionContext = DEFAULT_CONTEXT):
    mp = ctx.mp
    if which == "sqrt2":
        return -mp.pi / mp.sqrt(2)
    if which == "ln2":
        return -mp.log(2) / 4
    raise DomainError(f"unknown series {which!r}")


def series_partial(which: str, N: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> BigReal:
    """Partial sum through term N.

    sqrt2: sum (-1)^floor((n+3)/4) ((-1)^(n+1) + 1) / (2 floor(n/2) + 1)  -> -pi/sqrt2
    ln2:   sum floor(((n+3) mod 4)/3) (-1)^floor(n/4) / n               -> -ln2/4
    """
    if which not in SERIES:
        raise DomainError(f"unknown series {which!r}")
    if not isinstance(N, int) or N < 1:
        raise DomainError("N must be >= 1")
    mp = ctx.mp
    total = mp.zero
    for n in range(1, N + 1):
        if which == "sqrt2":
            num = _sgn((n + 3) // 4) * (_sgn(n + 1) + 1)
            if num:
                total += mp.mpf(num) / (2 * (n // 2) + 1)
        else:
            num = ((n + 3) % 4) // 3 * _sgn(n // 4)
            if num:
                total += mp.mpf(num) / n
    return BigReal(total, mp.mpf(10) ** (-mp.dps + 2) * N, ctx.digits)
