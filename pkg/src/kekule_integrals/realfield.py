"""Arbitrary-precision reals and tanh-sinh quadrature.

Every computation runs inside a private :class:`mpmath.MPContext`, one per
working precision, so nothing here reads or mutates mpmath's global
``mp.dps``.  Values travel as :class:`BigReal` (value + absolute error bound).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from mpmath import MPContext

from .numtheory import DomainError, as_rational, squarefree_decompose

#: guard digits carried on top of the requested decimal precision
GUARD_DIGITS = 15
DEFAULT_DIGITS = 60
MAX_LEVEL = 12


@lru_cache(maxsize=None)
def mpcontext(dps: int) -> MPContext:
    """Independent mpmath context at ``dps`` decimal digits (shared, read-only)."""
    ctx = MPContext()
    ctx.dps = dps
    return ctx


@dataclass(frozen=True)
class PrecisionContext:
    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        if not isinstance(self.digits, int) or self.digits < 20:
            raise DomainError(f"digits must be an int >= 20, got {self.digits!r}")

    @property
    def mp(self) -> MPContext:
        """Working context: requested digits plus guard digits."""
        return mpcontext(self.digits + GUARD_DIGITS)

    def extended(self, extra: int) -> "PrecisionContext":
        return PrecisionContext(self.digits + extra)

    @property
    def eps(self):
        return self.mp.mpf(10) ** (-self.digits)


DEFAULT_CONTEXT = PrecisionContext()


class QuadratureError(ArithmeticError):
    """Level doubling did not converge; ``estimate`` holds the best value."""

    def __init__(self, message: str, estimate: "BigReal"):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class BigReal:
    value: object  # mpf
    error_bound: object = 0  # mpf, absolute
    digits: int = DEFAULT_DIGITS

    @classmethod
    def exact(cls, x, ctx: PrecisionContext = DEFAULT_CONTEXT) -> "BigReal":
        return cls(to_mpf(x, ctx.mp), ctx.mp.zero, ctx.digits)

    @classmethod
    def from_decimal(cls, text: str, error_bound: str | None = None,
                     digits: int | None = None) -> "BigReal":
        """Parse a decimal literal.

        Without an explicit ``error_bound`` the literal is taken to be
        correctly rounded: the bound is half a unit in its last place.
        """
        text = text.strip()
        if digits is None:
            digits = max(DEFAULT_DIGITS, len(re.sub(r"[^0-9]", "", text.split("e")[0])))
        mp = PrecisionContext(max(digits, 20)).mp
        if error_bound is None:
            mantissa, _, expo = text.lower().partition("e")
            places = len(mantissa.partition(".")[2])
            err = mp.mpf(10) ** (-places + int(expo or 0)) / 2
            if "." not in mantissa:
                err = mp.zero if not expo else err
        else:
            err = mp.mpf(error_bound)
        return cls(mp.mpf(text), err, max(digits, 20))

    def __float__(self) -> float:
        return float(self.value)

    def decimal(self, digits: int | None = None) -> str:
        """Significant-digit decimal string (deterministic)."""
        mp = mpcontext((digits or self.digits) + GUARD_DIGITS)
        return mp.nstr(mp.mpf(self.value), digits or self.digits, strip_zeros=False)

    def error_decimal(self) -> str:
        return mpcontext(30).nstr(self.error_bound, 3)

    def __str__(self) -> str:
        return self.decimal()

    def __neg__(self) -> "BigReal":
        return BigReal(-self.value, self.error_bound, self.digits)

    def __add__(self, other: "BigReal") -> "BigReal":
        mp = mpcontext(min(self.digits, other.digits) + GUARD_DIGITS)
        return BigReal(mp.mpf(self.value) + other.value,
                       mp.mpf(self.error_bound) + other.error_bound,
                       min(self.digits, other.digits))

    def __sub__(self, other: "BigReal") -> "BigReal":
        return self + (-other)

    def scale(self, factor) -> "BigReal":
        """Multiply by an exact (or exactly known) factor."""
        mp = mpcontext(self.digits + GUARD_DIGITS)
        f = to_mpf(factor, mp)
        return BigReal(mp.mpf(self.value) * f, mp.mpf(self.error_bound) * abs(f), self.digits)


@dataclass(frozen=True)
class BigComplex:
    re: BigReal
    im: BigReal

    def __str__(self) -> str:
        return f"{self.re.decimal()} + {self.im.decimal()} i"


def to_mpf(x, mp: MPContext):
    """Convert ints, Fractions, decimal strings, mpf and BigReal into ``mp``."""
    if isinstance(x, BigReal):
        return mp.mpf(x.value)
    if isinstance(x, Limit):
        return x.to_mpf(mp)
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    if isinstance(x, bool):
        raise TypeError("bool is not a number")
    return mp.mpf(x)


# --------------------------------------------------------------------------
# exact integration limits: rational * sqrt(radicand)
# --------------------------------------------------------------------------

_LIMIT_RE = re.compile(
    r"^\s*(?:(?P<coef>[+-]?\d+(?:/\d+)?)\s*\*?\s*)?"
    r"(?:sqrt\s*\(?\s*(?P<rad>\d+)\s*\)?)?\s*$"
)


@dataclass(frozen=True)
class Limit:
    """Exact real of the form ``coeff * sqrt(radicand)`` (radicand squarefree)."""

    coeff: Fraction
    radicand: int = 1

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        if self.radicand < 1:
            raise DomainError("radicand must be positive")
        dec = squarefree_decompose(self.radicand)
        if dec.s != 1:
            object.__setattr__(self, "coeff", self.coeff * dec.s)
            object.__setattr__(self, "radicand", dec.d)

    @classmethod
    def parse(cls, token) -> "Limit":
        if isinstance(token, Limit):
            return token
        if isinstance(token, (int, Fraction)):
            return cls(Fraction(token))
        text = str(token).replace("√", "sqrt")
        if re.search(r"\d\.\d|e-?\d", text):
            raise DomainError(f"decimal limits are not accepted: {token!r}")
        m = _LIMIT_RE.match(text)
        if not m or (m.group("coef") is None and m.group("rad") is None):
            raise DomainError(f"cannot parse limit {token!r}")
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        rad = int(m.group("rad")) if m.group("rad") else 1
        return cls(coef, rad)

    @property
    def is_rational(self) -> bool:
        return self.radicand == 1

    @property
    def tag(self) -> str:
        c = str(self.coeff)
        if self.radicand == 1:
            return c
        return f"sqrt{self.radicand}" if self.coeff == 1 else f"{c}*sqrt{self.radicand}"

    def __str__(self) -> str:
        return self.tag

    def to_mpf(self, mp: MPContext):
        v = mp.mpf(self.coeff.numerator) / self.coeff.denominator
        if self.radicand != 1:
            v *= mp.sqrt(self.radicand)
        return v


# --------------------------------------------------------------------------
# tanh-sinh quadrature
# --------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _level_nodes(dps: int, level: int) -> tuple:
    """Unit nodes for one level: tuples (dist, weight) on t >= 0.

    ``dist`` is the distance from the right endpoint as a fraction of the
    interval length, ``weight`` the matching weight per unit length (without
    the step size).  Level 0 holds t = 0, 1, 2, ...; level L > 0 holds the
    odd multiples of 2^-L.  The tail is cut where e^-u drops below 10^-dps,
    which covers x^-1/2 and logarithmic endpoint behaviour.
    """
    mp = mpcontext(dps)
    u_max = dps * math.log(10) + 10
    t_max = math.asinh(2 * u_max / math.pi)
    h = mp.ldexp(1, -level)
    if level == 0:
        ks = range(0, int(t_max) + 1)
    else:
        ks = range(1, int(t_max * 2 ** level) + 1, 2)
    half_pi = mp.pi / 2
    out = []
    for k in ks:
        t = k * h
        u = half_pi * mp.sinh(t)
        e2u = mp.exp(2 * u)
        dist = 1 / (e2u + 1)
        weight = mp.pi * mp.cosh(t) * e2u / (e2u + 1) ** 2
        out.append((k == 0, dist, weight))
    return tuple(out)


def _nodes_sum(f, a, b, length, dps, level, mp):
    total = mp.zero
    absum = mp.zero
    for at_zero, dist, weight in _level_nodes(dps, level):
        w = weight * length
        pts = ((b - dist * length),) if at_zero else (b - dist * length, a + dist * length)
        for x in pts:
            if x <= a or x >= b:
                continue  # node rounded onto an endpoint: weight is negligible
            try:
                fx = f(x)
            except (ZeroDivisionError, ValueError):
                if dist * length > mp.mpf(10) ** (-dps + 5):
                    raise
                continue
            total += w * fx
            absum += abs(w * fx)
    return total, absum


def integrate_tanh_sinh(f: Callable, a, b, ctx: PrecisionContext = DEFAULT_CONTEXT,
                        *, max_level: int = MAX_LEVEL, min_level: int = 3) -> BigReal:
    """Integrate ``f`` over [a, b] by the double-exponential rule.

    The step halves until two successive levels agree to ``10**-digits``
    (relative to max(1, |S|)); the reported error bound is that last level
    difference plus an estimate of the rounding error.
    """
    mp = ctx.mp
    dps = mp.dps
    a, b = to_mpf(a, mp), to_mpf(b, mp)
    if a == b:
        return BigReal(mp.zero, mp.zero, ctx.digits)
    if a > b:
        return -integrate_tanh_sinh(f, b, a, ctx, max_level=max_level, min_level=min_level)
    length = b - a
    tol = mp.mpf(10) ** (-ctx.digits)
    running, absum = mp.zero, mp.zero
    prev = None
    estimate = mp.zero
    diff = mp.inf
    for level in range(max_level + 1):
        part, part_abs = _nodes_sum(f, a, b, length, dps, level, mp)
        running += part
        absum += part_abs
        h = mp.ldexp(1, -level)
        estimate = running * h
        if prev is not None:
            diff = abs(estimate - prev)
            if level >= min_level and diff <= tol * max(1, abs(estimate)):
                rounding = absum * h * mp.mpf(10) ** (-dps + 2)
                return BigReal(estimate, diff + rounding, ctx.digits)
        prev = estimate
    best = BigReal(estimate, diff, ctx.digits)
    raise QuadratureError(f"tanh-sinh did not converge after {max_level} levels "
                          f"(last difference {mp.nstr(diff, 5)})", best)


def integrate_pieces(f: Callable, points: Sequence, ctx: PrecisionContext = DEFAULT_CONTEXT,
                     **kw) -> BigReal:
    """Sum of tanh-sinh integrals over consecutive ``points``."""
    mp = ctx.mp
    pts = [to_mpf(p, mp) for p in points]
    total = BigReal(mp.zero, mp.zero, ctx.digits)
    for lo, hi in zip(pts, pts[1:]):
        total = total + integrate_tanh_sinh(f, lo, hi, ctx, **kw)
    return total


# --------------------------------------------------------------------------
# the integrals
# --------------------------------------------------------------------------

def _positive_param(k, mp, name="k"):
    v = to_mpf(k, mp)
    if v <= 0:
        raise DomainError(f"{name} must be positive (integrand singular on the contour)")
    return v


def inner_integral_numeric(n: int, k, ctx: PrecisionContext = DEFAULT_CONTEXT) -> BigReal:
    """Quadrature of the integral of cos(n x) / (k + sin^2 x) over [-pi, pi]."""
    if not isinstance(n, int) or n < 0:
        raise DomainError("n must be a natural number")
    mp = ctx.mp
    kk = _positive_param(k, mp)
    pi = mp.pi

    def f(x):
        return mp.cos(n * x) / (kk + mp.sin(x) ** 2)

    return integrate_pieces(f, [-pi, 0, pi], ctx)


def double_integral_numeric(n: int, upper, ctx: PrecisionContext = DEFAULT_CONTEXT, *,
                            lower=0, nested: bool = False) -> BigReal:
    """Integral over t in [lower, upper] of the inner integral with k = t.

    By default the inner value comes from the closed form, leaving a 1-D
    tanh-sinh integral whose t^-1/2 singularity at t = 0 is handled by the
    rule itself.  ``nested=True`` evaluates the inner integral by quadrature
    too (slow; an independent check).  The inner integrand's peak has width
    sqrt(t), which the inner rule cannot resolve as t -> 0, so the nested
    path requires ``lower > 0``.
    """
    from .closedform import theorem2_real  # closedform builds on this module

    if not isinstance(n, int) or n < 0 or n % 2:
        raise DomainError("n must be a non-negative even integer")
    mp = ctx.mp
    hi = _positive_param(Limit.parse(upper) if isinstance(upper, str) else upper, mp, "upper")
    lo = to_mpf(Limit.parse(lower) if isinstance(lower, str) else lower, mp)
    if lo < 0:
        raise DomainError("lower limit must be >= 0")
    if nested:
        if lo <= 0:
            raise DomainError("nested evaluation needs a positive lower limit")
        inner_ctx = ctx

        def g(t):
            return inner_integral_numeric(n, t, inner_ctx).value
        return integrate_tanh_sinh(g, lo, hi, ctx)

    j = n // 2
    # y_j and z_j terms grow like (4t+2)^j while their difference decays
    extra = int(2 * j * math.log10(4 * float(hi) + 3)) + 5
    wmp = mpcontext(mp.dps + extra)

    def g(t):
        return mp.mpf(theorem2_real(n, wmp.mpf(t), wmp))

    return integrate_tanh_sinh(g, lo, hi, ctx)


def fubini_single(n: int, m, ctx: PrecisionContext = DEFAULT_CONTEXT) -> BigReal:
    """Integral of cos(n x)(ln(m + sin^2 x) - ln(sin^2 x)) over [-pi, pi]."""
    if not isinstance(n, int) or n < 0 or n % 2:
        raise DomainError("n must be a non-negative even integer")
    mp = ctx.mp
    mm = to_mpf(Limit.parse(m) if isinstance(m, str) else m, mp)
    if mm < 0:
        raise DomainError("m must be positive")
    if mm == 0:
        return BigReal(mp.zero, mp.zero, ctx.digits)
    pi = mp.pi

    def f(x):
        s2 = mp.sin(x) ** 2
        return mp.cos(n * x) * mp.log1p(mm / s2)

    # logarithmic singularities at -pi, 0, pi sit on piece endpoints
    return integrate_pieces(f, [-pi, 0, pi], ctx)


def complex_log_integral(mode: str, n: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> BigComplex:
    """Integral of trig(n x) Log(sin x + cos x) over [-pi, pi], principal branch.

    sin x + cos x changes sign at -pi/4 and 3pi/4; on [-pi, -pi/4) and
    (3pi/4, pi] it is negative and the principal logarithm adds i*pi.
    """
    if mode not in ("cos", "sin"):
        raise DomainError("mode must be 'cos' or 'sin'")
    if not isinstance(n, int) or n < 1:
        raise DomainError("n must be >= 1")
    mp = ctx.mp
    pi = mp.pi
    trig = mp.cos if mode == "cos" else mp.sin

    def re_part(x):
        return trig(n * x) * mp.log(abs(mp.sin(x) + mp.cos(x)))

    def im_part(x):
        return pi * trig(n * x)

    re_val = integrate_pieces(re_part, [-pi, -pi / 4, 3 * pi / 4, pi], ctx)
    im_val = (integrate_tanh_sinh(im_part, -pi, -pi / 4, ctx)
              + integrate_tanh_sinh(im_part, 3 * pi / 4, pi, ctx))
    return BigComplex(re_val, im_val)


def as_limit(x) -> Limit:
    if isinstance(x, Limit):
        return x
    return Limit(Fraction(as_rational(x)))


__all__ = [
    "BigComplex", "BigReal", "DEFAULT_CONTEXT", "DomainError", "Limit", "PrecisionContext",
    "QuadratureError", "complex_log_integral", "double_integral_numeric", "fubini_single",
    "inner_integral_numeric", "integrate_pieces", "integrate_tanh_sinh", "mpcontext", "to_mpf",
]
