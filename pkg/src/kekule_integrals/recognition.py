"""Recognition of high-precision constants as quadratic surds.

Target shapes:

* ``a (b + c sqrt d) pi``            (:class:`SurdForm`)
* ``-pi (ln a^2 - 2 ln(b + c sqrt d))`` (:class:`LogSurdForm`)
* ``2 pi ln(1 + 2m sqrt2 + a sqrt(b (2m + sqrt2)))`` (:func:`recognize_conj10`)

Integer relations are found by LLL reduction of the usual relation lattice,
with an exact integer implementation of the reduction.  A relation is only
trusted when its height is small compared with the available precision; a
``refine`` callable, when given, lets the relation be re-checked with 20
more digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .numtheory import DomainError, gcd_many, is_squarefree, squarefree_decompose
from .realfield import (
    DEFAULT_CONTEXT,
    GUARD_DIGITS,
    BigReal,
    PrecisionContext,
    mpcontext,
    to_mpf,
)

DEFAULT_HEIGHT_BOUND = 10 ** 30
RELATION_TOLERANCE = 1e-30
#: extra decimal digits of "luck" a relation must beat before it is trusted
CHANCE_MARGIN = 15
REFINE_EXTRA_DIGITS = 20
REFINE_GAIN = 1e15
DEFAULT_MAX_D = 200


class RecognitionError(ArithmeticError):
    """No closed form of the requested shape within the bounds."""


# --------------------------------------------------------------------------
# lattice reduction
# --------------------------------------------------------------------------

def lll_reduce(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(99, 100)) -> list[list[int]]:
    """LLL-reduce linearly independent integer row vectors.

    Integral variant (all Gram-Schmidt data kept as integers ``d_i`` and
    ``lam[i][j] = d_j mu_ij``), so no rational or floating arithmetic is
    involved.
    """
    b = [[int(x) for x in row] for row in basis]
    n = len(b)
    if n <= 1:
        return b
    num, den = delta.numerator, delta.denominator

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    d = [0] * (n + 1)  # d[0] = 1, d[i] for i = 1..n (1-based)
    lam = [[0] * (n + 1) for _ in range(n + 1)]
    d[0] = 1
    d[1] = dot(b[0], b[0])
    if d[1] == 0:
        raise ValueError("zero vector in basis")

    def redi(k, l):
        if 2 * abs(lam[k][l]) > d[l]:
            q = (2 * lam[k][l] + d[l]) // (2 * d[l])
            b[k - 1] = [x - q * y for x, y in zip(b[k - 1], b[l - 1])]
            lam[k][l] -= q * d[l]
            for i in range(1, l):
                lam[k][i] -= q * lam[l][i]

    def swapi(k, kmax):
        b[k - 1], b[k - 2] = b[k - 2], b[k - 1]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        bb = (d[k - 2] * d[k] + lm * lm) // d[k - 1]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - lm * t) // d[k - 1]
            lam[i][k - 1] = (bb * t + lm * lam[i][k]) // d[k]
        d[k - 1] = bb

    k, kmax = 2, 1
    while k <= n:
        if k > kmax:
            kmax = k
            for j in range(1, k + 1):
                u = dot(b[k - 1], b[j - 1])
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    d[k] = u
            if d[k] == 0:
                raise ValueError("basis vectors are linearly dependent")
        redi(k, k - 1)
        if den * d[k] * d[k - 2] < num * d[k - 1] ** 2 - den * lam[k][k - 1] ** 2:
            swapi(k, kmax)
            k = max(2, k - 1)
        else:
            for l in range(k - 2, 0, -1):
                redi(k, l)
            k += 1
    return b


# --------------------------------------------------------------------------
# integer relations
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegerRelation:
    coefficients: tuple[int, ...]
    input_dimension: int
    residual: BigReal

    @property
    def height(self) -> int:
        return max(abs(c) for c in self.coefficients)


def _as_bigreal(x, ctx: PrecisionContext) -> BigReal:
    if isinstance(x, BigReal):
        return x
    return BigReal(to_mpf(x, ctx.mp), ctx.mp.zero, ctx.digits)


def _normalize(coeffs: Sequence[int]) -> tuple[int, ...]:
    g = gcd_many(*coeffs) or 1
    out = [c // g for c in coeffs]
    for c in out:
        if c:
            if c < 0:
                out = [-x for x in out]
            break
    return tuple(out)


def integer_relation(xs: Sequence, bound: int = DEFAULT_HEIGHT_BOUND,
                     ctx: PrecisionContext = DEFAULT_CONTEXT, *,
                     refine: Optional[Callable[[int], Sequence]] = None) -> IntegerRelation:
    """Smallest-height integer relation sum c_i x_i = 0, or RecognitionError.

    With ``D`` reliable digits and ``n`` inputs, relations of height about
    ``10**(D/n)`` exist by accident; a candidate is accepted only if
    ``n * log10(height) <= D - CHANCE_MARGIN`` and its residual is both below
    1e-30 (relative to max |x_i|) and consistent with the input noise.
    ``refine(digits)`` must return the same inputs at ``digits`` precision;
    the residual then has to shrink by REFINE_GAIN or fall to the new noise
    floor.
    """
    n = len(xs)
    if n < 2:
        raise DomainError("need at least two numbers")
    mp = ctx.mp
    items = [_as_bigreal(x, ctx) for x in xs]
    vals = [mp.mpf(x.value) for x in items]
    scale = max(abs(v) for v in vals)
    if scale == 0:
        raise RecognitionError("all inputs are zero")
    rel_err = max([mp.mpf(x.error_bound) for x in items] + [mp.zero]) / scale
    rel_err = max(rel_err, mp.mpf(10) ** (-ctx.digits))
    digits = int(mp.floor(-mp.log10(rel_err)))
    if digits < 20:
        raise RecognitionError(f"only {digits} reliable digits; need >= 20")
    weight = mp.mpf(10) ** digits
    column = [int(mp.nint(weight * v / scale)) for v in vals]
    lattice = [[int(i == j) for j in range(n)] + [column[i]] for i in range(n)]
    reduced = lll_reduce(lattice)

    best = None
    for row in reduced:
        coeffs = row[:n]
        if not any(coeffs):
            continue
        h = max(abs(c) for c in coeffs)
        if h > bound or n * math.log10(h) > digits - CHANCE_MARGIN:
            continue
        residual = abs(mp.fsum(c * v for c, v in zip(coeffs, vals)))
        noise = 100 * n * h * scale * rel_err
        if residual > noise or residual >= RELATION_TOLERANCE * max(1, scale):
            continue
        if best is None or h < best[0]:
            best = (h, coeffs, residual)
    if best is None:
        raise RecognitionError("no integer relation within bounds")
    h, coeffs, residual = best
    coeffs = _normalize(coeffs)

    if refine is not None:
        hi_digits = ctx.digits + REFINE_EXTRA_DIGITS
        hmp = mpcontext(hi_digits + GUARD_DIGITS)
        hi_vals = [to_mpf(v, hmp) for v in refine(hi_digits)]
        hi_res = abs(hmp.fsum(c * v for c, v in zip(coeffs, hi_vals)))
        floor = 100 * n * h * scale * hmp.mpf(10) ** (-hi_digits)
        if hi_res > max(residual / REFINE_GAIN, floor):
            raise RecognitionError("relation did not survive re-verification at higher precision")
    return IntegerRelation(coeffs, n, BigReal(residual, rel_err * scale, ctx.digits))


# --------------------------------------------------------------------------
# rational reconstruction
# --------------------------------------------------------------------------

def mpf_to_fraction(x) -> Fraction:
    man, exp = x.man_exp  # man_exp drops the sign
    q = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -q if x < 0 else q


def continued_fraction_convergents(q: Fraction) -> Iterable[Fraction]:
    h_old, h, k_old, k = 0, 1, 1, 0
    num, den = q.numerator, q.denominator
    while den:
        a, r = divmod(num, den)
        h_old, h = h, a * h + h_old
        k_old, k = k, a * k + k_old
        yield Fraction(h, k)
        num, den = den, r


def rational_reconstruct(x, max_den: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Fraction:
    """Smallest-denominator convergent p/q (q <= max_den) within 10 error bounds of x."""
    if max_den < 1:
        raise DomainError("max_den must be >= 1")
    big = _as_bigreal(x, ctx)
    mp = mpcontext(big.digits + GUARD_DIGITS)
    v = mp.mpf(big.value)
    if not mp.isfinite(v):
        raise DomainError("x must be finite")
    # a value carries at most ``digits`` significant digits, whatever its bound says
    tol = 10 * max(mp.mpf(big.error_bound), abs(v) * mp.mpf(10) ** (-big.digits))
    exact = mpf_to_fraction(v)
    for conv in continued_fraction_convergents(exact):
        if conv.denominator > max_den:
            break
        if abs(v - to_mpf(conv, mp)) <= tol:
            return conv
    raise RecognitionError(f"no rational with denominator <= {max_den} within tolerance")


# --------------------------------------------------------------------------
# surd forms
# --------------------------------------------------------------------------

def _fmt_rat(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_binomial(b, c, d) -> str:
    """'-12 + 5 √6', '-3 + √10', '7 + 3 √5' ..."""
    parts = []
    if b:
        parts.append(_fmt_rat(b))
    if c:
        mag = abs(Fraction(c))
        root = f"√{d}" if mag == 1 else f"{_fmt_rat(mag)} √{d}"
        if parts:
            parts.append(("+ " if c > 0 else "- ") + root)
        else:
            parts.append(root if c > 0 else "-" + root)
    return " ".join(parts) if parts else "0"


def factor_max_integer(b_raw, c_raw) -> tuple[Fraction, int, int]:
    """Split b_raw + c_raw sqrt(d) as a (b + c sqrt(d)) with coprime integers b, c.

    ``a > 0`` and ``b`` keeps the sign of ``b_raw``; ``a*b == b_raw`` and
    ``a*c == c_raw``.
    """
    b_raw, c_raw = Fraction(b_raw), Fraction(c_raw)
    if b_raw == 0 and c_raw == 0:
        raise DomainError("cannot factor the zero form")
    lcm = b_raw.denominator * c_raw.denominator // math.gcd(b_raw.denominator, c_raw.denominator)
    bi, ci = int(b_raw * lcm), int(c_raw * lcm)
    g = math.gcd(bi, ci)
    return Fraction(g, lcm), bi // g, ci // g


@dataclass(frozen=True)
class SurdForm:
    """a (b + c sqrt(d)) pi with d squarefree."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: int

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.d < 1 or not is_squarefree(self.d):
            raise DomainError(f"d must be squarefree and positive, got {self.d}")

    @property
    def is_zero(self) -> bool:
        return self.a == 0 or (self.b == 0 and self.c == 0)

    def factored(self) -> "SurdForm":
        """Maximal factor pulled out, inner coefficients coprime integers."""
        if self.is_zero:
            return SurdForm(Fraction(0), Fraction(0), Fraction(0), 1)
        if self.d == 1 or self.c == 0:
            total = self.a * (self.b + self.c * (1 if self.d == 1 else 0))
            return SurdForm(total, Fraction(1), Fraction(0), 1) if self.c == 0 or self.d == 1 else self
        a, b, c = factor_max_integer(self.a * self.b, self.a * self.c)
        return SurdForm(a, Fraction(b), Fraction(c), self.d)

    def value(self, ctx: PrecisionContext = DEFAULT_CONTEXT) -> BigReal:
        mp = ctx.mp
        v = to_mpf(self.a, mp) * (to_mpf(self.b, mp) + to_mpf(self.c, mp) * mp.sqrt(self.d)) * mp.pi
        return BigReal(v, mp.zero, ctx.digits)

    def __str__(self) -> str:
        f = self.factored()
        if f.is_zero:
            return "0"
        if f.d == 1 or f.c == 0:
            return f"{_fmt_rat(f.a)} π" if f.a != 1 else "π"
        a, b, c = f.a, f.b, f.c
        if c < 0:  # keep the surd coefficient positive inside the brackets
            a, b, c = -a, -b, -c
        inner = f"({_fmt_binomial(b, c, f.d)}) π"
        if a == 1:
            return inner
        if a == -1:
            return "-" + inner
        return f"{_fmt_rat(a)} {inner}"


@dataclass(frozen=True)
class LogSurdForm:
    """-pi (ln a^2 - 2 ln(b + c sqrt d)) = 2 pi ln((b + c sqrt d)/a)."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a <= 0:
            raise DomainError("a must be positive")
        if self.d < 1 or not is_squarefree(self.d):
            raise DomainError(f"d must be squarefree and positive, got {self.d}")

    def value(self, ctx: PrecisionContext = DEFAULT_CONTEXT) -> BigReal:
        mp = ctx.mp
        inner = mp.mpf(self.b) + self.c * mp.sqrt(self.d)
        v = -mp.pi * (mp.log(mp.mpf(self.a) ** 2) - 2 * mp.log(inner))
        return BigReal(v, mp.zero, ctx.digits)

    def __str__(self) -> str:
        return f"-π (ln({self.a * self.a}) - 2 ln({_fmt_binomial(self.b, self.c, self.d)}))"


def squarefree_candidates(limit: int = DEFAULT_MAX_D) -> list[int]:
    return [d for d in range(2, limit + 1) if is_squarefree(d)]


def _scaled(big: BigReal, factor, mp) -> BigReal:
    return BigReal(mp.mpf(big.value) * factor, mp.mpf(big.error_bound) * abs(factor), big.digits)


def recognize_surd_pi(V, d_candidates: Optional[Sequence[int]] = None,
                      ctx: PrecisionContext = DEFAULT_CONTEXT, *, hints: Sequence[int] = (),
                      refine: Optional[Callable[[int], object]] = None,
                      bound: int = DEFAULT_HEIGHT_BOUND) -> SurdForm:
    """Find rationals b, c and squarefree d with V = pi (b + c sqrt d).

    Order of attempts: V/pi rational, then each hinted d, then every
    squarefree d in ``d_candidates`` (default: squarefree d <= 200), then a
    degree-2 minimal polynomial of V/pi for anything larger.
    The result is unfactored (a = 1).
    """
    mp = ctx.mp
    big = _as_bigreal(V, ctx)
    w = _scaled(big, 1 / mp.pi, mp)
    noise = max(10 * mp.mpf(w.error_bound), mp.mpf(10) ** (-(ctx.digits - 5)))
    if abs(w.value) <= noise:
        return SurdForm(Fraction(1), Fraction(0), Fraction(0), 1)

    def w_at(digits):
        hmp = mpcontext(digits + GUARD_DIGITS)
        return to_mpf(refine(digits), hmp) / hmp.pi

    one = BigReal(mp.one, mp.zero, ctx.digits)
    try:
        rel = integer_relation([one, w], bound, ctx,
                               refine=(lambda D: [1, w_at(D)]) if refine else None)
        r0, r1 = rel.coefficients
        if r1:
            return SurdForm(Fraction(1), Fraction(-r0, r1), Fraction(0), 1)
    except RecognitionError:
        pass

    order = list(dict.fromkeys([*hints, *(d_candidates if d_candidates is not None
                                          else squarefree_candidates())]))
    for d in order:
        if d < 2 or not is_squarefree(d):
            continue
        root = BigReal(mp.sqrt(d), mp.zero, ctx.digits)

        def refine_d(D, d=d):
            hmp = mpcontext(D + GUARD_DIGITS)
            return [1, hmp.sqrt(d), w_at(D)]
        try:
            rel = integer_relation([one, root, w], bound, ctx,
                                   refine=refine_d if refine else None)
        except RecognitionError:
            continue
        r0, r1, r2 = rel.coefficients
        if r2 == 0 or r1 == 0:
            continue
        return SurdForm(Fraction(1), Fraction(-r0, r2), Fraction(-r1, r2), d)

    # generic fallback: minimal polynomial of degree 2
    w2 = BigReal(mp.mpf(w.value) ** 2, 2 * abs(mp.mpf(w.value)) * w.error_bound, ctx.digits)
    try:
        rel = integer_relation([one, w, w2], bound, ctx,
                               refine=(lambda D: [1, w_at(D), w_at(D) ** 2]) if refine else None)
    except RecognitionError:
        raise RecognitionError("V/pi is not a quadratic surd within bounds") from None
    r, q, p = rel.coefficients
    if p == 0:
        raise RecognitionError("V/pi is not a quadratic surd within bounds")
    disc = q * q - 4 * p * r
    if disc <= 0:
        raise RecognitionError("degenerate minimal polynomial")
    dec = squarefree_decompose(disc)
    if dec.d == 1:
        raise RecognitionError("minimal polynomial has rational roots")
    sq = mp.sqrt(dec.d)
    plus = (-q + dec.s * sq) / (2 * p)
    sign = 1 if abs(plus - w.value) < abs((-q - dec.s * sq) / (2 * p) - w.value) else -1
    return SurdForm(Fraction(1), Fraction(-q, 2 * p), Fraction(sign * dec.s, 2 * p), dec.d)


def recognize_log_surd(V, ctx: PrecisionContext = DEFAULT_CONTEXT, *,
                       refine: Optional[Callable[[int], object]] = None,
                       bound: int = DEFAULT_HEIGHT_BOUND) -> LogSurdForm:
    """Write V = -pi (ln a^2 - 2 ln(b + c sqrt d)), i.e. exp(V / 2pi) = (b + c sqrt d)/a."""
    mp = ctx.mp
    big = _as_bigreal(V, ctx)
    v = mp.mpf(big.value)
    if v <= 0:
        raise DomainError("V must be positive")
    e = mp.exp(v / (2 * mp.pi))
    e_err = e * mp.mpf(big.error_bound) / (2 * mp.pi)
    one = BigReal(mp.one, mp.zero, ctx.digits)
    xs = [one, BigReal(e, e_err, ctx.digits), BigReal(e * e, 2 * e * e_err, ctx.digits)]

    def refine_e(D):
        hmp = mpcontext(D + GUARD_DIGITS)
        ee = hmp.exp(to_mpf(refine(D), hmp) / (2 * hmp.pi))
        return [1, ee, ee * ee]
    rel = integer_relation(xs, bound, ctx, refine=refine_e if refine else None)
    r, q, p = rel.coefficients
    if p < 0:
        r, q, p = -r, -q, -p
    if p == 0:
        if q == 0:
            raise RecognitionError("degenerate relation")
        num, den = (-r, q) if q > 0 else (r, -q)
        g = math.gcd(num, den)
        form = LogSurdForm(den // g, num // g, 0, 1)
    else:
        disc = q * q - 4 * p * r
        if disc < 0:
            raise RecognitionError("complex roots")
        dec = squarefree_decompose(disc) if disc else None
        s, d = (dec.s, dec.d) if dec else (0, 1)
        if d == 1:
            s, d = s * 1, 1
        sq = mp.sqrt(d)
        plus = (-q + s * sq) / (2 * p)
        minus = (-q - s * sq) / (2 * p)
        sign = 1 if abs(plus - e) <= abs(minus - e) else -1
        bn, cn, den = -q, sign * s, 2 * p
        if d == 1:
            bn, cn = bn + cn, 0
        g = gcd_many(bn, cn, den)
        form = LogSurdForm(den // g, bn // g, cn // g, d)
    synth = form.value(ctx).value
    if abs(synth - v) > 1e-35 * max(1, abs(v)):
        raise RecognitionError("round-trip check failed")
    return form


def recognize_conj10(V, m: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> tuple[int, int]:
    """Solve V = 2 pi ln(1 + 2m sqrt2 + a sqrt(b (2m + sqrt2))) for integers a, b.

    R = (exp(V/2pi) - 1 - 2m sqrt2)^2 / (2m + sqrt2) must be an integer
    a^2 b; it is split with b squarefree.
    """
    if not isinstance(m, int) or m < 1:
        raise DomainError("m must be a positive integer")
    mp = ctx.mp
    big = _as_bigreal(V, ctx)
    e = mp.exp(mp.mpf(big.value) / (2 * mp.pi))
    e_err = e * mp.mpf(big.error_bound) / (2 * mp.pi)
    s2 = mp.sqrt(2)
    base = e - 1 - 2 * m * s2
    r = base ** 2 / (2 * m + s2)
    r_err = 2 * abs(base) * e_err / (2 * m + s2) + abs(r) * mp.mpf(10) ** (-(ctx.digits - 5))
    value = rational_reconstruct(BigReal(r, r_err, ctx.digits), 10 ** 6, ctx)
    if value.denominator != 1 or value <= 0:
        raise RecognitionError(f"R = {value} is not a positive integer")
    dec = squarefree_decompose(int(value))
    return dec.s, dec.d
