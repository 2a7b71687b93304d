"""Exact integer kernels: the Kekulé recurrences, the (y, z) families,
continued-fraction convergents of square roots and the squarefree helpers
behind the OEIS sequences A000188, A007913, A019554, A026741 and A083481.

Everything here is exact (``int`` / ``fractions.Fraction``) and pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from numbers import Rational
from typing import Union

ExactRational = Union[int, Fraction]


class DomainError(ValueError):
    """Argument outside the domain of a mathematical operation."""


def _check_natural(n: int, name: str = "n", least: int = 0) -> None:
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError(f"{name} must be an int, got {type(n).__name__}")
    if n < least:
        raise DomainError(f"{name} must be >= {least}, got {n}")


def as_rational(k) -> ExactRational:
    """Coerce ``k`` to an exact rational; floats are refused."""
    if isinstance(k, bool):
        raise TypeError("bool is not a rational")
    if isinstance(k, int):
        return k
    if isinstance(k, Fraction):
        return k.numerator if k.denominator == 1 else k
    if isinstance(k, str):
        return as_rational(Fraction(k))
    if isinstance(k, Rational):
        return as_rational(Fraction(k.numerator, k.denominator))
    raise TypeError(f"expected an exact rational, got {type(k).__name__}")


def _linear2(n: int, mult, first, second):
    """n-th term of u_n = mult*u_{n-1} - u_{n-2} with u_0=first, u_1=second."""
    prev, cur = first, second
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, mult * cur - prev
    return cur


def kekule_c(n: int) -> int:
    """K(P_n): c_0 = 0, c_1 = 4, c_n = 10 c_{n-1} - c_{n-2}."""
    _check_natural(n)
    return _linear2(n, 10, 0, 4)


def companion_d(n: int) -> int:
    """Companion sequence (A001079): d_0 = 1, d_1 = 5, same kernel."""
    _check_natural(n)
    return _linear2(n, 10, 1, 5)


def y_seq(n: int, k) -> ExactRational:
    """y_0 = 0, y_1 = 4, y_n = (4k+2) y_{n-1} - y_{n-2}."""
    _check_natural(n)
    k = as_rational(k)
    return as_rational(_linear2(n, 4 * k + 2, 0, 4))


def z_seq(n: int, k) -> ExactRational:
    """z_0 = 1, z_1 = 2k+1, z_n = (4k+2) z_{n-1} - z_{n-2}."""
    _check_natural(n)
    k = as_rational(k)
    return as_rational(_linear2(n, 4 * k + 2, 1, 2 * k + 1))


# --------------------------------------------------------------------------
# squarefree decomposition
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SquarefreeDecomposition:
    """``n = s**2 * d`` with ``d`` squarefree."""

    n: int
    s: int
    d: int

    @property
    def a000188(self) -> int:
        return self.s

    @property
    def a007913(self) -> int:
        return self.d

    @property
    def a019554(self) -> int:
        return self.s * self.d


def _trial_factor(n: int) -> dict[int, int]:
    # 2, 3, then the 6k +- 1 wheel
    factors: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    p, step = 5, 2
    while p * p <= n:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
        p += step
        step = 6 - step
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def squarefree_decompose(n: int) -> SquarefreeDecomposition:
    _check_natural(n, least=1)
    s = d = 1
    for p, e in _trial_factor(n).items():
        s *= p ** (e // 2)
        if e % 2:
            d *= p
    return SquarefreeDecomposition(n, s, d)


def is_squarefree(n: int) -> bool:
    return squarefree_decompose(n).s == 1


def core(n: int) -> int:
    """Squarefree part of n (A007913)."""
    return squarefree_decompose(n).d


def a000188(n: int) -> int:
    """Square root of the largest square dividing n."""
    return squarefree_decompose(n).s


def a007913(n: int) -> int:
    return core(n)


def a019554(n: int) -> int:
    """Smallest number whose square is divisible by n."""
    return squarefree_decompose(n).a019554


def a083481(m: int) -> int:
    """core(m (m+1)); matches the listed terms 2, 6, 3, 5, 30, 42, 14."""
    _check_natural(m, "m", least=1)
    return core(m * (m + 1))


def a026741(n: int) -> int:
    """n for odd n, n/2 for even n."""
    _check_natural(n)
    return n if n % 2 else n // 2


def a165367(n: int) -> int:
    """Trisection A026741(3n + 2)."""
    _check_natural(n)
    return a026741(3 * n + 2)


def a129194(n: int) -> int:
    """n^2 (3 - (-1)^n) / 4."""
    _check_natural(n)
    return n * n * (3 - (-1) ** n) // 4


def a168077(n: int) -> int:
    """a(2n) = A129194(2n)/2, a(2n+1) = A129194(2n+1); equals A026741(n)^2."""
    _check_natural(n)
    return a129194(n) // 2 if n % 2 == 0 else a129194(n)


# --------------------------------------------------------------------------
# continued fractions of square roots
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergentPair:
    index: int
    numerator: int
    denominator: int
    radicand: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def norm(self) -> int:
        """numerator^2 - radicand * denominator^2."""
        return self.numerator ** 2 - self.radicand * self.denominator ** 2


def sqrt_partial_quotients(radicand: int):
    """Yield the (eventually periodic) partial quotients of sqrt(radicand)."""
    a0 = isqrt(radicand)
    if a0 * a0 == radicand:
        raise DomainError(f"{radicand} is a perfect square")
    m, q, a = 0, 1, a0
    yield a0
    while True:
        m = q * a - m
        q = (radicand - m * m) // q
        a = (a0 + m) // q
        yield a


def convergents_sqrt(radicand: int, i: int) -> ConvergentPair:
    """i-th principal convergent of sqrt(radicand), 1-based (1st = a0/1)."""
    _check_natural(radicand, "radicand", least=2)
    _check_natural(i, "i", least=1)
    h_old, h = 0, 1
    k_old, k = 1, 0
    quotients = sqrt_partial_quotients(radicand)
    for _ in range(i):
        a = next(quotients)
        h_old, h = h, a * h + h_old
        k_old, k = k, a * k + k_old
    return ConvergentPair(i, h, k, radicand)


def pell(i: int) -> int:
    """Denominator of the i-th convergent to sqrt(2): 1, 2, 5, 12, 29, ..."""
    return convergents_sqrt(2, i).denominator


def gcd_many(*values: int) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g
