"""Exact p-adic scalars over Q_p (p odd) and the residue-field symbols built on them."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import DyadicPrime, NotAUnit, ZeroValuation

Rational = Union[int, Fraction]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


@dataclass(frozen=True)
class PrimeCtx:
    """An odd prime p. Since the base field is Q_p, p is also the residue cardinality f."""

    p: int

    def __post_init__(self):
        if self.p == 2:
            raise DyadicPrime("p = 2 is not supported")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def f(self) -> int:
        return self.p

    @property
    def nonresidue(self) -> int:
        return least_nonresidue(self.p)


@lru_cache(maxsize=None)
def least_nonresidue(p: int) -> int:
    for r in range(2, p):
        if pow(r, (p - 1) // 2, p) == p - 1:
            return r
    raise ValueError(f"no nonresidue mod {p}")


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """Parse ``"a"`` or ``"a/b"``."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(text.strip())


def format_rational(x: Rational) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _int_ord(m: int, p: int) -> int:
    k = 0
    while m % p == 0:
        m //= p
        k += 1
    return k


def ord_p(x: Rational, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ZeroValuation("ord(0) is undefined")
    return _int_ord(x.numerator, p) - _int_ord(x.denominator, p)


def unit_part(x: Rational, p: int) -> Fraction:
    x = Fraction(x)
    return x / Fraction(p) ** ord_p(x, p)


def residue(x: Rational, p: int) -> int:
    """Reduction mod p of a p-integral rational."""
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, p) % p


def is_p_integral(x: Rational, p: int) -> bool:
    return Fraction(x).denominator % p != 0


def legendre(a: int, p: int) -> int:
    """Legendre symbol via Euler's criterion."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def is_unit_square(x: Rational, p: int) -> bool:
    if x == 0 or ord_p(x, p) != 0:
        raise NotAUnit(f"{x} is not a {p}-adic unit")
    return legendre(residue(x, p), p) == 1


def hilbert_pi(x: Rational, p: int) -> int:
    """(x, p) for a unit x: +1 iff x is a square in Q_p."""
    return 1 if is_unit_square(x, p) else -1


def hilbert_symbol(a: Rational, b: Rational, p: int) -> int:
    """General Hilbert symbol (a, b) over Q_p for odd p."""
    if p == 2:
        raise DyadicPrime("p = 2 is not supported")
    alpha, beta = ord_p(a, p), ord_p(b, p)
    u, v = residue(unit_part(a, p), p), residue(unit_part(b, p), p)
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    return sign * legendre(u, p) ** (beta % 2) * legendre(v, p) ** (alpha % 2)


def delta(m: int) -> int:
    return 1 if m % 2 == 0 else 0


def canonical_unit(x: Rational, p: int) -> int:
    """Square-class representative of a unit: 1 or the least nonresidue."""
    return 1 if is_unit_square(x, p) else least_nonresidue(p)


@dataclass(frozen=True)
class PadicScalar:
    """An exact rational viewed inside Q_p."""

    value: Fraction
    ctx: PrimeCtx

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))

    def ord(self) -> int:
        return ord_p(self.value, self.ctx.p)

    def unit_part(self) -> Fraction:
        return unit_part(self.value, self.ctx.p)

    def abs(self) -> Fraction:
        return Fraction(self.ctx.p) ** (-self.ord())

    def is_unit(self) -> bool:
        return self.value != 0 and self.ord() == 0

    def unit_square_class(self) -> str:
        return "square" if is_unit_square(self.value, self.ctx.p) else "nonsquare"

    def hilbert_pi(self) -> int:
        return hilbert_pi(self.value, self.ctx.p)

    def __mul__(self, other: "PadicScalar") -> "PadicScalar":
        if other.ctx != self.ctx:
            raise ValueError("prime mismatch")
        return PadicScalar(self.value * other.value, self.ctx)


def ord(x: PadicScalar) -> int:  # noqa: A001 - mirrors the mathematical name
    return x.ord()


def unit_square_class(x: PadicScalar) -> str:
    return x.unit_square_class()
