"""Exact elements of Z[f^{1/2}, f^{-1/2}] and polynomials over them."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union


def _strip(m: int, f: int) -> tuple[int, int]:
    k = 0
    while m and m % f == 0:
        m //= f
        k += 1
    return m, k


class HalfPowerValue:
    """Finite sum of ``c * f^(k/2)``, keyed by the doubled exponent ``k``.

    Terms are kept as built; equality and hashing go through ``canonical()``,
    which evaluates at the bound ``f`` and rewrites the result as at most two
    terms ``m f^e + m' f^(e' + 1/2)`` with ``f`` not dividing ``m, m'``.
    """

    __slots__ = ("f", "terms")

    def __init__(self, f: int, terms: Union[Mapping[int, int], Iterable[tuple[int, int]], None] = None):
        self.f = f
        acc: dict[int, int] = {}
        items = terms.items() if isinstance(terms, Mapping) else (terms or ())
        for k, c in items:
            if c:
                acc[k] = acc.get(k, 0) + int(c)
        self.terms = {k: c for k, c in sorted(acc.items()) if c}

    @classmethod
    def const(cls, f: int, c: int) -> "HalfPowerValue":
        return cls(f, {0: c})

    @classmethod
    def power(cls, f: int, doubled_exp: int, coeff: int = 1) -> "HalfPowerValue":
        return cls(f, {doubled_exp: coeff})

    @classmethod
    def geometric(cls, f: int, top: int) -> "HalfPowerValue":
        """sum_{i=0}^{top} f^i, which is 0 when top < 0."""
        return cls(f, {2 * i: 1 for i in range(top + 1)})

    def _coerce(self, other) -> "HalfPowerValue":
        if isinstance(other, HalfPowerValue):
            if other.f != self.f:
                raise ValueError("mismatched f")
            return other
        if isinstance(other, int):
            return HalfPowerValue.const(self.f, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return HalfPowerValue(self.f, list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return HalfPowerValue(self.f, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[int, int] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + c1 * c2
        return HalfPowerValue(self.f, out)

    __rmul__ = __mul__

    def shift(self, doubled_exp: int) -> "HalfPowerValue":
        """Multiply by f^(doubled_exp/2)."""
        return HalfPowerValue(self.f, {k + doubled_exp: c for k, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.canonical().terms

    def value(self) -> tuple[Fraction, Fraction]:
        """(A, B) with self = A + B * sqrt(f)."""
        a = b = Fraction(0)
        for k, c in self.terms.items():
            if k % 2 == 0:
                a += c * Fraction(self.f) ** (k // 2)
            else:
                b += c * Fraction(self.f) ** ((k - 1) // 2)
        return a, b

    def canonical(self) -> "HalfPowerValue":
        out = {}
        for part, parity in zip(self.value(), (0, 1)):
            if part == 0:
                continue
            num, kn = _strip(part.numerator, self.f)
            _, kd = _strip(part.denominator, self.f)
            # part.denominator is a power of f by construction
            out[2 * (kn - kd) + parity] = num
        return HalfPowerValue(self.f, out)

    def is_integer(self) -> bool:
        """True when the value lies in Z (all canonical exponents even and >= 0)."""
        return all(k >= 0 and k % 2 == 0 for k in self.canonical().terms)

    def to_int(self) -> int:
        a, b = self.value()
        if b != 0 or a.denominator != 1:
            raise ValueError(f"{self} is not an integer")
        return a.numerator

    def __eq__(self, other):
        if isinstance(other, int):
            other = HalfPowerValue.const(self.f, other)
        if not isinstance(other, HalfPowerValue):
            return NotImplemented
        return self.f == other.f and self.value() == other.value()

    def __hash__(self):
        return hash((self.f, self.value()))

    def pairs(self) -> list[list[int]]:
        """JSON form: canonical ``[[doubledExponent, coeff], ...]``."""
        return [[k, c] for k, c in self.canonical().terms.items()]

    @classmethod
    def from_pairs(cls, f: int, pairs) -> "HalfPowerValue":
        return cls(f, [(int(k), int(c)) for k, c in pairs])

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, c in self.terms.items():
            if k == 0:
                parts.append(str(c))
            else:
                e = str(k // 2) if k % 2 == 0 else f"{k}/2"
                parts.append(f"{c}*f^{e}")
        return " + ".join(parts)


def poly_mul(a: list[HalfPowerValue], b: list[HalfPowerValue], f: int) -> list[HalfPowerValue]:
    if not a or not b:
        return []
    out = [HalfPowerValue(f) for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if not x.terms:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def poly_add(a: list[HalfPowerValue], b: list[HalfPowerValue], f: int) -> list[HalfPowerValue]:
    n = max(len(a), len(b))
    zero = HalfPowerValue(f)
    return [(a[i] if i < len(a) else zero) + (b[i] if i < len(b) else zero) for i in range(n)]


def poly_trim(a: list[HalfPowerValue]) -> list[HalfPowerValue]:
    a = list(a)
    while a and a[-1].is_zero():
        a.pop()
    return a
