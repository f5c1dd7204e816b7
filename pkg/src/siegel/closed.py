"""Closed formulas for odd p and forms diag(u_1, ..., u_{n-2}, p^d1 v1, p^d2 v2).

Every function here is a direct evaluation of a case table; nothing in this
module enumerates lattices. ``geo(top)`` is the finite geometric sum
1 + f + ... + f^top and is 0 for top < 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .arith import delta, hilbert_pi, is_unit_square, legendre
from .errors import HypothesisViolated
from .halfpow import HalfPowerValue


@dataclass(frozen=True)
class TailParams:
    p: int
    n: int
    u_prod: Fraction
    v1: Fraction
    v2: Fraction
    d1: int
    d2: int

    def __post_init__(self):
        for x in (self.u_prod, self.v1, self.v2):
            is_unit_square(x, self.p)  # raises NotAUnit
        if not 0 <= self.d1 <= self.d2:
            raise ValueError("need 0 <= d1 <= d2")
        if self.n < 2:
            raise ValueError("need n >= 2")

    @classmethod
    def from_units(cls, p: int, us: Sequence, v1, v2, d1: int, d2: int) -> "TailParams":
        prod = Fraction(1)
        for u in us:
            prod *= Fraction(u)
        return cls(p, len(us) + 2, prod, Fraction(v1), Fraction(v2), d1, d2)

    @classmethod
    def from_lattice(cls, L) -> "TailParams":
        from .overlat import tail_params

        us, v1, v2, d1, d2 = tail_params(L)
        return cls.from_units(L.p, us, v1, v2, d1, d2)

    @property
    def f(self) -> int:
        return self.p

    @property
    def n0(self) -> int:
        return self.n - 1 if self.d1 == 0 else self.n - 2

    def split_tail(self) -> bool:
        """The predicate written δ(d1+d2) = (-v1v2, π): d1+d2 even and -v1v2 a square."""
        return (self.d1 + self.d2) % 2 == 0 and hilbert_pi(-self.v1 * self.v2, self.p) == 1

    def sign(self, x: Fraction) -> int:
        return hilbert_pi(x, self.p)

    @property
    def s_nm2(self) -> int:
        """((-1)^{(n-2)/2} u_1...u_{n-2}, π); n even."""
        return self.sign((-1) ** ((self.n - 2) // 2) * self.u_prod)

    @property
    def s_v1(self) -> int:
        """((-1)^{(n-1)/2} u_1...u_{n-2} v1, π); n odd."""
        return self.sign((-1) ** ((self.n - 1) // 2) * self.u_prod * self.v1)

    @property
    def s_v2(self) -> int:
        return self.sign((-1) ** ((self.n - 1) // 2) * self.u_prod * self.v2)


def _geo(f: int, top: int) -> int:
    return sum(f**i for i in range(top + 1))


def closed_counts(t: TailParams, b: int) -> tuple[int, int, int]:
    """(#S_{(n-2)±,b}, #S_{(n-1)±,b}, #S_{n±,b}) from the case tables."""
    f, d1, d2 = t.f, t.d1, t.d2
    twob = 2 * b
    split = t.split_tail()

    # #S_{(n-2)±, b}
    if twob < d1:
        s0 = _geo(f, b)
    elif twob < d2:
        s0 = _geo(f, (d1 - 1) // 2)
    elif twob < d1 + d2:
        if not split:
            s0 = _geo(f, (d1 - 1) // 2 + (d2 - 1) // 2 - b)
        else:
            s0 = (twob - d2 + 1) * f ** ((d1 + d2) // 2 - b - 1) + _geo(f, (d1 + d2) // 2 - b - 1)
    else:
        s0 = 0

    # #S_{(n-1)±, b}
    if twob < d1 or d1 + d2 <= twob:
        s1 = 0
    elif twob < d2:
        s1 = delta(d1) * f ** (d1 // 2) if d1 % 2 == 0 else 0
    elif not split:
        s1 = 0
        if d1 % 2 == 0:
            s1 += f ** (d1 // 2 + (d2 - 1) // 2 - b)
        if d2 % 2 == 0:
            s1 += f ** ((d1 + d2) // 2 - b)
    else:
        s1 = (twob - d2 + 1) * (f - 1) * f ** ((d1 + d2) // 2 - b - 1)

    # #S_{n±, b}
    if twob != d1 + d2:
        s2 = 0
    elif split:
        s2 = d1 + 1
    else:
        s2 = delta(d1) * delta(d2)
    return s0, s1, s2


def signed_closed_counts(t: TailParams, b: int) -> dict[int, int]:
    """χ(a±)·#S_{(a±,b)} for the even a below n that can occur.

    n even: {n-2: ...}; n odd: {n-1: ...}.
    """
    f, d1, d2, n = t.f, t.d1, t.d2, t.n
    twob = 2 * b
    if n % 2 == 0:
        s0 = closed_counts(t, b)[0] if twob < d1 + d2 else 0
        return {n - 2: t.s_nm2 * s0 if twob < d1 + d2 else 0}
    if twob < d1 or d1 + d2 <= twob:
        val = 0
    elif twob < d2:
        val = t.s_v1 * delta(d1) * f ** (d1 // 2) if d1 % 2 == 0 else 0
    elif d1 % 2 == 0 and d2 % 2 == 1:
        val = t.s_v1 * f ** ((d1 + d2 - 1) // 2 - b)
    elif d1 % 2 == 1 and d2 % 2 == 0:
        val = t.s_v2 * f ** ((d1 + d2 - 1) // 2 - b)
    else:
        val = 0
    return {n - 1: val}


def xi_eta_from_tail(t: TailParams) -> tuple[int, int]:
    """(ξ_B, 𝔢_B) for n even, (η_B, 𝔢_B) for n odd."""
    d1, d2, n = t.d1, t.d2, t.n
    if n % 2 == 0:
        if (d1 + d2) % 2 == 0:
            xi = t.sign((-1) ** (n // 2) * t.u_prod * t.v1 * t.v2)
        else:
            xi = 0
        return xi, 2 * ((d1 + d2) // 2)
    if d1 % 2 == 0 and d2 % 2 == 0:
        eta = 1
    elif d1 % 2 == 1 and d2 % 2 == 1:
        eta = t.sign(-t.v1 * t.v2)
    elif d1 % 2 == 0:
        eta = t.s_v1
    else:
        eta = t.s_v2
    return eta, d1 + d2


def closed_coefficients(t: TailParams, n0: Optional[int] = None) -> list[HalfPowerValue]:
    """c_0 .. c_{𝔢_B} from the explicit tables (n0 = n-1 iff d1 = 0)."""
    if n0 is not None and n0 != t.n0:
        raise HypothesisViolated(f"claimed n0 = {n0} but d1 = {t.d1} gives n0 = {t.n0}")
    f, n, d1, d2 = t.f, t.n, t.d1, t.d2
    H = lambda c: HalfPowerValue.const(f, c)
    geo = lambda top: HalfPowerValue.geometric(f, top)
    sq = lambda k: HalfPowerValue.power(f, k)  # f^(k/2)
    inv, eB = xi_eta_from_tail(t)
    c: list[HalfPowerValue] = [HalfPowerValue(f) for _ in range(eB + 1)]

    if d1 == 0:
        if n % 2 == 0:
            xi = inv
            for tt in range(eB):
                c[tt] = H(1) if tt % 2 == 0 else sq(-1) * (-xi)
            c[eB] = H(1)
        else:
            for tt in range(eB):
                c[tt] = H(1) if tt % 2 == 0 else H(t.s_v1)
            c[eB] = H(1) if eB % 2 == 0 else H(t.s_v1)
        return c

    if n % 2 == 0:
        xi, s = inv, t.s_nm2
        lead = sq(1) * s - sq(-1) * xi
        for tt in range(eB):
            if tt % 2:
                k = (tt - 1) // 2
                if 2 * k < d1:
                    c[tt] = lead * geo(k)
                elif 2 * k < d2:
                    c[tt] = geo((d1 - 1) // 2).shift(1) * s - geo(d1 // 2).shift(-1) * xi
                else:
                    c[tt] = lead * geo(eB // 2 - k - 1)
            else:
                k = tt // 2
                if 2 * k < d1:
                    c[tt] = geo(k) - geo(k - 1) * (xi * s)
                elif 2 * k < d2:
                    c[tt] = geo(d1 // 2) - geo((d1 - 1) // 2) * (xi * s)
                else:
                    c[tt] = geo(eB // 2 - k) - geo(eB // 2 - k - 1) * (xi * s)
        c[eB] = H(1)
        return c

    even1, even2 = d1 % 2 == 0, d2 % 2 == 0
    for tt in range(eB):
        k = tt // 2
        if tt % 2:
            if 2 * k < d1:
                val = H(0)
            elif 2 * k < d2:
                val = H(t.s_v1 * delta(d1) * f ** (d1 // 2)) if even1 else H(0)
            elif even1 == even2:
                val = H(0)
            elif even1:
                val = H(t.s_v1 * f ** ((eB - 1) // 2 - k))
            else:
                val = H(t.s_v2 * f ** ((eB - 1) // 2 - k))
        else:
            if 2 * k < d1:
                val = H(f**k)
            elif 2 * k < d2:
                val = H(delta(d1) * f ** (d1 // 2)) if even1 else H(0)
            elif even1 and even2:
                val = H(f ** (eB // 2 - k))
            elif not even1 and not even2:
                val = H(t.sign(-t.v1 * t.v2) * f ** (eB // 2 - k))
            else:
                val = H(0)
        c[tt] = val
    if even1 and even2:
        c[eB] = H(1)
    elif not even1 and not even2:
        c[eB] = H(t.sign(-t.v1 * t.v2))
    elif even1:
        c[eB] = H(t.s_v1)
    else:
        c[eB] = H(t.s_v2)
    return c


def norm_solution_count(U: int, V: int, f: int) -> int:
    """#{s in F_f : t^2 - U s^2 = V has a solution t in F_f^×}."""
    if U % f == 0 or V % f == 0:
        raise ValueError("U and V must be nonzero mod f")
    sq = lambda x: legendre(x, f) == 1
    if not sq(-V):
        return (f - 1) // 2
    if sq(U) and sq(-U * V):
        return (f - 3) // 2
    return (f + 1) // 2


def norm_solution_count_brute(U: int, V: int, f: int) -> int:
    squares = {}
    for t in range(1, f):
        squares.setdefault(t * t % f, True)
    return sum(1 for s in range(f) if (V + U * s * s) % f in squares)
