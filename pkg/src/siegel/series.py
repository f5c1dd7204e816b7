"""The Siegel series F_L(X), its normalized coefficients c_t, and local densities."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import HypothesisViolated, InconsistentCounts, PoleAtK, TooLarge
from .halfpow import HalfPowerValue, poly_add, poly_mul, poly_trim
from .lattice import BInvariants, QuadLattice, b_invariants
from .overlat import CountTable, count_table

NAIVE_LIMIT = 10**8


@dataclass
class SeriesPoly:
    coeffs: list[HalfPowerValue]
    meta: BInvariants

    @property
    def degree(self) -> int:
        return len(poly_trim(self.coeffs)) - 1

    def integer_coeffs(self) -> list[int]:
        return [c.to_int() for c in self.coeffs]

    def __call__(self, x: Fraction) -> Fraction:
        return sum((Fraction(c.to_int()) * Fraction(x) ** i for i, c in enumerate(self.coeffs)), Fraction(0))


def _index_range(n: int, a: int) -> list[int]:
    """{i : n/2 < i < n - a/2}."""
    return [i for i in range(n // 2 + 1, n + 1) if 2 * i > n and 2 * i < 2 * n - a]


def siegel_poly(L: QuadLattice, counts: Optional[CountTable] = None) -> SeriesPoly:
    """Assemble F_L(X) from the overlattice census and check its shape."""
    counts = counts if counts is not None else count_table(L)
    inv = b_invariants(L)
    f, n = L.p, L.n
    gk_total = inv.gk.total
    H = lambda c: HalfPowerValue.const(f, c)
    P = lambda k, c=1: HalfPowerValue.power(f, k, c)

    def a_term(a: int, b: int) -> list[HalfPowerValue]:
        tot, sgn = counts.total(a, b), counts.signed(a, b)
        if not tot:
            return []
        # #S·(1 + χ f^{n-a/2} X), χ-weighted over both signs
        lin = [H(tot), P(2 * n - a, sgn) if a % 2 == 0 else H(0)]
        poly = poly_mul([HalfPowerValue(f)] * (2 * b) + [P(2 * b * (n + 1))], lin, f)
        for i in _index_range(n, a):
            poly = poly_mul(poly, [H(1), H(0), P(4 * i, -1)], f)
        return poly

    total: list[HalfPowerValue] = []
    if n % 2 == 0:
        inner: list[HalfPowerValue] = []
        for b in range(gk_total // 2 + 1):
            for a in range(n):
                inner = poly_add(inner, a_term(a, b), f)
        total = poly_mul([H(1), P(n, -inv.xiB)], inner, f) if inner else []
        if gk_total % 2 == 0:
            top = counts.total(n, gk_total // 2)
            total = poly_add(total, [HalfPowerValue(f)] * gk_total + [P(gk_total * (n + 1), top)], f)
    else:
        for b in range(gk_total // 2 + 1):
            for a in range(n + 1):
                total = poly_add(total, a_term(a, b), f)
    coeffs = [c.canonical() for c in poly_trim(total)]
    F = SeriesPoly(coeffs, inv)
    _check_shape(F, L)
    return F


def _check_shape(F: SeriesPoly, L: QuadLattice):
    inv = F.meta
    if not F.coeffs or F.coeffs[0] != 1:
        raise InconsistentCounts(f"F_L(0) = {F.coeffs[:1]} != 1")
    for i, c in enumerate(F.coeffs):
        if not c.is_integer():
            raise InconsistentCounts(f"coefficient of X^{i} is not an integer: {c}")
    if F.degree != inv.eB:
        raise InconsistentCounts(f"deg F_L = {F.degree} but e_B = {inv.eB}")
    # comparing X^{-e} on both sides of F(f^{-n-1}/X) = ζ (f^{(n+1)/2} X)^{-e} F(X)
    lead = HalfPowerValue.power(L.p, (L.n + 1) * inv.eB, inv.zetaB)
    if F.coeffs[-1] != lead:
        raise InconsistentCounts(f"leading coefficient {F.coeffs[-1]} != {lead}")


def substitute_normalized(F: SeriesPoly) -> list[HalfPowerValue]:
    """Coefficients of F_L(f^{-(n+1)/2} X)."""
    n = F.meta.n
    out = [c.shift(-(n + 1) * t).canonical() for t, c in enumerate(F.coeffs)]
    f = F.coeffs[0].f
    out += [HalfPowerValue(f)] * (F.meta.eB + 1 - len(out))
    return out


def _elementary(values: list[HalfPowerValue], f: int) -> list[HalfPowerValue]:
    """e_0..e_m of the given values (DP over the set)."""
    e = [HalfPowerValue.const(f, 1)]
    for v in values:
        e = [e[0]] + [e[k] + e[k - 1] * v for k in range(1, len(e))] + [e[-1] * v]
    return e


def coefficients(L: QuadLattice, counts: Optional[CountTable] = None) -> list[HalfPowerValue]:
    """c_0..c_{𝔢_B} directly from the census, one formula per parity of n and t."""
    counts = counts if counts is not None else count_table(L)
    inv = b_invariants(L)
    f, n, eB = L.p, L.n, inv.eB
    H = lambda c: HalfPowerValue.const(f, c)
    P = lambda k, c=1: HalfPowerValue.power(f, k, c)
    # each index i contributes -f^{2i-(n+1)}
    esym = {a: _elementary([P(2 * (2 * i - n - 1), -1) for i in _index_range(n, a)], f) for a in range(n + 1)}

    def E(a: int, k: int) -> HalfPowerValue:
        if k < 0 or k >= len(esym[a]):
            return H(0)
        return esym[a][k]

    out = []
    for t in range(eB + 1):
        s = t // 2
        acc = H(0)
        if n % 2 == 0:
            xi = inv.xiB
            if t % 2:
                for b in range(s + 1):
                    for a in range(n):
                        term = P(-1, -xi * counts.total(a, b))
                        if a % 2 == 0:
                            term = term + P(n - a - 1, counts.signed(a, b))
                        acc = acc + term * E(a, s - b)
            else:
                for b in range(s + 1):
                    for a in range(n + 1):
                        acc = acc + E(a, s - b) * counts.total(a, b)
                for b in range(s):
                    for a in range(0, n, 2):
                        acc = acc - P(n - a - 2, xi * counts.signed(a, b)) * E(a, s - b - 1)
        else:
            if t % 2:
                for b in range(s + 1):
                    for a in range(0, n, 2):
                        acc = acc + P(n - a - 1, counts.signed(a, b)) * E(a, s - b)
            else:
                for b in range(s + 1):
                    for a in range(n + 1):
                        acc = acc + E(a, s - b) * counts.total(a, b)
        out.append(acc.canonical())
    return out


def gamma_eval(n: int, xi: Optional[int], k: int, f: int) -> Fraction:
    """γ_L(f^{-k})."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ff = Fraction(f)
    g = 1 - ff ** (-k)
    for i in range(1, n // 2 + 1):
        g *= 1 - ff ** (2 * i - 2 * k)
    if n % 2 == 0:
        den = 1 - (xi or 0) * ff ** (n // 2 - k)
        if den == 0:
            raise PoleAtK(f"1 - ξ f^(n/2-k) vanishes at k = {k}")
        g /= den
    return g


def local_density(L: QuadLattice, k: int, counts: Optional[CountTable] = None) -> Fraction:
    """α(L, H_k) = γ_L(f^{-k}) F_L(f^{-k})."""
    F = siegel_poly(L, counts)
    inv = F.meta
    return gamma_eval(L.n, inv.xiB, k, L.p) * F(Fraction(1, L.p**k))


def naive_cost(L: QuadLattice, k: int, N: int) -> int:
    """Work estimate: one pass over (Z/p^N)^{2n}, k-2 full convolutions, one dot product."""
    n, q = L.n, L.p**N
    m = q ** (n * (n + 1) // 2)
    return q ** (2 * n) + max(k - 2, 0) * m * m + (m if k >= 2 else 0)


def local_density_naive(L: QuadLattice, k: int, N: int, limit: int = NAIVE_LIMIT) -> Fraction:
    """f^{-N(2kn - n(n+1)/2)} · #{M in (Z/p^N)^{2k×n} : ᵗM H_k M ≡ B}.

    H_k splits into k hyperbolic planes, so ᵗM H_k M is a sum of k
    independent per-plane Gram matrices sym(x ᵗy); the count is the k-fold
    additive convolution of the per-plane distribution, read at B.
    """
    if k < 1 or N < 1:
        raise ValueError("need k >= 1 and N >= 1")
    n, p = L.n, L.p
    q = p**N
    if naive_cost(L, k, N) > limit:
        raise TooLarge(f"naive density count for n={n}, N={N}, p={p} exceeds {limit}")
    target = tuple(_mod(L.gram[i][j], q) for i in range(n) for j in range(i, n))
    inv2 = pow(2, -1, q)
    plane: Counter = Counter()
    for x in itertools.product(range(q), repeat=n):
        for y in itertools.product(range(q), repeat=n):
            key = tuple(
                (x[i] * y[i]) % q if i == j else ((x[i] * y[j] + x[j] * y[i]) * inv2) % q
                for i in range(n)
                for j in range(i, n)
            )
            plane[key] += 1
    dist = plane
    for _ in range(k - 2):
        nxt: Counter = Counter()
        for s1, c1 in dist.items():
            for s2, c2 in plane.items():
                nxt[tuple((a + b) % q for a, b in zip(s1, s2))] += c1 * c2
        dist = nxt
    if k == 1:
        count = plane.get(target, 0)
    else:
        count = sum(c * plane.get(tuple((t - a) % q for t, a in zip(target, s1)), 0) for s1, c in dist.items())
    return Fraction(count) / Fraction(p) ** (N * (2 * k * n - (n * n + n) // 2))


def _mod(x: Fraction, q: int) -> int:
    return x.numerator * pow(x.denominator, -1, q) % q


MODES = ("general", "n0eq_nm1", "n0eq_nm2")


def low_order(L: QuadLattice, counts: Optional[CountTable] = None, mode: str = "general") -> list[HalfPowerValue]:
    """Coefficient corollaries: c_0..c_3 (general), or all c_t when n0 = n-1 or n-2."""
    counts = counts if counts is not None else count_table(L)
    inv = b_invariants(L)
    f, n, eB = L.p, L.n, inv.eB
    n0, gk_total = inv.gk.n0, inv.gk.total
    H = lambda c: HalfPowerValue.const(f, c)
    P = lambda k, c=1: HalfPowerValue.power(f, k, c)
    S = counts.total
    chiS = counts.signed

    if mode == "general":
        # χ(n0±) for L itself: the b = 0 row is the single entry L
        chi0 = chiS(n0, 0)
        xi = inv.xiB if n % 2 == 0 else 0
        idx = [i for i in _index_range(n, n0)]
        out = [H(1)]
        if eB >= 1:
            c1 = P(n - n0 - 1, chi0)
            if n % 2 == 0:
                c1 = c1 - P(-1, xi)
            out.append(c1)
        if eB >= 2:
            c2 = H(S(n0, 1) + S(n0 + 1, 1) + S(n0 + 2, 1))
            c2 = c2 - sum((P(2 * (2 * i - n - 1)) for i in idx), H(0))
            if n % 2 == 0:
                c2 = c2 - P(n - n0 - 2, xi * chi0)
            out.append(c2)
        if eB >= 3:
            if n0 % 2:
                c3 = P(n - n0 - 2, chiS(n0 + 1, 1))
            else:
                inner = H(f * chiS(n0, 1)) - sum((P(2 * (2 * i - n), chi0) for i in idx), H(0))
                c3 = (inner + chiS(n0 + 2, 1)) * P(n - n0 - 3)
            if n % 2 == 0:
                tail = H(S(n0, 1) + S(n0 + 1, 1) + S(n0 + 2, 1)) - sum((P(2 * (2 * i - n - 1)) for i in idx), H(0))
                c3 = c3 - P(-1, xi) * tail
            out.append(c3)
        return [c.canonical() for c in out]

    if mode == "n0eq_nm1":
        if n0 != n - 1:
            raise HypothesisViolated(f"mode n0eq_nm1 needs n0 = n-1, got n0 = {n0}")
        out = []
        for t in range(eB + 1):
            s = t // 2
            if n % 2 == 0:
                xi = inv.xiB
                if t == eB:
                    # for odd |GK| the surviving top term is the b = eB/2 one
                    c = H(S(n, eB // 2)) if gk_total % 2 == 0 else H(S(n - 1, eB // 2))
                elif t % 2:
                    c = P(-1, -xi * S(n - 1, s))
                else:
                    c = H(S(n - 1, s))
            else:
                if t == eB:
                    c = H(S(n, eB // 2)) if eB % 2 == 0 else H(chiS(n - 1, (eB - 1) // 2))
                elif t % 2:
                    c = H(chiS(n - 1, s))
                else:
                    c = H(S(n - 1, s))
            out.append(c.canonical())
        return out

    if mode == "n0eq_nm2":
        if n0 != n - 2:
            raise HypothesisViolated(f"mode n0eq_nm2 needs n0 = n-2, got n0 = {n0}")
        out = []
        for t in range(eB + 1):
            s = t // 2
            if n % 2 == 0:
                xi = inv.xiB
                if t == eB and gk_total % 2 == 0:
                    c = H(S(n, eB // 2)) - H(xi * chiS(n - 2, eB // 2 - 1))
                elif t % 2:
                    c = P(1, chiS(n - 2, s)) - P(-1, xi * (S(n - 2, s) + S(n - 1, s)))
                else:
                    prev = xi * chiS(n - 2, s - 1) if s >= 1 else 0
                    c = H(S(n - 2, s) + S(n - 1, s) - prev)
            else:
                if t == eB:
                    if gk_total % 2 == 0:
                        c = H(S(n, eB // 2) - S(n - 2, eB // 2 - 1))
                    else:
                        c = H(chiS(n - 1, (eB - 1) // 2))
                elif t % 2:
                    # the χ-weighted count χ((n-1)±)·#S
                    c = H(chiS(n - 1, s))
                else:
                    c = H(S(n - 1, s) + S(n - 2, s) - (S(n - 2, s - 1) if s >= 1 else 0))
            out.append(c.canonical())
        return out

    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def applicable_modes(L: QuadLattice) -> list[str]:
    inv = b_invariants(L)
    n0, n = inv.gk.n0, L.n
    modes = ["general"]
    if n0 == n - 1:
        modes.append("n0eq_nm1")
    if n0 == n - 2:
        modes.append("n0eq_nm2")
    return modes
