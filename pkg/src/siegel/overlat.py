"""Integral overlattices L' of L with fixed index length, and their census.

Overlattices are enumerated as upper-triangular coset representatives X of
GL_n(Q_p)/GL_n(Z_p), in the orthogonal basis of L. Column j of X is
``X_{j-1} z / p^l + p^-l e_j`` with ``z`` running over ``(Z/p^l)^{j-1}``; each
lattice arises from exactly one (l_1..l_n, z_2..z_n). The search fixes z one
p-adic digit at a time and discards a branch as soon as the partial Gram
matrix cannot become integral, so only (near-)integral lattices are visited.
"""

from __future__ import annotations

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .arith import legendre, residue
from .errors import GuardrailExceeded, UnsupportedShape
from .lattice import QuadLattice, classify_residue, residue_form

log = logging.getLogger(__name__)

MAX_CANDIDATES = 10**7


@dataclass(frozen=True)
class Overlattice:
    hnf: tuple[tuple[Fraction, ...], ...]  # columns span L' in the orthogonal basis of L
    gram: tuple[tuple[Fraction, ...], ...]  # ᵗX·D·X
    b: int
    lengths: tuple[int, ...]


def _to_mod(x: Fraction, mod: int) -> int:
    return x.numerator * pow(x.denominator, -1, mod) % mod


class _FpSolver:
    """Solve M·δ = r over F_p for a fixed square matrix M."""

    def __init__(self, rows: list[list[int]], p: int):
        self.p = p
        n = len(rows)
        self.n = n
        m = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(rows)]
        pivots = []
        row = 0
        for col in range(n):
            piv = next((i for i in range(row, n) if m[i][col] % p), None)
            if piv is None:
                continue
            m[row], m[piv] = m[piv], m[row]
            inv = pow(m[row][col], -1, p)
            m[row] = [x * inv % p for x in m[row]]
            for i in range(n):
                if i != row and m[i][col]:
                    c = m[i][col]
                    m[i] = [(x - c * y) % p for x, y in zip(m[i], m[row])]
            pivots.append(col)
            row += 1
        self.rank = row
        self.pivots = pivots
        self.reduced = [r[:n] for r in m]
        self.ops = [r[n:] for r in m]
        free = [c for c in range(n) if c not in pivots]
        self.kernel = []
        for fc in free:
            v = [0] * n
            v[fc] = 1
            for i, pc in enumerate(pivots):
                v[pc] = -self.reduced[i][fc] % p
            self.kernel.append(v)

    def solutions(self, rhs: list[int]) -> list[list[int]]:
        p, n = self.p, self.n
        t = [sum(a * b for a, b in zip(op, rhs)) % p for op in self.ops]
        if any(t[i] for i in range(self.rank, n)):
            return []
        base = [0] * n
        for i, pc in enumerate(self.pivots):
            base[pc] = t[i]
        out = []
        for coeffs in itertools.product(range(p), repeat=len(self.kernel)):
            v = list(base)
            for c, kv in zip(coeffs, self.kernel):
                if c:
                    v = [(x + c * y) % p for x, y in zip(v, kv)]
            out.append(v)
        return out


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, k: int = 1):
        self.used += k
        if self.used > self.limit:
            raise GuardrailExceeded(f"overlattice search exceeded {self.limit} candidates")


def _column_choices(G, beta: Fraction, l: int, p: int, integral: bool, budget: _Budget) -> Iterator[tuple[int, ...]]:
    """All z in [0, p^l)^k making the extended Gram matrix integral (or all z)."""
    k = len(G)
    if l == 0:
        yield (0,) * k
        return
    if not integral:
        budget.spend(p ** (l * k))
        yield from itertools.product(range(p**l), repeat=k)
        return
    mod = p ** (2 * l)
    g = [[_to_mod(x, mod) for x in row] for row in G]
    bj = _to_mod(beta, mod)
    solver = _FpSolver([[x % p for x in row] for row in g], p)

    def quad(z, m):
        s = bj
        for i in range(k):
            zi = z[i]
            if zi:
                s += zi * sum(g[i][j] * z[j] for j in range(k))
        return s % m

    def rec(z, level):
        if level == l:
            if quad(z, mod) == 0:
                yield tuple(z)
            return
        pk = p**level
        gz = [sum(g[i][j] * z[j] for j in range(k)) for i in range(k)]
        # G z ≡ 0 mod p^level holds; need G(z + p^level δ) ≡ 0 mod p^(level+1)
        r = [(-(x // pk)) % p for x in gz]
        sols = solver.solutions(r)
        budget.spend(len(sols))
        qmod = p ** min(2 * (level + 1), 2 * l)
        for d in sols:
            z2 = [a + pk * b for a, b in zip(z, d)]
            if quad(z2, qmod) == 0:
                yield from rec(z2, level + 1)

    yield from rec([0] * k, 0)


def _search(entries: list[Fraction], b: int, p: int, integral: bool, budget: _Budget) -> Iterator[Overlattice]:
    n = len(entries)

    def rec(j, remaining, cols, G, lengths):
        if j == n:
            if remaining == 0:
                X = tuple(tuple(cols[c][r] for c in range(n)) for r in range(n))
                yield Overlattice(X, tuple(tuple(r) for r in G), b, tuple(lengths))
            return
        beta = entries[j]
        options = [remaining] if j == n - 1 else range(remaining + 1)
        for l in options:
            scale = Fraction(1, p**l)
            if j == 0:
                if integral and (beta * scale * scale).denominator % p == 0:
                    continue
                budget.spend()
                col = [scale] + [Fraction(0)] * (n - 1)
                yield from rec(1, remaining - l, [col], [[beta * scale * scale]], lengths + [l])
                continue
            for z in _column_choices(G, beta, l, p, integral, budget):
                col = [sum((cols[c][r] * z[c] for c in range(j)), Fraction(0)) * scale for r in range(n)]
                col[j] = scale
                # new Gram column: (G z)/p^l and (ᵗz G z + beta)/p^(2l)
                gz = [sum(G[i][c] * z[c] for c in range(j)) * scale for i in range(j)]
                gjj = (sum(z[i] * gz[i] for i in range(j)) + beta * scale) * scale
                newG = [G[i] + [gz[i]] for i in range(j)] + [gz + [gjj]]
                yield from rec(j + 1, remaining - l, cols + [col], newG, lengths + [l])

    yield from rec(0, b, [], [], [])


def enumerate_overlattices(L: QuadLattice, b: int, limit: int = MAX_CANDIDATES) -> list[Overlattice]:
    """Every integral L' ⊇ L with [L':L] = b, once each (coordinates in L's orthogonal basis)."""
    if b < 0:
        raise ValueError("b must be >= 0")
    return list(_search(list(L.diag.entries), b, L.p, True, _Budget(limit)))


def enumerate_superlattices(L: QuadLattice, b: int, limit: int = MAX_CANDIDATES) -> list[Overlattice]:
    """Every L' ⊇ L with [L':L] = b, integral or not."""
    return list(_search(list(L.diag.entries), b, L.p, False, _Budget(limit)))


@dataclass
class CountTable:
    """#S_{(L, a±, b)} for 0 <= b <= bMax, keyed by (a, sign, b)."""

    b_max: int
    n: int
    entries: dict[tuple[int, str, int], int] = field(default_factory=dict)

    def total(self, a: int, b: int) -> int:
        """#S_{(L,a±,b)} with both signs added, as used in the coefficient formulas."""
        return sum(self.entries.get((a, s, b), 0) for s in ("plus", "minus", "odd"))

    def signed(self, a: int, b: int) -> int:
        """χ(a±)·#S_{(L,a±,b)} summed over the two signs."""
        if a % 2:
            return 0
        return self.entries.get((a, "plus", b), 0) - self.entries.get((a, "minus", b), 0)

    def row(self, b: int) -> dict[tuple[int, str], int]:
        return {(a, s): c for (a, s, bb), c in sorted(self.entries.items()) if bb == b and c}

    def row_total(self, b: int) -> int:
        return sum(self.row(b).values())

    def add(self, a: int, sign: str, b: int, k: int = 1):
        self.entries[(a, sign, b)] = self.entries.get((a, sign, b), 0) + k

    def to_json(self) -> dict:
        rows = []
        for b in range(self.b_max + 1):
            counts = [{"a": a, "sign": s, "n": c} for (a, s), c in self.row(b).items()]
            signed = [{"a": a, "value": self.signed(a, b)} for a in range(0, self.n + 1, 2) if self.signed(a, b)]
            rows.append({"b": b, "counts": counts, "signed": signed})
        return {"bMax": self.b_max, "rows": rows}

    @classmethod
    def from_json(cls, obj: dict, n: int) -> "CountTable":
        t = cls(int(obj["bMax"]), n)
        for row in obj["rows"]:
            for c in row["counts"]:
                t.add(int(c["a"]), c["sign"], int(row["b"]), int(c["n"]))
        return t

    def __eq__(self, other):
        if not isinstance(other, CountTable):
            return NotImplemented
        strip = lambda e: {k: v for k, v in e.items() if v}
        return (self.b_max, self.n, strip(self.entries)) == (other.b_max, other.n, strip(other.entries))


def classify_overlattice(ov: Overlattice, p: int):
    a, disc = residue_form(ov.gram, p)
    return classify_residue(a, disc, p)


def _count_table_uncached(L: QuadLattice, limit: int) -> CountTable:
    gk_total = sum(L.diag.exps)
    table = CountTable(gk_total // 2, L.n)
    for b in range(table.b_max + 1):
        for ov in enumerate_overlattices(L, b, limit):
            rc = classify_overlattice(ov, L.p)
            table.add(rc.a, rc.sign, b)
    return table


@lru_cache(maxsize=4096)
def _cached_table(key: str, p: int, pairs: tuple, limit: int) -> CountTable:
    return _count_table_uncached(QuadLattice.from_diag(p, pairs), limit)


def count_table(L: QuadLattice, limit: int = MAX_CANDIDATES) -> CountTable:
    """Brute-force census of integral overlattices, b = 0..⌊|GK(L)|/2⌋.

    Tables are memoized per canonical key; the counts only depend on the
    isometry class, so the search runs on the canonical diagonal form.
    """
    canon = L.canonical()
    d = canon.diag
    pairs = tuple((int(u), e) for u, e in zip(d.units, d.exps))
    t = _cached_table(L.key(), L.p, pairs, limit)
    return CountTable(t.b_max, t.n, dict(t.entries))


def tail_params(L: QuadLattice):
    """(units u_1..u_{n-2}, v1, v2, d1, d2) of the orthogonal basis; needs n0 >= n-2."""
    d = L.diag
    n = L.n
    if n < 2 or any(e != 0 for e in d.exps[: n - 2]):
        raise UnsupportedShape(f"need n >= 2 and n0 >= n-2, got exponents {d.exps}")
    return d.units[: n - 2], d.units[n - 2], d.units[n - 1], d.exps[n - 2], d.exps[n - 1]


def _param_row(p: int, n: int, us, v1, v2, d1: int, d2: int, b: int) -> dict[tuple[int, str], int]:
    uprod = Fraction(1)
    for u in us:
        uprod *= u
    counts: dict[tuple[int, str], int] = defaultdict(int)

    def sign_of(a, disc):
        return "plus" if legendre(residue((-1) ** (a // 2) * disc, p), p) == 1 else "minus"

    for l in range(b + 1):
        if d1 - 2 * l < 0:
            break  # A_11 = p^(d1-2l) v1 must be integral
        # p^(b-l) x and A_12 integral bound the number of digits
        m = min(b - l, d1 - 2 * l)
        for digits in itertools.product(range(p), repeat=m):
            x = Fraction(sum(s * p ** (m - i) for i, s in enumerate(digits, start=1)), p**m)
            a11 = Fraction(p) ** (d1 - 2 * l) * v1
            a12 = a11 * x
            a22 = a11 * x * x + Fraction(p) ** (d2 - 2 * (b - l)) * v2
            if a12.denominator % p == 0 or a22.denominator % p == 0:
                continue
            r11, r12, r22 = residue(a11, p), residue(a12, p), residue(a22, p)
            if r11 == r12 == r22 == 0:
                rank = 0
            elif (r11 * r22 - r12 * r12) % p:
                rank = 2
            else:
                rank = 1
            a = n - 2 + rank
            if a % 2:
                counts[(a, "odd")] += 1
                continue
            if a == 0:
                counts[(0, "plus")] += 1
                continue
            if rank == 0:
                disc = uprod
            elif rank == 2:
                disc = uprod * v1 * v2
            else:
                choices = [w for w in (a11, a22) if residue(w, p)]
                classes = {legendre(residue(w, p), p) for w in choices}
                if len(classes) != 1:
                    raise AssertionError("a0 square class depends on the choice of diagonal entry")
                disc = uprod * choices[0]
            counts[(a, sign_of(a, disc))] += 1
    return dict(counts)


def count_via_param(L: QuadLattice, b: int) -> dict[tuple[int, str], int]:
    """Census of the index-b row from the (l, x mod Z_p) parametrisation of a corank <= 2 form."""
    us, v1, v2, d1, d2 = tail_params(L)
    return _param_row(L.p, L.n, us, v1, v2, d1, d2, b)


def count_table_via_param(L: QuadLattice) -> CountTable:
    _, _, _, d1, d2 = tail_params(L)
    t = CountTable((d1 + d2) // 2, L.n)
    for b in range(t.b_max + 1):
        for (a, s), c in count_via_param(L, b).items():
            t.add(a, s, b, c)
    return t


def table_to_text(t: CountTable) -> str:
    lines = []
    for b in range(t.b_max + 1):
        row = ", ".join(f"#S({a}{'' if s == 'odd' else ('+' if s == 'plus' else '-')},{b})={c}" for (a, s), c in t.row(b).items())
        lines.append(row or f"b={b}: (none)")
    return "\n".join(lines)
