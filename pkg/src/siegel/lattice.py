"""Quadratic lattices over Z_p given by half-integral Gram matrices.

For odd p every such lattice has an orthogonal basis, and almost every
invariant used elsewhere (Gross-Keating invariant, determinant data,
residue-form type) is read off that diagonal form.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .arith import (
    PrimeCtx,
    canonical_unit,
    format_rational,
    hilbert_pi,
    hilbert_symbol,
    is_p_integral,
    legendre,
    ord_p,
    parse_rational,
    residue,
    unit_part,
)
from .errors import DegenerateForm, DyadicPrime, NotAUnit, NotHalfIntegral

Matrix = tuple[tuple[Fraction, ...], ...]


def _freeze(rows) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(m):
    return [list(col) for col in zip(*m)]


def matmul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def congruent(b, u):
    """ᵗU·B·U."""
    return matmul(matmul(transpose(u), b), u)


def det(m) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    a = [list(map(Fraction, row)) for row in m]
    n = len(a)
    d = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            d = -d
        d *= a[k][k]
        for i in range(k + 1, n):
            c = a[i][k] / a[k][k]
            if c:
                for j in range(k, n):
                    a[i][j] -= c * a[k][j]
    return d


@dataclass(frozen=True)
class DiagForm:
    units: tuple[Fraction, ...]
    exps: tuple[int, ...]
    basis_change: Matrix
    p: int

    @property
    def entries(self) -> tuple[Fraction, ...]:
        return tuple(u * Fraction(self.p) ** e for u, e in zip(self.units, self.exps))


@dataclass(frozen=True)
class GKData:
    gk: tuple[int, ...]
    total: int
    n0: int

    @classmethod
    def from_exps(cls, exps: Sequence[int]) -> "GKData":
        gk = tuple(sorted(exps))
        return cls(gk, sum(gk), sum(1 for a in gk if a == 0))


@dataclass(frozen=True)
class BInvariants:
    n: int
    DB: Fraction
    eB: int
    xiB: Optional[int]
    etaB: Optional[int]
    zetaB: int
    gk: GKData

    @property
    def ord_disc(self) -> int:
        """ord of the discriminant ideal of Q_p(sqrt D_B) (n even only)."""
        return 0 if self.xiB != 0 else 1


@dataclass(frozen=True)
class ResidueClass:
    a: int
    sign: str  # "plus", "minus" or "odd"
    chi: int


class QuadLattice:
    """A quadratic Z_p-lattice with Gram matrix ``gram`` (q(x) = ᵗx·B·x)."""

    def __init__(self, p: int | PrimeCtx, gram):
        self.ctx = p if isinstance(p, PrimeCtx) else PrimeCtx(p)
        self.gram: Matrix = _freeze(gram)
        n = len(self.gram)
        if n == 0 or any(len(row) != n for row in self.gram):
            raise ValueError("Gram matrix must be square and nonempty")
        for i in range(n):
            for j in range(n):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError("Gram matrix must be symmetric")
                if not is_p_integral(self.gram[i][j], self.ctx.p):
                    raise NotHalfIntegral(
                        f"entry ({i},{j}) = {self.gram[i][j]} is not {self.ctx.p}-integral"
                    )
        if det(self.gram) == 0:
            raise DegenerateForm("det B = 0")
        self._lock = threading.Lock()
        self._diag: Optional[DiagForm] = None

    @classmethod
    def from_diag(cls, p: int, pairs: Sequence[tuple]) -> "QuadLattice":
        """Build diag(u_i p^{d_i}) from ``(unit, exponent)`` pairs."""
        entries = []
        for u, d in pairs:
            u = parse_rational(u)
            if u == 0 or ord_p(u, p) != 0:
                raise NotAUnit(f"{u} is not a {p}-adic unit")
            entries.append(u * Fraction(p) ** int(d))
        n = len(entries)
        return cls(p, [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def n(self) -> int:
        return len(self.gram)

    def __eq__(self, other):
        return isinstance(other, QuadLattice) and (self.p, self.gram) == (other.p, other.gram)

    def __hash__(self):
        return hash((self.p, self.gram))

    def __repr__(self):
        return f"QuadLattice(p={self.p}, gram={[[format_rational(x) for x in r] for r in self.gram]})"

    @property
    def diag(self) -> DiagForm:
        if self._diag is None:
            with self._lock:
                if self._diag is None:
                    self._diag = diagonalize(self)
        return self._diag

    def is_diagonal(self) -> bool:
        return all(self.gram[i][j] == 0 for i in range(self.n) for j in range(self.n) if i != j)

    def _jordan_units(self) -> list[tuple[int, int]]:
        """(exponent, unit) pairs with every Jordan block normalized to diag(1, ..., 1, c).

        For odd p a block p^e·(unimodular of rank m) is determined up to
        isometry by m and the square class c of its determinant.
        """
        d = self.diag
        out = []
        for e in sorted(set(d.exps)):
            block = [u for u, x in zip(d.units, d.exps) if x == e]
            prod = Fraction(1)
            for u in block:
                prod *= u
            out += [(e, 1)] * (len(block) - 1) + [(e, canonical_unit(prod, self.p))]
        return out

    def canonical(self) -> "QuadLattice":
        """The isometric diagonal lattice with normalized Jordan blocks."""
        return QuadLattice.from_diag(self.p, [(u, e) for e, u in self._jordan_units()])

    def key(self) -> str:
        """Isometry-class key: p, sorted exponents, and the normalized square-class bits."""
        pairs = self._jordan_units()
        exps = ",".join(str(e) for e, _ in pairs)
        bits = "".join("0" if u == 1 else "1" for _, u in pairs)
        return f"p{self.p}|{exps}|{bits}"

    def to_json(self) -> dict:
        if self.is_diagonal():
            d = self.diag
            pairs = sorted(zip(d.exps, d.units))
            return {"p": self.p, "diag": [{"unit": format_rational(u), "ord": e} for e, u in pairs]}
        return {"p": self.p, "gram": [[format_rational(x) for x in row] for row in self.gram]}

    @classmethod
    def from_json(cls, obj: dict) -> "QuadLattice":
        p = int(obj["p"])
        if "diag" in obj:
            return cls.from_diag(p, [(e["unit"], int(e["ord"])) for e in obj["diag"]])
        if "gram" in obj:
            return cls(p, [[parse_rational(x) for x in row] for row in obj["gram"]])
        raise ValueError("lattice JSON needs a 'diag' or 'gram' field")


def diagonalize(L: QuadLattice) -> DiagForm:
    """Orthogonal basis of L over Z_p, exponents sorted ascending.

    Pivot on an entry of minimal valuation. When the minimum sits only off
    the diagonal at (i, j), replace e_i by e_i + e_j first; since 2 is a unit
    the new diagonal entry then has that minimal valuation.
    """
    p = L.p
    if p == 2:
        raise DyadicPrime("p = 2 is not supported")
    n = L.n
    m = [list(row) for row in L.gram]
    u = identity(n)

    def swap(i, j):
        if i == j:
            return
        m[i], m[j] = m[j], m[i]
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in u:
            row[i], row[j] = row[j], row[i]

    def add_to(i, j, c):
        # e_i <- e_i + c e_j
        for row in m:
            row[i] += c * row[j]
        for col in range(n):
            m[i][col] += c * m[j][col]
        for row in u:
            row[i] += c * row[j]

    for k in range(n):
        best = None
        for i in range(k, n):
            for j in range(i, n):
                if m[i][j] != 0:
                    v = ord_p(m[i][j], p)
                    # prefer diagonal pivots at equal valuation
                    cand = (v, i != j, i, j)
                    if best is None or cand < best:
                        best = cand
        if best is None:
            raise DegenerateForm("det B = 0")
        _, off, i, j = best
        if off:
            add_to(i, j, Fraction(1))
        swap(k, i)
        for col in range(k + 1, n):
            if m[k][col] != 0:
                add_to(col, k, -m[k][col] / m[k][k])

    entries = [m[i][i] for i in range(n)]
    exps = [ord_p(x, p) for x in entries]
    order = sorted(range(n), key=lambda i: exps[i])
    units = tuple(unit_part(entries[i], p) for i in order)
    sorted_exps = tuple(exps[i] for i in order)
    basis = tuple(tuple(u[r][i] for i in order) for r in range(n))
    return DiagForm(units, sorted_exps, basis, p)


def gk_invariant(L: QuadLattice) -> GKData:
    """GK(L) for odd p: the sorted valuations of any orthogonal basis."""
    return GKData.from_exps(L.diag.exps)


def clifford_eta(units: Sequence[Fraction], exps: Sequence[int], p: int) -> int:
    """Clifford invariant of an odd-rank diagonal form diag(u_i p^{d_i}).

    eta = h(B) * (det B, (-1)^{(n-1)/2} det B), with h the Hasse invariant
    prod_{i<=j} (b_i, b_j); the (-1,-1) factor is trivial for odd p.
    """
    n = len(units)
    b = [u * Fraction(p) ** e for u, e in zip(units, exps)]
    h = 1
    for i in range(n):
        for j in range(i, n):
            h *= hilbert_symbol(b[i], b[j], p)
    d = Fraction(1)
    for x in b:
        d *= x
    sgn = -1 if ((n - 1) // 2) % 2 else 1
    return h * hilbert_symbol(d, sgn * d, p)


def b_invariants(L: QuadLattice) -> BInvariants:
    p, n = L.p, L.n
    d = L.diag
    gk = GKData.from_exps(d.exps)
    DB = Fraction(-4) ** (n // 2) * det(L.gram)
    ordD = ord_p(DB, p)
    if n % 2 == 0:
        xi = hilbert_pi(unit_part(DB, p), p) if ordD % 2 == 0 else 0
        eB = ordD - (0 if xi != 0 else 1)
        inv = BInvariants(n, DB, eB, xi, None, 1, gk)
        expected_total = eB if xi != 0 else eB + 1
    else:
        eta = clifford_eta(d.units, d.exps, p)
        inv = BInvariants(n, DB, ordD, None, eta, eta, gk)
        expected_total = ordD
    if gk.total != expected_total:
        raise RuntimeError(f"|GK| = {gk.total} disagrees with determinant data ({expected_total})")
    return inv


def residue_form(rows, p: int) -> tuple[int, int]:
    """Diagonalize a p-integral symmetric matrix mod p.

    Returns (a, disc) where a is the rank of the reduction and disc is the
    product of the nonzero pivots (1 when a = 0).
    """
    m = [[residue(x, p) for x in row] for row in rows]
    n = len(m)
    pivots = []
    active = list(range(n))
    while active:
        k = next((i for i in active if m[i][i] % p), None)
        if k is None:
            pair = next(((i, j) for i in active for j in active if i < j and m[i][j] % p), None)
            if pair is None:
                break
            i, j = pair
            # e_i <- e_i + e_j makes the (i,i) entry 2*m[i][j] != 0
            for r in range(n):
                m[r][i] = (m[r][i] + m[r][j]) % p
            for c in range(n):
                m[i][c] = (m[i][c] + m[j][c]) % p
            k = i
        piv = m[k][k]
        inv = pow(piv, -1, p)
        pivots.append(piv)
        active.remove(k)
        for c in active:
            f = m[k][c] * inv % p
            if f:
                for r in range(n):
                    m[r][c] = (m[r][c] - f * m[r][k]) % p
                for r in range(n):
                    m[c][r] = (m[c][r] - f * m[k][r]) % p
    disc = 1
    for x in pivots:
        disc = disc * x % p
    return len(pivots), disc


def classify_residue(a: int, disc: int, p: int) -> ResidueClass:
    if a % 2:
        return ResidueClass(a, "odd", 0)
    if a == 0:
        return ResidueClass(0, "plus", 1)
    split = legendre((-1) ** (a // 2) * disc, p) == 1
    return ResidueClass(a, "plus" if split else "minus", 1 if split else -1)


def residue_classify(L: QuadLattice) -> ResidueClass:
    a, disc = residue_form(L.gram, L.p)
    return classify_residue(a, disc, L.p)
