import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from siegel.errors import GuardrailExceeded, UnsupportedShape
from siegel.lattice import QuadLattice, det, gk_invariant, residue_classify
from siegel.overlat import (
    CountTable,
    count_table,
    count_table_via_param,
    count_via_param,
    enumerate_overlattices,
    enumerate_superlattices,
    table_to_text,
)


def hecke_count(p, n, b):
    """Coefficient of X^b in prod_{i<n} 1/(1 - p^i X): index-p^b sublattices of Z_p^n."""
    coeffs = [1] + [0] * b
    for i in range(n):
        for k in range(1, b + 1):
            coeffs[k] += p**i * coeffs[k - 1]
    return coeffs[b]


def subgroups_by_brute_force(entries, p, b):
    """All subgroups of order p^b in p^{-b}L/L, and which of them are integral.

    Elements are integer vectors v mod p^b standing for v / p^b.
    """
    n = len(entries)
    m = p**b
    elements = list(itertools.product(range(m), repeat=n))

    def span(gens):
        s = {tuple([0] * n)}
        for g in gens:
            new = set()
            for x in s:
                for k in range(m):
                    new.add(tuple((xi + k * gi) % m for xi, gi in zip(x, g)))
            s = new
        return frozenset(s)

    found = set()
    for gens in itertools.combinations_with_replacement(elements, n):
        S = span(gens)
        if len(S) == m:
            found.add(S)

    def integral(S):
        return all(
            (sum(Fraction(d) * xi * yi for d, xi, yi in zip(entries, x, y)) / m**2).denominator % p
            for x in S
            for y in S
        )

    return found, {S for S in found if integral(S)}


def subgroup_of(ov, p, b):
    m = p**b
    n = len(ov.hnf)
    cols = [[ov.hnf[i][j] * m for i in range(n)] for j in range(n)]
    gens = [tuple(int(c) % m for c in col) for col in cols]
    s = {tuple([0] * n)}
    for g in gens:
        s = {tuple((xi + k * gi) % m for xi, gi in zip(x, g)) for x in s for k in range(m)}
    return frozenset(s)


def test_worked_example_rows():
    L = QuadLattice.from_diag(3, [(1, 1), (1, 2)])
    assert [ov.gram for ov in enumerate_overlattices(L, 0)] == [L.gram]
    (only,) = enumerate_overlattices(L, 1)
    assert only.gram == ((3, 0), (0, 1))
    assert enumerate_overlattices(L, 2) == []
    t = count_table(L)
    assert t.row(0) == {(0, "plus"): 1}
    assert t.row(1) == {(1, "odd"): 1}
    assert t.to_json() == {
        "bMax": 1,
        "rows": [
            {"b": 0, "counts": [{"a": 0, "sign": "plus", "n": 1}], "signed": [{"a": 0, "value": 1}]},
            {"b": 1, "counts": [{"a": 1, "sign": "odd", "n": 1}], "signed": []},
        ],
    }


@pytest.mark.parametrize("p", [3, 5, 7])
def test_unimodular_plane_has_p_plus_one_index_one_superlattices(p):
    assert len(enumerate_superlattices(QuadLattice.from_diag(p, [(1, 0), (1, 0)]), 1)) == p + 1


@pytest.mark.parametrize("p,n,b", [(3, 2, 1), (3, 2, 2), (3, 2, 3), (5, 2, 2), (3, 3, 1), (3, 3, 2), (5, 3, 1), (3, 4, 1)])
def test_raw_census_matches_hecke_count(p, n, b):
    L = QuadLattice.from_diag(p, [(1, 0)] * n)
    assert len(enumerate_superlattices(L, b)) == hecke_count(p, n, b)


@pytest.mark.parametrize(
    "p,pairs,b",
    [
        (3, [(1, 1), (1, 2)], 1),
        (3, [(1, 2), (2, 2)], 2),
        (3, [(1, 1), (1, 3)], 2),
        (5, [(1, 2), (2, 2)], 1),
        (3, [(1, 0), (1, 2), (2, 2)], 1),
    ],
)
def test_enumeration_matches_subgroup_brute_force(p, pairs, b):
    L = QuadLattice.from_diag(p, pairs)
    entries = list(L.diag.entries)
    every, integral = subgroups_by_brute_force(entries, p, b)
    raw = [subgroup_of(ov, p, b) for ov in enumerate_superlattices(L, b)]
    assert len(raw) == len(set(raw)), "duplicate coset representatives"
    assert set(raw) == every
    good = [subgroup_of(ov, p, b) for ov in enumerate_overlattices(L, b)]
    assert len(good) == len(set(good)) and set(good) == integral


@pytest.mark.parametrize("pairs", [[(1, 1), (1, 3)], [(1, 0), (2, 2), (1, 3)], [(2, 1), (1, 2), (1, 2)]])
def test_integral_filter_equals_filtered_raw_enumeration(pairs):
    L = QuadLattice.from_diag(3, pairs)
    for b in range(3):
        raw = [ov for ov in enumerate_superlattices(L, b) if all(x.denominator % 3 for r in ov.gram for x in r)]
        assert sorted(ov.hnf for ov in raw) == sorted(ov.hnf for ov in enumerate_overlattices(L, b))


@st.composite
def small_lattices(draw):
    p = draw(st.sampled_from([3, 5]))
    n = draw(st.integers(1, 3))
    exps = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    units = draw(st.lists(st.integers(1, p - 1), min_size=n, max_size=n))
    return QuadLattice.from_diag(p, list(zip(units, exps)))


@settings(max_examples=40)
@given(small_lattices())
def test_overlattice_bookkeeping(L):
    gk = gk_invariant(L)
    dL = det(L.gram)
    for b in range(gk.total // 2 + 2):
        ovs = enumerate_overlattices(L, b)
        if b > gk.total // 2:
            assert ovs == []
        for ov in ovs:
            M = QuadLattice(L.p, ov.gram)
            assert sum(ov.lengths) == b
            assert det(M.gram) * L.p ** (2 * b) == dL
            g2 = gk_invariant(M)
            assert g2.total == gk.total - 2 * b
            assert tuple(gk.gk) >= tuple(g2.gk)


@settings(max_examples=40)
@given(small_lattices())
def test_b_zero_row_is_the_lattice_itself(L):
    t = count_table(L)
    rc = residue_classify(L)
    assert t.row(0) == {(rc.a, rc.sign): 1}


@pytest.mark.parametrize("p", [3, 5, 7])
def test_parametrized_census_matches_enumeration(p):
    for n in (2, 3, 4):
        for d1 in range(4):
            for d2 in range(d1, 5):
                for v1, v2 in [(1, 1), (1, 2), (2, 2)] if p != 7 else [(1, 1), (1, 3), (3, 3)]:
                    L = QuadLattice.from_diag(p, [(1, 0)] * (n - 2) + [(v1, d1), (v2, d2)])
                    assert count_table_via_param(L) == count_table(L), (n, d1, d2, v1, v2)


def test_param_shape_errors():
    with pytest.raises(UnsupportedShape):
        count_via_param(QuadLattice.from_diag(3, [(1, 1), (1, 1), (1, 1)]), 1)


def test_guardrail():
    L = QuadLattice.from_diag(3, [(1, 0)] * 3)
    with pytest.raises(GuardrailExceeded):
        enumerate_superlattices(L, 3, limit=10)


def test_count_table_json_round_trip():
    t = count_table(QuadLattice.from_diag(5, [(1, 0), (1, 2), (2, 3)]))
    assert CountTable.from_json(t.to_json(), 3) == t
    assert "#S(" in table_to_text(t)
