from fractions import Fraction

import pytest

from siegel.arith import least_nonresidue
from siegel.closed import (
    TailParams,
    closed_coefficients,
    closed_counts,
    norm_solution_count,
    norm_solution_count_brute,
    signed_closed_counts,
    xi_eta_from_tail,
)
from siegel.errors import HypothesisViolated, NotAUnit
from siegel.halfpow import HalfPowerValue
from siegel.lattice import QuadLattice, b_invariants
from siegel.overlat import count_table
from siegel.series import coefficients


def lattice_for(t_args):
    p, us, v1, v2, d1, d2 = t_args
    return QuadLattice.from_diag(p, [(u, 0) for u in us] + [(v1, d1), (v2, d2)])


def grid(primes=(3, 5), d_max=4):
    for p in primes:
        r = least_nonresidue(p)
        for n in (2, 3, 4):
            for d1 in range(d_max + 1):
                for d2 in range(d1, d_max + 1):
                    for u in ((1,) if n == 2 else (1, r)):
                        for v1 in (1, r):
                            for v2 in (1, r):
                                us = [1] * (n - 3) + [u] if n >= 3 else []
                                yield (p, us, v1, v2, d1, d2)


def test_tail_params_validation():
    with pytest.raises(NotAUnit):
        TailParams.from_units(3, [], 3, 1, 1, 2)
    with pytest.raises(ValueError):
        TailParams.from_units(3, [], 1, 1, 2, 1)


def test_spec_examples():
    t = TailParams.from_units(3, [], 1, 1, 1, 2)
    assert closed_counts(t, 1) == (0, 1, 0)
    assert closed_counts(t, 0) == (1, 0, 0)
    assert signed_closed_counts(t, 0) == {0: 1}
    assert xi_eta_from_tail(t) == (0, 2)
    f12 = HalfPowerValue.power(3, 1)
    assert closed_coefficients(t) == [1, f12, 1]
    t3 = TailParams.from_units(3, [1], 1, 1, 1, 2)
    assert signed_closed_counts(t3, 1) == {2: -1}
    assert xi_eta_from_tail(t3) == (-1, 3)
    # -v1 v2 = 1 is a square mod 5 when v2 = -1; (d1, d2) = (2, 4), b = 2
    t5 = TailParams.from_units(5, [], 1, 4, 2, 4)
    assert t5.split_tail()
    assert closed_counts(t5, 2)[0] == 2


def test_claimed_n0_is_checked():
    t = TailParams.from_units(3, [], 1, 1, 1, 2)
    with pytest.raises(HypothesisViolated):
        closed_coefficients(t, n0=1)
    assert closed_coefficients(t, n0=0) == closed_coefficients(t)


@pytest.mark.parametrize("f", [3, 5, 7, 11, 13, 17, 19, 23, 29, 31])
def test_norm_count_against_exhaustive_search(f):
    r = least_nonresidue(f)
    for U in (1, r, f - 1, f - r):
        for V in (1, r, f - 1, f - r):
            assert norm_solution_count(U, V, f) == norm_solution_count_brute(U, V, f)
    for U in range(1, f):
        for V in range(1, f):
            assert norm_solution_count(U, V, f) == norm_solution_count_brute(U, V, f)


def test_norm_count_examples():
    assert norm_solution_count(1, 1, 5) == 1
    assert norm_solution_count(2, 1, 5) == 3
    assert norm_solution_count(1, 2, 5) == 2
    with pytest.raises(ValueError):
        norm_solution_count(0, 1, 5)


def test_closed_counts_match_enumeration():
    for args in grid():
        t = TailParams.from_units(*args)
        L = lattice_for(args)
        table = count_table(L)
        n = len(args[1]) + 2
        for b in range((args[4] + args[5]) // 2 + 1):
            brute = (table.total(n - 2, b), table.total(n - 1, b), table.total(n, b))
            assert closed_counts(t, b) == brute, (args, b)
            for a, v in signed_closed_counts(t, b).items():
                assert table.signed(a, b) == v, (args, b, a)


def test_xi_eta_match_determinant_invariants():
    for args in grid(primes=(3, 5, 7), d_max=5):
        t = TailParams.from_units(*args)
        inv = b_invariants(lattice_for(args))
        expected = inv.xiB if t.n % 2 == 0 else inv.etaB
        assert xi_eta_from_tail(t) == (expected, inv.eB), args


def test_closed_coefficients_match_count_route():
    for args in grid():
        t = TailParams.from_units(*args)
        assert closed_coefficients(t) == coefficients(lattice_for(args)), args


def test_closed_coefficients_functional_equation():
    for args in grid(primes=(3, 5, 7, 11), d_max=6):
        t = TailParams.from_units(*args)
        c = closed_coefficients(t)
        inv, _ = xi_eta_from_tail(t)
        zeta = inv if t.n % 2 else 1
        assert all(c[i] == c[-1 - i] * zeta for i in range(len(c))), args


def test_split_tail_predicate():
    assert TailParams.from_units(5, [], 1, 4, 1, 3).split_tail()
    assert not TailParams.from_units(5, [], 1, 2, 1, 3).split_tail()
    assert not TailParams.from_units(5, [], 1, 4, 1, 2).split_tail()
    assert TailParams.from_units(5, [2], Fraction(1), Fraction(4), 1, 3).n0 == 1
