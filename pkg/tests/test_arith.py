from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from siegel.arith import (
    PadicScalar,
    PrimeCtx,
    canonical_unit,
    delta,
    format_rational,
    hilbert_pi,
    hilbert_symbol,
    is_prime,
    is_unit_square,
    least_nonresidue,
    legendre,
    ord_p,
    parse_rational,
    residue,
    unit_part,
)
from siegel.errors import DyadicPrime, NotAUnit, ZeroValuation

PRIMES = [3, 5, 7, 11, 13]
primes = st.sampled_from(PRIMES)
nonzero = st.fractions(max_denominator=10**4).filter(lambda x: x != 0)


def squares_mod(p):
    return {x * x % p for x in range(1, p)}


def test_prime_ctx_rejects_two_and_composites():
    with pytest.raises(ValueError):
        PrimeCtx(2)
    with pytest.raises(ValueError):
        PrimeCtx(9)
    assert PrimeCtx(7).f == 7


def test_dyadic_prime_is_a_value_error():
    assert issubclass(DyadicPrime, ValueError)


def test_is_prime_small_range():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@pytest.mark.parametrize("p", PRIMES + [17, 19, 23, 29, 31])
def test_legendre_matches_square_table(p):
    sq = squares_mod(p)
    for a in range(1, p):
        assert legendre(a, p) == (1 if a in sq else -1)
    assert legendre(0, p) == 0


@pytest.mark.parametrize("p", PRIMES)
def test_least_nonresidue_is_least(p):
    r = least_nonresidue(p)
    sq = squares_mod(p)
    assert r not in sq and all(x in sq for x in range(1, r))


def test_ord_and_unit_part():
    assert ord_p(Fraction(18), 3) == 2
    assert ord_p(Fraction(2, 27), 3) == -3
    assert unit_part(Fraction(18), 3) == 2
    with pytest.raises(ZeroValuation):
        ord_p(Fraction(0), 3)


@given(nonzero, nonzero, primes)
def test_ord_is_a_valuation(x, y, p):
    assert ord_p(x * y, p) == ord_p(x, p) + ord_p(y, p)
    if x + y != 0:
        assert ord_p(x + y, p) >= min(ord_p(x, p), ord_p(y, p))


def test_residue_of_fraction():
    # 1/2 mod 5 is 3
    assert residue(Fraction(1, 2), 5) == 3


def test_unit_square_requires_unit():
    with pytest.raises(NotAUnit):
        is_unit_square(Fraction(3), 3)
    assert is_unit_square(Fraction(4), 5)
    assert not is_unit_square(Fraction(2), 5)


def test_hilbert_pi_units_and_nonunits():
    assert hilbert_pi(Fraction(-1), 5) == 1
    assert hilbert_pi(Fraction(-1), 3) == -1
    assert hilbert_pi(Fraction(2), 3) == -1
    with pytest.raises(NotAUnit):
        hilbert_pi(Fraction(3), 3)


@given(nonzero, nonzero, nonzero, primes)
def test_hilbert_symbol_is_bilinear_and_symmetric(a, b, c, p):
    assert hilbert_symbol(a, b, p) == hilbert_symbol(b, a, p)
    assert hilbert_symbol(a * c, b, p) == hilbert_symbol(a, b, p) * hilbert_symbol(c, b, p)


@given(nonzero, primes)
def test_hilbert_symbol_standard_identities(a, p):
    assert hilbert_symbol(a, -a, p) == 1
    if a != 1:
        assert hilbert_symbol(a, 1 - a, p) == 1
    assert hilbert_symbol(a, a * a, p) == 1


@pytest.mark.parametrize("p", [3, 5, 7])
def test_hilbert_symbol_against_conic_search(p):
    """(a, b) = 1 iff z^2 = a x^2 + b y^2 has a primitive p-adic solution.

    For a, b of valuation at most one, a primitive solution mod p^3 with x or
    y a unit lifts by Hensel's lemma (and x, y both divisible by p would force
    z to be divisible by p as well), so the search below decides solvability.
    """
    r = least_nonresidue(p)
    m = p**3
    is_square = {z * z % m for z in range(m)}
    for a in (1, r, p, r * p):
        for b in (1, r, p, r * p):
            solvable = any(
                (a * x * x + b * y * y) % m in is_square
                for x in range(m)
                for y in range(m)
                if x % p or y % p
            )
            assert hilbert_symbol(Fraction(a), Fraction(b), p) == (1 if solvable else -1), (a, b)


def test_delta():
    assert [delta(m) for m in range(5)] == [1, 0, 1, 0, 1]


@pytest.mark.parametrize("p", PRIMES)
def test_canonical_unit_preserves_square_class(p):
    r = least_nonresidue(p)
    for u in range(1, p):
        c = canonical_unit(Fraction(u), p)
        assert c in (1, r)
        assert legendre(u * c, p) == 1


def test_rational_round_trip():
    for s in ["3", "-7/4", "0"]:
        assert format_rational(parse_rational(s)) == s


def test_padic_scalar():
    ctx = PrimeCtx(3)
    x = PadicScalar(Fraction(18), ctx)
    assert x.ord() == 2 and x.unit_part() == 2 and x.abs() == Fraction(1, 9)
    with pytest.raises(NotAUnit):
        x.unit_square_class()
    two = PadicScalar(Fraction(2), ctx)
    assert two.unit_square_class() == "nonsquare" and two.hilbert_pi() == -1
    assert (two * two).unit_square_class() == "square"
    assert not x.is_unit() and two.is_unit()
