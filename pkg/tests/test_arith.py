from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from alephlab.arith import (
    ALL_PRIMES,
    INF,
    BranchPrimes,
    Characteristic,
    FinitePrimes,
    ResiduePrimes,
    TypeClass,
    ZERO_TYPE,
    almost_disjoint,
    almost_disjoint_family,
    almost_subset,
    char_equivalent,
    compare_types,
    finite_difference,
    finite_intersection,
    intersection_certificate,
    nth_prime,
    prime_index,
    rational_characteristic,
    squarefree_over,
    type_leq,
    valuation,
)
from alephlab.errors import UndecidableQuery, ValidationError


def test_nth_prime_small():
    assert nth_prime(0) == 2
    assert nth_prime(1) == 3
    assert nth_prime(5) == 13


def test_nth_prime_matches_sieve():
    sieve = list(sympy.primerange(2, 2000))
    assert [nth_prime(i) for i in range(len(sieve))] == sieve
    assert all(prime_index(p) == i for i, p in enumerate(sieve))


def test_valuation():
    assert valuation(Fraction(12, 5), 2) == 2
    assert valuation(Fraction(12, 5), 5) == -1
    assert valuation(7, 3) == 0


def test_finite_primes_rejects_composites():
    with pytest.raises(ValidationError):
        FinitePrimes((2, 4))


# -- characteristics


def test_char_equivalent_examples():
    zero = Characteristic()
    assert char_equivalent(Characteristic({2: 1}), zero)
    assert not char_equivalent(Characteristic({2: INF}), zero)
    assert not char_equivalent(Characteristic((), BranchPrimes("0", "1"), 1), zero)


def test_type_leq_examples():
    zero = Characteristic()
    assert type_leq(zero, Characteristic({3: INF}))
    assert not type_leq(Characteristic({2: INF}), Characteristic({2: 1}))


def test_type_leq_almost_disjoint_branch_sets():
    p1, p2 = almost_disjoint_family(2)
    cmp = compare_types(Characteristic((), p1, 1), Characteristic((), p2, 1))
    assert not cmp.holds
    assert cmp.witness["kind"] == "difference"


def _chars():
    fam = almost_disjoint_family(3)
    # branch sets and finite sets together stay inside the decidable fragment
    supports = [FinitePrimes(()), FinitePrimes((2, 3)), fam[0], fam[1], fam[2]]
    exps = st.sampled_from([0, 1, 2, INF])
    exc = st.dictionaries(st.sampled_from([2, 3, 5, 7]), exps, max_size=3)
    return st.builds(
        lambda e, s, x: Characteristic(e, s, x),
        exc,
        st.sampled_from(supports),
        st.sampled_from([1, 2, INF]),
    )


@given(_chars())
def test_type_leq_reflexive(c):
    assert type_leq(c, c)
    assert TypeClass(c) == TypeClass(c)


@given(_chars(), _chars(), _chars())
def test_type_leq_transitive(a, b, c):
    if type_leq(a, b) and type_leq(b, c):
        assert type_leq(a, c)


@given(_chars(), _chars(), _chars())
def test_char_equivalence_relation(a, b, c):
    assert char_equivalent(a, b) == char_equivalent(b, a)
    if char_equivalent(a, b) and char_equivalent(b, c):
        assert char_equivalent(a, c)


@given(_chars())
def test_zero_is_least(c):
    t = TypeClass(c)
    assert ZERO_TYPE <= t
    assert (t <= ZERO_TYPE) == (t == ZERO_TYPE)


@given(_chars(), _chars())
def test_equivalent_means_mutually_below(a, b):
    assert char_equivalent(a, b) == (type_leq(a, b) and type_leq(b, a))


# -- prime sets


def _branch_oracle(bits, period, limit):
    """Enumerate the first ``limit`` primes and decide membership by the prefix rule."""
    out = set()
    word = ""
    i = 0
    while True:
        word += bits[i] if i < len(bits) else period[(i - len(bits)) % len(period)]
        idx = int("1" + word, 2)
        if idx >= limit:
            break
        out.add(idx)
        i += 1
    primes = list(sympy.primerange(2, sympy.prime(limit) + 1))
    return {p for k, p in enumerate(primes) if k in out}


@pytest.mark.parametrize("bits,period", [("0", "1"), ("1", "0"), ("", "01"), ("110", "1")])
def test_branch_membership_brute_force(bits, period):
    s = BranchPrimes(bits, period)
    limit = 10_000
    expected = _branch_oracle(bits, period, limit)
    got = {p for p in sympy.primerange(2, sympy.prime(limit) + 1) if p in s}
    assert got == expected


def test_family_pairwise_finite():
    assert len(almost_disjoint_family(1)) == 1
    fam = almost_disjoint_family(3)
    certs = {}
    for i in range(3):
        for j in range(i + 1, 3):
            assert almost_disjoint(fam[i], fam[j])
            certs[i, j] = intersection_certificate(fam[i], fam[j])
            assert all(p in fam[i] and p in fam[j] for p in certs[i, j])
    # sets 1 and 2 share the prefix "1", whose prime is p_3 = 7
    assert certs[0, 1].primes == ()
    assert certs[1, 2].primes == (7,)


def test_family_intersection_against_enumeration():
    fam = almost_disjoint_family(4)
    for i in range(4):
        for j in range(i + 1, 4):
            listed = set(finite_intersection(fam[i], fam[j]))
            # the shared prefixes are short, so 12 terms of each set cover them
            a = set(fam[i].take(12))
            b = set(fam[j].take(12))
            assert a & b == listed


def test_residue_sets():
    a, b = ResiduePrimes(4, 1), ResiduePrimes(4, 3)
    assert almost_disjoint(a, b)
    assert not almost_subset(a, b)
    assert almost_subset(a, ALL_PRIMES)
    assert finite_difference(FinitePrimes((2, 5, 7)), a) == (2, 7)


def test_undecidable_is_raised():
    with pytest.raises(UndecidableQuery):
        ALL_PRIMES.elements()


def test_squarefree_over():
    assert squarefree_over(6, FinitePrimes((2, 3)))[0]
    ok, p, _ = squarefree_over(4, FinitePrimes((2,)))
    assert not ok and p == 2
    ok, p, _ = squarefree_over(3, FinitePrimes((2,)))
    assert not ok and p == 3


def test_rational_characteristic():
    c = rational_characteristic(Fraction(4, 3), FinitePrimes((3,)))
    assert c[2] == 2
    assert c[3] == 0
    assert c[5] == 0
