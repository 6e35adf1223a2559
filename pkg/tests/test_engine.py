import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alephlab.arith import ALL_PRIMES, FinitePrimes, ResiduePrimes, almost_disjoint_family
from alephlab.engine import (
    LimitElement,
    NonZeroTypeCertificate,
    PromiseBroken,
    RandomPairConfig,
    bonding_laws,
    homogeneity_witness,
    limit_divisible,
    limit_divisible_levels,
    make_GA,
    make_GP,
    nice_pair_from_table,
    project_limit,
    random_nice_pair,
    validate_limit,
    validate_nice_pair,
)
from alephlab.errors import ValidationError
from alephlab.levels import LevelElement, bonding_apply
from alephlab.trees import ExplicitTree, PeriodicBranch, ZeroTail, full_tree
from alephlab.witnesses import random_limit_element, torsionless_witness

ZT = LimitElement.zerotail


def test_np1_validates(NP1):
    assert validate_nice_pair(NP1)


def test_zero_entry_rejected():
    np = nice_pair_from_table([(), (0,)], {(): 2, (0,): 3})
    res = validate_nice_pair(np)
    assert not res and res.clause == "b"


def test_duplicate_prime_rejected():
    np = nice_pair_from_table([(), (1,)], {(): 2, (1,): 2})
    res = validate_nice_pair(np)
    assert not res and res.clause == "c"


def test_np1_labels(NP1):
    lab = lambda v: NP1.label(v).elements()
    assert lab(()) == (2, 3)
    assert lab((0,)) == (2,)
    assert lab((1,)) == (2, 3)
    assert lab((2,)) == (2,)
    assert lab((1, 0)) == (2, 3)


def test_np1_level_one(NP1):
    g = NP1.build_level(1)
    assert [c.node for c in g.components()] == [(0,), (1,), (2,)]
    assert [c.allowed_primes.elements() for c in g.components()] == [(2,), (2, 3), (2,)]
    assert NP1.build_level(0).components()[0].node == ()


def test_project_limit_examples():
    assert project_limit(ZT((1,)), 1) == LevelElement.of(1, {(1,): 1})
    y = ZT((1,)) - ZT((2,))
    assert project_limit(y, 0).is_zero()
    assert project_limit(y, 1) == LevelElement.of(1, {(1,): 1, (2,): -1})


def test_limit_divisible_examples(NP1):
    assert limit_divisible(NP1, ZT((), 2), 2)
    assert limit_divisible(NP1, ZT((1,)), 3)
    levels = limit_divisible_levels(NP1, ZT((1,)), 3, 3)
    assert levels[1:] == [True, True, True]
    assert not limit_divisible(NP1, ZT((2,)), 3)


def test_homogeneity_full_branch():
    np = make_GA(full_tree(2), ZeroTail(()))
    ones = PeriodicBranch((), (1,))
    assert np.declared_branch == ones
    cert = homogeneity_witness(np, ones, 3)
    assert isinstance(cert, NonZeroTypeCertificate)
    assert cert.primes == tuple(np.prime_of((1,) * k) for k in range(3))
    y = LimitElement(((ones, Fraction(1)),))
    for k in range(1, 4):
        assert limit_divisible(np, y, np.prime_of((1,) * k))
    assert homogeneity_witness(np, ones, 0).primes == ()


def test_homogeneity_promise_broken():
    np = make_GA(ExplicitTree([(), (0,), (1,), (1, 0)]))
    res = homogeneity_witness(np, PeriodicBranch((), (1,)), 5)
    assert isinstance(res, PromiseBroken) and res.level == 2


# branch sets are sparse (the k-th element is the 2^k-th prime), so scan less
@pytest.mark.parametrize("pstar,scan", [(ResiduePrimes(4, 1), 4), (almost_disjoint_family(1)[0], 3), (ALL_PRIMES, 4)])
def test_make_GP_validates(pstar, scan):
    np = make_GP(pstar, truncation=3, scan=scan)
    res = validate_nice_pair(np, 2)
    assert res and res.checked_nodes > 1


def test_make_GP_preconditions():
    with pytest.raises(ValidationError):
        make_GP(FinitePrimes((2, 3)))


def test_make_GA_examples():
    np = make_GA(ExplicitTree([()]))
    assert np.S.nodes == ((),)
    np = make_GA(ExplicitTree([(), (0,), (0, 1)]))
    assert validate_nice_pair(np, 3)
    assert set(np.S.nodes) == {(), (1,), (1, 2)}


# -- properties


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_bonding_laws_random_engines(seed):
    rng = random.Random(seed)
    np = random_nice_pair(rng, RandomPairConfig(truncation=4))
    assert validate_nice_pair(np)
    laws = bonding_laws(np, rng=rng)
    assert all(laws.values()), [k for k, v in laws.items() if not v]


@given(st.integers(0, 10**6))
def test_project_limit_coherent(seed):
    rng = random.Random(seed)
    np = random_nice_pair(rng, RandomPairConfig(truncation=4))
    y = random_limit_element(np, rng)
    for n in range(7):
        for m in range(n + 1):
            assert bonding_apply(project_limit(y, n), n, m) == project_limit(y, m)


@given(st.integers(0, 10**6))
def test_zerotail_limit_labels_finite(seed):
    rng = random.Random(seed)
    np = random_nice_pair(rng)
    for v in np.S_nodes():
        assert np.limit_label(ZeroTail(v)).is_finite


@settings(max_examples=20)
@given(st.integers(0, 10**6))
def test_dichotomy_wellfounded_side(seed):
    rng = random.Random(seed)
    nodes = {()}
    for _ in range(rng.randint(0, 6)):
        parent = rng.choice(sorted(nodes))
        if len(parent) < 3:
            nodes.add(parent + (rng.randint(0, 2),))
    np = make_GA(ExplicitTree(nodes))
    y = random_limit_element(np, rng)
    assert validate_limit(np, y)[0]
    w = torsionless_witness(np, y)
    assert not w.hom(y).is_zero()
    assert np.label(w.node).is_finite
