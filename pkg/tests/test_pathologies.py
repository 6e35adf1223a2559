import math
import random
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alephlab.arith import first_primes
from alephlab.errors import ValidationError
from alephlab.levels import LevelElement
from alephlab.pathologies import (
    MixedBounds,
    bezout_cofactors,
    bezout_limit_element,
    brute_force_member,
    build_bezout_tree,
    case_one_projection,
    check_gstar,
    check_mixed,
    gstar_level,
    mixed_system_build,
    pontryagin_make,
    product_group_check,
    verify_bezout,
)

F = Fraction


# Bezout tree

def test_bezout_depth_zero():
    t = build_bezout_tree((2, 3, 5), 0)
    r = t.nodes[()]
    assert (r.a, r.p, r.Q) == (1, 2, frozenset())


def test_bezout_depth_one():
    t = build_bezout_tree((2, 3, 5), 1)
    assert bezout_cofactors(3, 2) == (1, -1)
    assert t.nodes[(0,)].a == 3 and t.nodes[(1,)].a == -2
    assert t.nodes[(0,)].p == 2 and t.nodes[(1,)].p == 3
    assert verify_bezout(t)


@pytest.mark.parametrize("depth", range(0, 9))
def test_bezout_verifies(depth):
    t = build_bezout_tree(first_primes(depth + 4), depth)
    assert verify_bezout(t)
    assert bezout_limit_element(t).ok


def test_bezout_needs_primes():
    with pytest.raises(ValidationError):
        build_bezout_tree((2, 3), 2)
    with pytest.raises(ValidationError):
        build_bezout_tree((2, 4, 5), 1)


def test_mutated_a_breaks_sum():
    t = build_bezout_tree(first_primes(6), 3)
    v = (0, 1)
    t.nodes[v] = replace(t.nodes[v], a=t.nodes[v].a + 1)
    bad = verify_bezout(t)
    assert not bad and bad.clause == "f.v" and bad.node == (0,)


def test_mutated_Q_breaks_divisibility():
    t = build_bezout_tree(first_primes(6), 3)
    v = (1, 0, 1)
    extra = next(p for p in first_primes(20) if t.nodes[v].a % p)
    t.nodes[v] = replace(t.nodes[v], Q=t.nodes[v].Q | {extra})
    bad = verify_bezout(t)
    assert not bad and bad.clause == "d" and bad.node == v


def test_bezout_limit_small_levels():
    t = build_bezout_tree((2, 3, 5), 1)
    rep = bezout_limit_element(t)
    assert rep.elements[0] == LevelElement.of(0, {(): 1})
    assert rep.elements[1] == LevelElement.of(1, {(0,): 3, (1,): -2})
    assert rep.coherence == [True] and rep.divisibility == [True, True]


@settings(max_examples=25)
@given(st.permutations(first_primes(9)), st.integers(0, 6))
def test_bezout_any_prime_order(primes, depth):
    # a badly ordered list can run out of primes dividing no a; that is reported, not hidden
    try:
        t = build_bezout_tree(primes, depth)
    except ValidationError as e:
        assert "exhausted" in str(e)
        return
    assert verify_bezout(t)
    for n in range(depth + 1):
        assert sum(t.nodes[v].a for v in t.level(n)) == 1


# rank-2 group

def test_pontryagin_generators_and_x0():
    g = pontryagin_make((2, 3, 5, 7), seed=3)
    for p in g.primes:
        y = g.generator(p)
        assert g.contains(y)
        assert not g.divisible_by((F(1), F(0)), p)
        assert g.divisible_by((F(1), F(g.k[p])), p)


def test_pontryagin_bad_coefficients():
    with pytest.raises(ValidationError):
        pontryagin_make((5, 7), {5: 0, 7: 1})
    with pytest.raises(ValidationError):
        pontryagin_make((5, 5))


def _random_vec(rng, primes):
    den = 1
    for p in primes + [4, 9, 11]:
        if rng.random() < 0.35:
            den *= p
    return (F(rng.randint(-40, 40), den), F(rng.randint(-40, 40), den))


def test_pontryagin_matches_brute_force():
    rng = random.Random(7)
    primes = [2, 3, 5, 7]
    hits = 0
    for i in range(300):
        g = pontryagin_make(primes, seed=i)
        z = _random_vec(rng, primes)
        assert g.contains(z) == brute_force_member(g, z)
        hits += g.contains(z)
        p = rng.choice(primes)
        zz = (z[0] / p, z[1] / p)
        assert g.divisible_by(z, p) == brute_force_member(g, zz)
    assert 10 < hits < 290


# G*_n

def _count_cosets(g, n):
    # independent count of |G*_n / Z^2| over the grid (1/P) Z^2 mod 1
    P = math.prod(g.primes[:n])
    sub = type(g)(g.primes[:n], {p: g.k[p] for p in g.primes[:n]})
    return sum(brute_force_member(sub, (F(a, P), F(b, P))) for a in range(P) for b in range(P))


def test_gstar_zero():
    g = pontryagin_make((2, 3, 5, 7))
    fd = gstar_level(g, 0)
    assert fd.basis == [(1, 0), (0, 1)] and fd.index == 1


@pytest.mark.parametrize("n", [1, 2, 3])
def test_gstar_index_matches_count(n):
    g = pontryagin_make((2, 3, 5, 7), seed=11)
    fd = gstar_level(g, n)
    assert all(check_gstar(fd, g).values())
    assert fd.index == _count_cosets(g, n) == math.prod(g.primes[:n])


def test_gstar_chain():
    g = pontryagin_make(first_primes(5), seed=2)
    fds = [gstar_level(g, n) for n in range(5)]
    for a, b in zip(fds, fds[1:]):
        assert all(b.contains(v) for v in a.basis)
        assert not all(a.contains(v) for v in b.basis)


# mixed system

def test_mixed_minimal():
    g = pontryagin_make((2, 3, 5), seed=1)
    ms = mixed_system_build(g, MixedBounds(levels=2, summands=2, enumeration=1))
    checks = check_mixed(ms, random.Random(0), samples=5)
    assert checks and all(checks.values())


def test_mixed_default_bounds():
    g = pontryagin_make((2, 3, 5, 7), seed=4)
    ms = mixed_system_build(g)
    checks = check_mixed(ms, random.Random(1), samples=8)
    assert all(checks.values()), [k for k, v in checks.items() if not v]


def test_mixed_bad_bounds():
    g = pontryagin_make((2, 3), seed=1)
    with pytest.raises(ValidationError):
        mixed_system_build(g, MixedBounds(levels=3))
    with pytest.raises(ValidationError):
        mixed_system_build(g, MixedBounds(levels=1, summands=1))


def test_case_one_projection():
    g = pontryagin_make((2, 3, 5), seed=1)
    ms = mixed_system_build(g)
    top = ms.levels - 1
    gens = ms.generators(top)
    z = gens[-1]  # highest even coordinate survives down to level 0 only if it halves to nonzero
    got = case_one_projection(ms, z)
    assert got is not None and got["value"] != 0
    core_only = gens[0]
    assert case_one_projection(ms, core_only) is None


# products

def test_product_empty():
    assert product_group_check([])["trivial"]


def test_product_singleton_and_pair():
    g = pontryagin_make((2, 3, 5), seed=1)
    h = pontryagin_make((7, 11), seed=2)
    one = product_group_check([g], samples=10)
    assert one["factors"] == 1 and one["diagonal"][0]["strictly_increasing"]
    two = product_group_check([g, h], samples=10)
    assert all(row["finite"] for row in two["samples"])
    assert [d["indices"] for d in two["diagonal"]] == [[1, 2, 6, 30], [1, 7, 77]]
