import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alephlab.engine import LimitElement, np1
from alephlab.errors import ValidationError
from alephlab.pathologies import mixed_system_build, pontryagin_make
from alephlab.sinfty import (
    Code,
    DomainCoding,
    PartialPermutation,
    distance_in_Sinf,
    encode_element,
    encode_vectors,
    engine_coordinates,
    mixed_coordinates,
    pair,
    restriction_chains,
    unpair,
    unzigzag,
    vector_rank,
    vector_unrank,
    verify_embedding,
    zigzag,
)
from alephlab.trees import ExplicitTree, prefix_tree_of_permutations, tree_distance
from alephlab.witnesses import random_limit_element

ZT = LimitElement.zerotail


@pytest.fixture(scope="module")
def system():
    return engine_coordinates(np1())


# coding primitives

@given(st.integers(-10**9, 10**9))
def test_zigzag_roundtrip(t):
    assert unzigzag(zigzag(t)) == t and zigzag(t) >= 0


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_pair_roundtrip(a, b):
    assert unpair(pair(a, b)) == (a, b)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=5))
def test_vector_rank_roundtrip(v):
    assert vector_unrank(vector_rank(v), len(v)) == tuple(v)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_vector_unrank_injective_prefix(dim):
    seen = {vector_unrank(i, dim) for i in range(3000)}
    assert len(seen) == 3000
    assert vector_unrank(0, dim) == (0,) * dim


def test_code_values():
    assert Code(0, 1).value() == 2 and Code(1, 2).value() == 9
    assert Code(0, 3).to_json() == 8
    assert Code(0, 200).to_json() == "2^200"


def test_decode():
    c = DomainCoding((1, 2))
    assert c.decode(8) == Code(0, 3)
    assert c.decode(27) == Code(1, 3)
    assert c.decode(5) is None  # sort 2 does not exist
    assert c.decode(6) is None and c.decode(1) is None and c.decode(0) is None
    assert c.element(c.code(1, (3, -4))) == (3, -4)


# permutations of one element

def test_zero_is_identity(system):
    p = encode_element(ZT(()) - ZT(()), system, 500)
    assert p.mapping == {} and p.restriction() == list(range(500))


def test_empty_bound(system):
    p = encode_element(ZT((1,)), system, 0)
    assert p.restriction() == [] and p.to_json() == {"bound": 0, "map": []}


def test_sort_zero_shift_only():
    coding = DomainCoding((1, 1))
    p = encode_vectors([(1,), (0,)], coding, 200)
    moved = set(p.mapping)
    assert moved and all(coding.decode(k).sort == 0 for k in moved)
    assert p(6) == 6 and p(3) == 3  # non-code and a sort-1 code
    assert p(Code(0, 1)) == Code(0, vector_rank((1,)) + 1)


def test_wrong_shift_shape():
    with pytest.raises(ValidationError):
        encode_vectors([(1, 2)], DomainCoding((1,)), 10)


def test_images_keep_their_sort(system):
    p = encode_element(7 * ZT((2, 2)), system, 10**4)
    coding = system.coding
    assert p.mapping
    for k, v in p.mapping.items():
        assert coding.normalize(v).sort == coding.decode(k).sort
    for (k, v), (k2, v2) in zip(sorted(p.mapping.items()), p.to_json()["map"]):
        assert k == k2 and (v2 == v if isinstance(v, int) else v2 == f"{v.prime}^{v.m}")


# embedding

def test_embedding_inverse_pair(system):
    y = ZT((1,)) + 2 * ZT((0, 2))
    assert verify_embedding(y, -1 * y, system, 2000).ok
    assert encode_element(y + (-1 * y), system, 2000).mapping == {}


def test_embedding_zero(system):
    z = ZT(()) - ZT(())
    assert verify_embedding(z, z, system, 2000).ok


@settings(max_examples=20)
@given(st.integers(0, 10**6))
def test_embedding_random(seed):
    np = np1()
    system = engine_coordinates(np)
    rng = random.Random(seed)
    y, z = random_limit_element(np, rng), random_limit_element(np, rng)
    rep = verify_embedding(y, z, system, 3000)
    assert rep.ok, rep.to_json()


def test_embedding_mixed():
    ms = mixed_system_build(pontryagin_make((2, 3, 5), seed=1))
    system = mixed_coordinates(ms)
    rng = random.Random(5)
    for _ in range(5):
        y = ms.random_element(ms.levels - 1, rng)
        z = ms.random_element(ms.levels - 1, rng)
        assert verify_embedding(y, z, system, 3000).ok


def test_engine_coordinates_need_finite_width():
    from alephlab.arith import almost_disjoint_family
    from alephlab.engine import make_GP

    with pytest.raises(ValidationError):
        engine_coordinates(make_GP(almost_disjoint_family(1)[0]))


# metrics

def _perm(images, bound):
    return PartialPermutation(bound, {k: v for k, v in enumerate(images) if k != v})


def test_distance_examples():
    a = _perm([0, 1, 2, 3, 4, 5], 6)
    assert distance_in_Sinf(a, a) == 0
    assert distance_in_Sinf(a, _perm([1, 0, 2, 3, 4, 5], 6)) == 1
    assert distance_in_Sinf(a, _perm([0, 1, 2, 4, 3, 5], 6)) == Fraction(1, 8)


def test_distance_needs_common_bound():
    with pytest.raises(ValidationError):
        distance_in_Sinf(_perm([0], 1), _perm([0, 1], 2))


perms = st.permutations(list(range(7)))


@settings(max_examples=150)
@given(perms, perms, perms)
def test_sinf_ultrametric(a, b, c):
    pa, pb, pc = _perm(a, 7), _perm(b, 7), _perm(c, 7)
    d = distance_in_Sinf
    assert d(pa, pc) <= max(d(pa, pb), d(pb, pc))
    assert d(pa, pb) == d(pb, pa)
    assert (d(pa, pb) == 0) == (list(a) == list(b))


def _random_tree(rng):
    nodes = {()}
    for _ in range(rng.randint(0, 7)):
        parent = rng.choice(sorted(nodes))
        if len(parent) < 4:
            nodes.add(parent + (rng.randint(0, 2),))
    return ExplicitTree(sorted(nodes))


@settings(max_examples=150)
@given(st.integers(0, 10**9))
def test_tree_ultrametric(seed):
    rng = random.Random(seed)
    s, t, u = (_random_tree(rng) for _ in range(3))
    d = lambda x, y: tree_distance(x, y, max_depth=6)  # noqa: E731
    assert d(s, u) <= max(d(s, t), d(t, u))
    assert d(s, t) == d(t, s) and d(s, s) == 0


# restriction chains and the prefix tree

def test_chains_match_prefix_tree(system):
    p = encode_element(ZT((1,)) + 3 * ZT((2, 0)), system, 64)
    fwd, inv = restriction_chains(p, 10)
    # symbolic images can be astronomically large; relabel them injectively above the bound
    fresh = {}

    def label(x):
        return x if isinstance(x, int) else fresh.setdefault(x, 64 + len(fresh))

    fwd = [tuple(label(x) for x in c) for c in fwd]
    tree = prefix_tree_of_permutations([{k: label(p.mapping.get(k, k)) for k in range(64)}], 10)
    for chain in fwd + inv:
        assert chain in tree
    assert set(tree.nodes) == {()} | set(fwd) | set(inv)


@pytest.mark.parametrize("bound", [0, 1, 2, 50, 3000])
def test_coded_points_match_decoding(bound):
    coding = DomainCoding((1, 2, 3))
    naive = [(k, c) for k in range(bound) if (c := coding.decode(k)) is not None]
    assert coding.coded_points(bound) == naive
