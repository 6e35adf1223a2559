"""Inverse systems of completely decomposable groups built from labelled trees.

A labelling ``L`` of a leafless tree ``T`` gives level groups
``G_n = <(1/p) x_v : v in T at level n, p in L(v)>`` with bonding maps
``x_v -> x_{v|m}``.  Nice pairs are the labellings coming from a subtree
``S`` with injectively assigned primes; there

    L(v) = {p_s : s in S, s a proper prefix of v} | {p_s : s in S, v a prefix of s}

(zero tails add nothing new because nodes of ``S`` never contain 0).

Limit elements are finite combinations of branches ``x_branch``; they live
in the inverse limit whenever each coefficient lies in ``K`` of the branch's
limit label.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

from .arith import (
    ALL_PRIMES,
    FinitePrimes,
    PathPrimes,
    PrimeSet,
    TreePrimes,
    as_fraction,
    is_prime,
    nth_prime,
    prime_index,
    squarefree_over,
    union,
)
from .errors import UndecidableQuery, ValidationError, check_cancel
from .levels import LevelElement, LevelGroup, bonding_apply, validate_element
from .trees import (
    DEFAULT_SCAN,
    ORACLE_HORIZON,
    Branch,
    ExplicitTree,
    LazyTree,
    Node,
    OracleBranch,
    PeriodicBranch,
    Tree,
    WeightEnumeration,
    ZeroTail,
    branch_exit,
    branch_split,
    full_tree,
    shift_plus_one,
    staircase_tree,
)


# ---------------------------------------------------------------------------
# engines


class Engine:
    """A leafless tree ``T`` with a labelling; subclasses supply ``label``."""

    host: Tree
    truncation: int = 6
    scan: int = DEFAULT_SCAN

    def label(self, node: Node) -> PrimeSet:  # pragma: no cover - abstract
        raise NotImplementedError

    def level_bound(self) -> int | None:
        return None if self.host.width is not None else self.scan

    def level_nodes(self, n: int) -> list[Node]:
        return self.host.level(n, self.level_bound())

    def build_level(self, n: int, listed: bool = True) -> LevelGroup:
        nodes = self.level_nodes(n) if listed else None
        return LevelGroup(n, self.label, self.host, nodes)

    def check_conditions(self, depth: int | None = None) -> list[str]:
        """Monotonicity and the successor-union condition on the listed part of ``T``.

        Infinite labels are compared on the first few primes of the set.
        """
        depth = self.truncation if depth is None else depth
        problems: list[str] = []
        for n in range(depth):
            for v in self.level_nodes(n):
                kids = self.host.children(v, self.level_bound())
                if not kids:
                    problems.append(f"leaf {list(v)} in host tree")
                    continue
                lab = self.label(v)
                klabs = [self.label(c) for c in kids]
                for c, kl in zip(kids, klabs):
                    if not _subset_sample(kl, lab):
                        problems.append(f"monotonicity fails at {list(c)}")
                if lab.is_finite:
                    covered = set().union(*(set(_sample(kl)) for kl in klabs)) if klabs else set()
                    missing = [p for p in lab.elements() if p not in covered]
                    if missing:
                        problems.append(f"union condition fails at {list(v)}: {missing}")
        return problems


def _sample(s: PrimeSet, k: int = 12) -> tuple[int, ...]:
    if s.is_finite:
        return s.elements()
    try:
        return s.take(k)
    except UndecidableQuery:
        return ()


def _subset_sample(a: PrimeSet, b: PrimeSet) -> bool:
    return all(p in b for p in _sample(a))


class LabelledTree(Engine):
    """An engine from an arbitrary labelling function."""

    def __init__(self, host: Tree, label: Callable[[Node], PrimeSet], truncation: int = 6, name: str = ""):
        self.host = host
        self._label = label
        self.truncation = truncation
        self.name = name

    def label(self, node):
        return self._label(tuple(node))


class NicePair(Engine):
    """Host tree ``T`` and subtree ``S`` with an injective prime assignment.

    ``prime_of`` maps nodes of ``S`` to primes; ``node_of_prime`` inverts it
    (returning None off the image); ``pstar`` is the set of assigned primes.
    """

    def __init__(
        self,
        S: Tree,
        prime_of: Callable[[Node], int] | Mapping[Node, int],
        node_of_prime: Callable[[int], Node | None] | None = None,
        pstar: PrimeSet | None = None,
        host: Tree | None = None,
        truncation: int = 6,
        scan: int = DEFAULT_SCAN,
        name: str = "",
    ):
        self.S = S
        if isinstance(prime_of, Mapping):
            table = {tuple(k): int(v) for k, v in prime_of.items()}
            self._prime_table: dict[Node, int] | None = table
            self._prime_of = lambda v: table[v]
            inverse = {p: v for v, p in table.items()}
            node_of_prime = node_of_prime or inverse.get
            pstar = pstar or FinitePrimes(tuple(table.values()))
        else:
            self._prime_table = None
            self._prime_of = prime_of
        if node_of_prime is None or pstar is None:
            raise ValidationError("lazy prime assignments need node_of_prime and pstar")
        self._node_of_prime = node_of_prime
        self.pstar = pstar
        if host is None:
            host = full_tree(S.width + 1 if isinstance(S, ExplicitTree) else None)
        self.host = host
        self.truncation = truncation
        self.scan = scan
        self.name = name
        self._labels: dict[Node, PrimeSet] = {}

    # -- prime bookkeeping
    def prime_of(self, node: Node) -> int:
        node = tuple(node)
        if node not in self.S:
            raise ValidationError(f"{list(node)} is not in S")
        return self._prime_of(node)

    def node_of_prime(self, q: int) -> Node | None:
        v = self._node_of_prime(q)
        return None if v is None else tuple(v)

    def prime_of_plus(self, node: Node) -> int | None:
        """The prime of a node of ``S+`` (a node of S followed by zeros)."""
        node = tuple(node)
        stem = node
        while stem and stem[-1] == 0:
            stem = stem[:-1]
        return self.prime_of(stem) if stem in self.S else None

    def S_nodes(self) -> list[Node]:
        if isinstance(self.S, ExplicitTree):
            return list(self.S.nodes)
        return self.S.nodes_upto(self.truncation, self.scan)

    # -- labels
    def _subtree_primes(self, node: Node) -> set[int]:
        out: set[int] = set()
        stack = [node]
        while stack:
            v = stack.pop()
            out.add(self.prime_of(v))
            stack.extend(self.S.children(v))
        return out

    def label(self, node: Node) -> PrimeSet:
        node = tuple(node)
        got = self._labels.get(node)
        if got is not None:
            return got
        if node not in self.host:
            raise ValidationError(f"{list(node)} is not in the host tree")
        below = {self.prime_of(node[:k]) for k in range(len(node)) if node[:k] in self.S}
        if node not in self.S:
            got = FinitePrimes(tuple(below))
        elif self.S.subtree_finite(node):
            got = FinitePrimes(tuple(below | self._subtree_primes(node)))
        else:
            got = union(FinitePrimes(tuple(below)), TreePrimes(self.pstar, self, node))
        self._labels[node] = got
        return got

    label_eval = label

    def limit_label(self, branch: Branch, limit: int = ORACLE_HORIZON) -> PrimeSet:
        """Intersection of the labels along the branch: the primes of its prefixes in ``S``."""
        e = branch_exit(branch, self.S, limit)
        if e is None:
            return PathPrimes(self.pstar, self, branch)
        return FinitePrimes(tuple(self.prime_of(branch.prefix(k)) for k in range(e)))

    def exit_level(self, branch: Branch, limit: int = ORACLE_HORIZON) -> int | None:
        return branch_exit(branch, self.S, limit)

    def __repr__(self):
        return f"NicePair({self.name or self.S!r})"


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class PairOk:
    checked_nodes: int

    def __bool__(self):
        return True


@dataclass(frozen=True)
class PairViolation:
    clause: str
    node: Node | None
    reason: str

    def __bool__(self):
        return False


def _literal_label(np: NicePair, node: Node, plus: Sequence[Node]) -> set[int]:
    """Label straight from the definition over an explicit truncation of ``S+``."""
    out = set()
    for nu in plus:
        proper = len(nu) < len(node) and node[: len(nu)] == nu
        above = len(node) <= len(nu) and nu[: len(node)] == node
        if proper or above:
            out.add(np.prime_of_plus(nu))
    return out


def validate_nice_pair(np: NicePair, depth: int | None = None) -> PairOk | PairViolation:
    """Clauses of the nice-pair definition; exhaustive on explicit parts."""
    depth = np.truncation if depth is None else depth
    if () not in np.S or () not in np.host:
        return PairViolation("a", None, "missing root")
    s_nodes = np.S_nodes()
    for v in s_nodes:
        for k in range(len(v)):
            if v[:k] not in np.S:
                return PairViolation("a", v, f"S not prefix-closed: missing {list(v[:k])}")
        if v not in np.host:
            return PairViolation("a", v, "S is not inside T")
    top = np.host.height if isinstance(np.host, ExplicitTree) else depth + 1
    for v in np.host.nodes_upto(min(depth, top - 1), np.level_bound()):
        if len(v) < top and not np.host.children(v, np.level_bound()):
            return PairViolation("a", v, "T has a leaf")
    for v in s_nodes:
        if 0 in v:
            return PairViolation("b", v, "node of S has an entry 0")
    seen: dict[int, Node] = {}
    for v in s_nodes:
        p = np.prime_of(v)
        if not is_prime(p):
            return PairViolation("c", v, f"{p} is not prime")
        if p in seen:
            return PairViolation("c", v, f"prime {p} repeats (also at {list(seen[p])})")
        seen[p] = v
        if np.node_of_prime(p) != v:
            return PairViolation("c", v, "node_of_prime does not invert the assignment")
    plus_height = depth + 1 + max((len(v) for v in s_nodes), default=0)
    plus = []
    for v in s_nodes:
        for j in range(plus_height - len(v) + 1):
            w = v + (0,) * j
            if w not in np.host:
                return PairViolation("d", w, "zero tail of an S node leaves T")
            plus.append(w)
    for w in plus:
        stem = w
        while stem and stem[-1] == 0:
            stem = stem[:-1]
        if np.prime_of_plus(w) != np.prime_of(stem):
            return PairViolation("e", w, "prime changes along a zero tail")
    count = 0
    if isinstance(np.S, ExplicitTree):
        for v in np.host.nodes_upto(depth, np.level_bound()):
            lab = np.label(v)
            if set(lab.elements()) != _literal_label(np, v, plus):
                return PairViolation("f", v, "label disagrees with the defining formula")
            count += 1
    problems = np.check_conditions(min(depth, np.truncation))
    if problems:
        return PairViolation("engine", None, problems[0])
    return PairOk(count or len(s_nodes))


# ---------------------------------------------------------------------------
# bonding-map laws


def _generators(g: LevelGroup, v: Node, sample: int = 6) -> list[Fraction]:
    """Generators of ``K_v``: ``1/D_v`` for a finite label, else ``1/q`` for the first few primes."""
    lab = g.label(v)
    if lab.is_finite:
        return [Fraction(1, g.scale(v))]
    return [Fraction(1, q) for q in (nth_prime(i) for i in range(64)) if q in lab][:sample]


def _preimage(gen: Fraction, kids: Sequence[Node], child_groups: LevelGroup) -> LevelElement | None:
    """Integers ``a_c`` with ``sum a_c / D_c = gen``, found by extended gcd over the child scales."""
    from .linalg import xgcd

    scales = []
    for c in kids:
        lab = child_groups.label(c)
        if not lab.is_finite:
            # an infinite child label contains gen's denominator primes if anything does
            ok, _, _ = squarefree_over(gen.denominator, lab)
            if ok:
                return LevelElement(child_groups.level, ((c, gen),))
            continue
        scales.append((c, child_groups.scale(c)))
    if not scales:
        return None
    # want sum a_c / D_c = 1/d; multiply by L = lcm(d, D_c): sum a_c (L/D_c) = L/d
    import math

    d = gen.denominator
    L = math.lcm(d, *(dc for _, dc in scales))
    target = gen.numerator * (L // d)
    g, coeffs = 0, []
    for _, dc in scales:
        w = L // dc
        g2, s, t = xgcd(g, w)
        coeffs = [x * s for x in coeffs] + [t]
        g = g2
    if target % g:
        return None
    k = target // g
    return LevelElement(child_groups.level, tuple((c, Fraction(a * k, dc)) for (c, dc), a in zip(scales, coeffs)))


def bonding_laws(eng: Engine, depth: int | None = None, rng: random.Random | None = None,
                 samples: int = 4) -> dict[str, bool]:
    """Well-definedness, surjectivity and composition of the truncated bonding maps.

    Surjectivity is constructive: every generator of ``G_n`` gets an explicit
    preimage in ``G_{n+1}``.
    """
    depth = eng.truncation if depth is None else depth
    rng = rng or random.Random(0)
    groups = [eng.build_level(n) for n in range(depth + 1)]
    bound = eng.level_bound()
    out: dict[str, bool] = {}
    for n in range(depth):
        g, h = groups[n], groups[n + 1]
        well, onto = True, True
        for v in g.nodes:
            kids = eng.host.children(v, bound)
            for c in kids:
                for gen in _generators(h, c):
                    img = bonding_apply(LevelElement(n + 1, ((c, gen),)), n + 1, n)
                    well = well and bool(validate_element(img, g))
            for gen in _generators(g, v):
                pre = _preimage(gen, kids, h)
                onto = onto and pre is not None and bool(validate_element(pre, h)) and \
                    bonding_apply(pre, n + 1, n) == LevelElement(n, ((v, gen),))
        out[f"well_defined.{n + 1}->{n}"] = well
        out[f"onto.{n + 1}->{n}"] = onto
    for k in range(depth + 1):
        nodes = groups[k].nodes
        if not nodes:
            continue
        ok = True
        for _ in range(samples):
            terms = []
            for v in rng.sample(list(nodes), min(3, len(nodes))):
                gen = rng.choice(_generators(groups[k], v))
                terms.append((v, gen * rng.randint(-5, 5)))
            e = LevelElement(k, tuple(terms))
            for m in range(k + 1):
                direct = bonding_apply(e, k, m)
                for n in range(m, k + 1):
                    ok = ok and bonding_apply(bonding_apply(e, k, n), n, m) == direct
        out[f"composition.{k}"] = ok
    return out


# ---------------------------------------------------------------------------
# limit elements


def _bkey(b: Branch):
    return (0,) + b.key[1:] if isinstance(b, PeriodicBranch) else (1, b.key[1])


@dataclass(frozen=True)
class LimitElement:
    """Finite combination ``sum a_i x_{branch_i}`` of distinct branches."""

    support: tuple[tuple[Branch, Fraction], ...] = ()

    def __post_init__(self):
        acc: dict = {}
        order: dict = {}
        for b, c in self.support:
            k = _bkey(b)
            acc[k] = acc.get(k, Fraction(0)) + as_fraction(c)
            order.setdefault(k, b)
        items = tuple((order[k], acc[k]) for k in sorted(acc, key=repr) if acc[k] != 0)
        object.__setattr__(self, "support", items)

    @classmethod
    def of(cls, *terms) -> "LimitElement":
        return cls(tuple((b, as_fraction(c)) for b, c in terms))

    @classmethod
    def zerotail(cls, stem: Sequence[int], coeff=1) -> "LimitElement":
        return cls(((ZeroTail(stem), as_fraction(coeff)),))

    @property
    def branches(self) -> tuple[Branch, ...]:
        return tuple(b for b, _ in self.support)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(c for _, c in self.support)

    def is_zero(self) -> bool:
        return not self.support

    def __add__(self, other):
        return LimitElement(self.support + other.support)

    def __neg__(self):
        return LimitElement(tuple((b, -c) for b, c in self.support))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k):
        k = as_fraction(k)
        return LimitElement(tuple((b, k * c) for b, c in self.support))

    __rmul__ = __mul__

    def __repr__(self):
        return "LimitElement(" + " + ".join(f"{c}*{b!r}" for b, c in self.support) + ")"


def project_limit(y: LimitElement, n: int) -> LevelElement:
    return LevelElement(n, tuple((b.prefix(n), c) for b, c in y.support))


def separation_level(branches: Sequence[Branch]) -> int:
    """Least level at which the given distinct branches have pairwise distinct prefixes."""
    h = 0
    for i in range(len(branches)):
        for j in range(i + 1, len(branches)):
            s = branch_split(branches[i], branches[j])
            if s is None:
                raise ValidationError("repeated branch")
            h = max(h, s + 1)
    return h


def validate_limit(np: NicePair, y: LimitElement) -> tuple[bool, str]:
    for b, c in y.support:
        lab = np.limit_label(b)
        ok, p, why = squarefree_over(c.denominator, lab)
        if not ok:
            return False, f"{b!r}: {why}"
    return True, ""


def limit_divisible(np: NicePair, y: LimitElement, p: int) -> bool:
    """Is ``y / p`` in the inverse limit?  Decided branch by branch."""
    for b, c in y.support:
        if c.numerator % p == 0:
            continue
        if c.denominator % p != 0 and p in np.limit_label(b):
            continue
        return False
    return True


def limit_divisible_levels(np: Engine, y: LimitElement, p: int, depth: int) -> list[bool]:
    """Level-by-level divisibility of the projections of ``y`` up to ``depth``."""
    from .levels import divisible_by

    return [divisible_by(project_limit(y, n), p, np.build_level(n, listed=False)) for n in range(depth + 1)]


# ---------------------------------------------------------------------------
# homogeneity along a branch


@dataclass(frozen=True)
class NonZeroTypeCertificate:
    branch: Branch
    primes: tuple[int, ...]
    level_checks: tuple[tuple[int, int, bool], ...]  # (prime, level, divisible)

    @property
    def depth(self) -> int:
        return len(self.primes)

    def __bool__(self):
        return all(ok for _, _, ok in self.level_checks)


@dataclass(frozen=True)
class PromiseBroken:
    branch: Branch
    level: int
    node: Node

    def __bool__(self):
        return False


def homogeneity_witness(np: NicePair, branch: Branch, depth: int) -> NonZeroTypeCertificate | PromiseBroken:
    """Show ``x_branch`` is divisible by ``p_{branch|n}`` for ``n < depth``.

    Each prime is checked in the limit and, independently, at every level up
    to ``depth`` through the level groups.
    """
    for n in range(depth):
        v = branch.prefix(n)
        if v not in np.S:
            return PromiseBroken(branch, n, v)
    primes = tuple(np.prime_of(branch.prefix(n)) for n in range(depth))
    y = LimitElement(((branch, Fraction(1)),))
    checks = []
    for p in primes:
        if not limit_divisible(np, y, p):
            checks.append((p, -1, False))
            continue
        for n, ok in enumerate(limit_divisible_levels(np, y, p, depth)):
            checks.append((p, n, ok))
    return NonZeroTypeCertificate(branch, primes, tuple(checks))


# ---------------------------------------------------------------------------
# stock nice pairs


def nice_pair_from_table(nodes: Iterable[Sequence[int]], primes: Mapping | Sequence, host_width: int | None = None,
                         truncation: int = 6, name: str = "") -> NicePair:
    S = ExplicitTree(nodes)
    if isinstance(primes, Mapping):
        table = {tuple(k): int(v) for k, v in primes.items()}
    else:
        table = dict(zip(S.nodes, (int(p) for p in primes)))
    host = full_tree(host_width if host_width is not None else S.width + 1)
    return NicePair(S, table, host=host, truncation=truncation, name=name)


def np1(host_width: int | None = 3, truncation: int = 6) -> NicePair:
    """``S = {(), (1)}`` with primes 2 and 3."""
    return nice_pair_from_table([(), (1,)], {(): 2, (1,): 3}, host_width, truncation, "NP1")


@dataclass(frozen=True)
class RandomPairConfig:
    max_nodes: int = 8
    max_entry: int = 2
    truncation: int = 6


def random_nice_pair(rng: random.Random, cfg: RandomPairConfig = RandomPairConfig()) -> NicePair:
    """Random explicit ``S`` (entries in 1..max_entry) with distinct primes drawn from the first 40."""
    size = rng.randint(1, cfg.max_nodes)
    nodes: list[Node] = [()]
    attempts = 0
    while len(nodes) < size and attempts < 200:
        attempts += 1
        parent = rng.choice(nodes)
        if len(parent) >= cfg.truncation - 1:
            continue
        child = parent + (rng.randint(1, cfg.max_entry),)
        if child not in nodes:
            nodes.append(child)
    primes = rng.sample([nth_prime(i) for i in range(40)], len(nodes))
    S = ExplicitTree(nodes)
    return NicePair(S, dict(zip(sorted(nodes), primes)), host=full_tree(cfg.max_entry + 1),
                    truncation=cfg.truncation, name="random")


def make_GP(pstar: PrimeSet, s: Tree | None = None, truncation: int = 6, scan: int = DEFAULT_SCAN) -> NicePair:
    """Nice pair over ``w^{<w}`` whose primes enumerate ``pstar`` along ``s``.

    ``s`` defaults to the staircase tree; it must be well-founded with every
    non-leaf node splitting infinitely, and avoid the entry 0.
    """
    if pstar.is_finite:
        raise ValidationError("the prime set must be infinite")
    s = staircase_tree() if s is None else s
    enum = WeightEnumeration(s)

    def prime_of(v):
        return pstar.nth(enum.index(v))

    def node_of_prime(q):
        k = pstar.index_of(q)
        return None if k is None else enum.node(k)

    np = NicePair(s, prime_of, node_of_prime, pstar, host=full_tree(), truncation=truncation, scan=scan,
                  name="G_P")
    for v in s.nodes_upto(2, scan):
        if 0 in v:
            raise ValidationError(f"node {list(v)} of S has an entry 0")
    if s.subtree_finite(()):
        raise ValidationError("the root of S must split infinitely")
    return np


def make_GA(a: Tree, branch: Branch | None = None, truncation: int = 6, scan: int = DEFAULT_SCAN) -> NicePair:
    """Nice pair with ``S = a`` shifted up by one and fresh primes indexed by node weight.

    A declared branch of ``a`` is shifted along and stored as ``declared_branch``.
    """
    S = shift_plus_one(a)
    enum = WeightEnumeration(S)
    if isinstance(S, ExplicitTree):
        table = {v: nth_prime(enum.index(v)) for v in S.nodes}
        np = NicePair(S, table, host=full_tree(), truncation=truncation, scan=scan, name="G_A")
    else:
        def prime_of(v):
            return nth_prime(enum.index(v))

        def node_of_prime(q):
            if not is_prime(q):
                return None
            return enum.node(prime_index(q), max_weight=prime_index(q) + 2)

        np = NicePair(S, prime_of, node_of_prime, ALL_PRIMES, host=full_tree(), truncation=truncation, scan=scan,
                      name="G_A")
    np.declared_branch = None if branch is None else shift_branch(branch)
    np.source_tree = a
    np.source_branch = branch
    return np


def shift_branch(b: Branch) -> Branch:
    if isinstance(b, PeriodicBranch):
        return PeriodicBranch(tuple(x + 1 for x in b.stem), tuple(x + 1 for x in b.period))
    return OracleBranch(lambda n, f=b.fn: tuple(x + 1 for x in f(n)), b.tag + "+1")
