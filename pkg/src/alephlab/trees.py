"""Trees on omega: explicit finite trees, lazy trees with oracles, branches.

Nodes are tuples of non-negative ints.  A lazy tree answers membership and
"is the subtree above this node finite?"; children of a node are found by
scanning entries below ``width`` (or a caller-supplied bound when the tree
splits infinitely).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from .errors import ValidationError, check_cancel

Node = tuple[int, ...]

DEFAULT_SCAN = 6


def is_prefix(a: Sequence[int], b: Sequence[int]) -> bool:
    """``a`` is an initial segment of ``b`` (not necessarily proper)."""
    return len(a) <= len(b) and tuple(b[: len(a)]) == tuple(a)


def common_prefix_len(a: Sequence[int], b: Sequence[int]) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


class Tree:
    """Interface shared by explicit and lazy trees."""

    width: int | None = None

    def __contains__(self, node) -> bool:  # pragma: no cover - abstract
        raise NotImplementedError

    def subtree_finite(self, node: Node) -> bool:  # pragma: no cover - abstract
        raise NotImplementedError

    def children(self, node: Node, bound: int | None = None) -> list[Node]:
        limit = self.width if self.width is not None else bound
        if limit is None:
            raise ValidationError("infinitely splitting tree needs a scan bound")
        if self.width is not None and bound is not None:
            limit = min(limit, bound)
        node = tuple(node)
        return [node + (i,) for i in range(limit) if node + (i,) in self]

    def level(self, n: int, bound: int | None = None) -> list[Node]:
        nodes: list[Node] = [()] if () in self else []
        for _ in range(n):
            nodes = [c for v in nodes for c in self.children(v, bound)]
        return nodes

    def nodes_upto(self, depth: int, bound: int | None = None) -> list[Node]:
        out = []
        for n in range(depth + 1):
            out.extend(self.level(n, bound))
        return sorted(out)

    @property
    def is_explicit(self) -> bool:
        return False


class ExplicitTree(Tree):
    """A finite set of nodes, stored sorted.  Not validated on construction."""

    def __init__(self, nodes: Iterable[Sequence[int]]):
        self.nodes: tuple[Node, ...] = tuple(sorted({tuple(int(x) for x in v) for v in nodes}))
        self._set = frozenset(self.nodes)
        self.width = 1 + max((max(v) for v in self.nodes if v), default=-1)

    def __contains__(self, node):
        return tuple(node) in self._set

    def __iter__(self):
        return iter(self.nodes)

    def __len__(self):
        return len(self.nodes)

    def __eq__(self, other):
        return isinstance(other, ExplicitTree) and self.nodes == other.nodes

    def __hash__(self):
        return hash(self.nodes)

    def __repr__(self):
        return f"ExplicitTree({list(self.nodes)!r})"

    @property
    def is_explicit(self) -> bool:
        return True

    def children(self, node, bound=None):
        node = tuple(node)
        return [v for v in self.nodes if len(v) == len(node) + 1 and v[: len(node)] == node
                and (bound is None or v[-1] < bound)]

    def level(self, n, bound=None):
        return [v for v in self.nodes if len(v) == n and (bound is None or all(x < bound for x in v))]

    def subtree_finite(self, node):
        return True

    @property
    def height(self) -> int:
        return max((len(v) for v in self.nodes), default=0)

    def rank(self) -> dict[Node, int]:
        """Height of the subtree above each node (leaves get 0)."""
        r: dict[Node, int] = {}
        for v in sorted(self.nodes, key=len, reverse=True):
            r[v] = 1 + max((r[c] for c in self.children(v)), default=-1)
        return r


class LazyTree(Tree):
    """Tree given by a membership oracle and a subtree-finiteness oracle."""

    def __init__(
        self,
        contains: Callable[[Node], bool],
        subtree_finite: Callable[[Node], bool],
        width: int | None = None,
        name: str = "lazy",
        finite_children: Callable[[Node], list[Node]] | None = None,
    ):
        self._contains = contains
        self._finite = subtree_finite
        self._finite_children = finite_children
        self.width = width
        self.name = name

    def children(self, node, bound=None):
        node = tuple(node)
        if self.width is None and bound is None and self._finite_children is not None:
            if not self.subtree_finite(node):
                raise ValidationError(f"{node!r} splits infinitely; a scan bound is needed")
            return list(self._finite_children(node))
        return super().children(node, bound)

    def __contains__(self, node):
        return bool(self._contains(tuple(node)))

    def subtree_finite(self, node):
        node = tuple(node)
        return True if node not in self else bool(self._finite(node))

    def __repr__(self):
        return f"LazyTree({self.name})"


# ---------------------------------------------------------------------------
# stock trees


def full_tree(width: int | None = None) -> LazyTree:
    """``width^{<w}`` (or all of ``w^{<w}`` when ``width`` is None)."""
    if width is None:
        return LazyTree(lambda v: all(x >= 0 for x in v), lambda v: False, None, "full")
    return LazyTree(lambda v: all(0 <= x < width for x in v), lambda v: False, width, f"full{width}")


def decreasing_tree(top: int = 10) -> LazyTree:
    """Strictly decreasing sequences with entries below ``top``; well-founded with rank = last entry."""

    def contains(v):
        return all(0 <= x < top for x in v) and all(a > b for a, b in zip(v, v[1:]))

    return LazyTree(contains, lambda v: True, top, f"decreasing{top}")


def decreasing_rank(top: int = 10) -> Callable[[Node], int]:
    return lambda v: v[-1] if v else top


def staircase_tree() -> LazyTree:
    """``{()} + {v : entries >= 1, len(v) <= v[0]}``: well-founded, every non-leaf splits infinitely."""

    def contains(v):
        return not v or (all(x >= 1 for x in v) and len(v) <= v[0])

    def finite(v):
        return bool(v) and len(v) == v[0]

    return LazyTree(contains, finite, None, "staircase", finite_children=lambda v: [])


def fan_tree() -> LazyTree:
    """``{()} + {(m,) : m >= 1}``."""
    return LazyTree(lambda v: not v or (len(v) == 1 and v[0] >= 1), lambda v: bool(v), None, "fan",
                    finite_children=lambda v: [])


# ---------------------------------------------------------------------------
# branches


@dataclass(frozen=True)
class PeriodicBranch:
    """The branch ``stem + period + period + ...``; ``period == (0,)`` is a zero tail."""

    stem: Node
    period: Node = (0,)

    def __post_init__(self):
        stem = tuple(int(x) for x in self.stem)
        period = tuple(int(x) for x in self.period)
        if not period or any(x < 0 for x in stem + period):
            raise ValidationError("branch needs a non-empty period of naturals")
        # primitive period
        for d in range(1, len(period) + 1):
            if len(period) % d == 0 and period == period[:d] * (len(period) // d):
                period = period[:d]
                break
        # absorb the tail of the stem into the period
        while stem and stem[-1] == period[-1]:
            stem = stem[:-1]
            period = period[-1:] + period[:-1]
        object.__setattr__(self, "stem", stem)
        object.__setattr__(self, "period", period)

    @property
    def is_zerotail(self) -> bool:
        return self.period == (0,)

    def entry(self, i: int) -> int:
        if i < len(self.stem):
            return self.stem[i]
        return self.period[(i - len(self.stem)) % len(self.period)]

    def prefix(self, n: int) -> Node:
        return tuple(self.entry(i) for i in range(n))

    @property
    def key(self):
        return ("periodic", self.stem, self.period)

    def __repr__(self):
        if self.is_zerotail:
            return f"ZeroTail({self.stem!r})"
        return f"PeriodicBranch({self.stem!r}, {self.period!r})"


def ZeroTail(stem: Sequence[int] = ()) -> PeriodicBranch:
    return PeriodicBranch(tuple(stem), (0,))


@dataclass(frozen=True, eq=False)
class OracleBranch:
    """Branch given by ``fn(n) -> prefix of length n``; equality is by ``tag``."""

    fn: Callable[[int], Sequence[int]]
    tag: str

    def prefix(self, n: int) -> Node:
        v = tuple(self.fn(n))
        if len(v) != n:
            raise ValidationError(f"oracle branch {self.tag!r} returned a prefix of the wrong length")
        return v

    def entry(self, i: int) -> int:
        return self.prefix(i + 1)[i]

    @property
    def key(self):
        return ("oracle", self.tag)

    def __eq__(self, other):
        return isinstance(other, OracleBranch) and self.tag == other.tag

    def __hash__(self):
        return hash(self.key)

    def check_coherent(self, depth: int) -> bool:
        prev: Node = ()
        for n in range(1, depth + 1):
            cur = self.prefix(n)
            if cur[:-1] != prev:
                return False
            prev = cur
        return True

    def __repr__(self):
        return f"OracleBranch({self.tag!r})"


Branch = PeriodicBranch | OracleBranch

ORACLE_HORIZON = 256


def branch_split(b1: Branch, b2: Branch, horizon: int = ORACLE_HORIZON) -> int | None:
    """Length of the common prefix of two branches, ``None`` if they are equal."""
    if isinstance(b1, PeriodicBranch) and isinstance(b2, PeriodicBranch):
        if b1 == b2:
            return None
        lcm = len(b1.period) * len(b2.period) // math.gcd(len(b1.period), len(b2.period))
        horizon = max(len(b1.stem), len(b2.stem)) + lcm
    elif b1.key == b2.key:
        return None
    for i in range(horizon):
        if b1.entry(i) != b2.entry(i):
            return i
    if isinstance(b1, PeriodicBranch) and isinstance(b2, PeriodicBranch):  # pragma: no cover
        return None
    raise ValidationError(f"branches {b1!r} and {b2!r} agree up to {horizon}")


def branch_exit(branch: Branch, tree: Tree, limit: int = ORACLE_HORIZON) -> int | None:
    """Least ``n`` with ``branch|n`` outside ``tree``, or ``None`` if none below ``limit``."""
    for n in range(limit + 1):
        if branch.prefix(n) not in tree:
            return n
    return None


# ---------------------------------------------------------------------------
# validation and well-foundedness


@dataclass(frozen=True)
class TreeOk:
    checked: int

    def __bool__(self):
        return True


@dataclass(frozen=True)
class TreeViolation:
    node: Node | None
    reason: str

    def __bool__(self):
        return False


def validate_tree(t: Tree, sample: Iterable[Sequence[int]] | None = None) -> TreeOk | TreeViolation:
    """Rooted and prefix-closed; lazy trees are checked on ``sample`` only."""
    if () not in t:
        return TreeViolation(None, "missing root")
    nodes = list(t.nodes) if isinstance(t, ExplicitTree) else [tuple(v) for v in (sample or ())]
    count = 0
    for v in nodes:
        if any(x < 0 for x in v):
            return TreeViolation(v, "negative entry")
        if v not in t:
            continue
        count += 1
        for k in range(len(v)):
            if v[:k] not in t:
                return TreeViolation(v, f"missing prefix {v[:k]!r}")
    return TreeOk(count)


@dataclass(frozen=True)
class NoBranchUpTo:
    depth: int
    rank: Mapping[Node, int] | None = None


@dataclass(frozen=True)
class BranchFound:
    path: tuple[Node, ...]


@dataclass(frozen=True)
class Certified:
    depth: int
    edges_checked: int


@dataclass(frozen=True)
class RankViolation:
    parent: Node
    child: Node
    reason: str


def wellfounded_check(
    t: Tree,
    depth: int,
    rank: Callable[[Node], int] | None = None,
    scan: int = DEFAULT_SCAN,
    cancel=None,
):
    """Finite evidence about the absence or presence of an infinite branch.

    Explicit trees always give ``NoBranchUpTo(height)`` with the exact rank
    function.  For lazy trees a supplied ``rank`` is verified to strictly
    decrease along every edge up to ``depth``; otherwise a depth-first search
    (largest child first, skipping subtrees the oracle reports finite) looks
    for a node of length ``depth``.
    """
    if isinstance(t, ExplicitTree):
        return NoBranchUpTo(t.height, t.rank())
    if rank is not None:
        edges = 0
        frontier = [()] if () in t else []
        for _ in range(depth):
            nxt = []
            for v in frontier:
                check_cancel(cancel)
                for c in t.children(v, scan):
                    edges += 1
                    if not rank(c) < rank(v):
                        return RankViolation(v, c, f"rank {rank(c)} not below {rank(v)}")
                    nxt.append(c)
            frontier = nxt
        return Certified(depth, edges)

    def dfs(v: Node) -> tuple[Node, ...] | None:
        check_cancel(cancel)
        if len(v) == depth:
            return (v,)
        for c in reversed(t.children(v, scan)):
            if t.subtree_finite(c):
                continue
            found = dfs(c)
            if found is not None:
                return (v,) + found
        return None

    if () not in t or t.subtree_finite(()):
        return NoBranchUpTo(depth)
    found = dfs(())
    if found is None:
        return NoBranchUpTo(depth)
    return BranchFound(found[1:])


# ---------------------------------------------------------------------------
# metric, shift, permutation trees


def _slice(t: Tree, n: int, scan: int) -> frozenset[Node]:
    return frozenset(t.level(n, None if t.width is not None else scan))


def tree_distance(t1: Tree, t2: Tree, max_depth: int | None = None, scan: int = DEFAULT_SCAN) -> Fraction:
    """``2^-n`` for the least level ``n`` whose slices differ; 0 if none up to ``max_depth``."""
    if max_depth is None:
        if isinstance(t1, ExplicitTree) and isinstance(t2, ExplicitTree):
            max_depth = max(t1.height, t2.height) + 1
        else:
            max_depth = 8
    for n in range(max_depth + 1):
        if _slice(t1, n, scan) != _slice(t2, n, scan):
            return Fraction(1, 2**n)
    return Fraction(0)


def _unshift(v: Node) -> Node | None:
    if any(x < 1 for x in v):
        return None
    return tuple(x - 1 for x in v)


def shift_plus_one(a: Tree) -> Tree:
    """Add 1 to every entry of every node."""
    if isinstance(a, ExplicitTree):
        return ExplicitTree(tuple(x + 1 for x in v) for v in a.nodes)

    def contains(v):
        u = _unshift(v)
        return u is not None and u in a

    def finite(v):
        u = _unshift(v)
        return True if u is None else a.subtree_finite(u)

    width = None if a.width is None else a.width + 1
    return LazyTree(contains, finite, width, f"shift({getattr(a, 'name', 'tree')})")


def prefix_tree_of_permutations(perms: Iterable, depth: int) -> ExplicitTree:
    """All restrictions ``g|n`` and ``g^-1|n`` for ``n <= depth``.

    Each entry of ``perms`` is a sequence ``(g(0), g(1), ...)`` or a mapping;
    a chain stops where the map (or its inverse) is undefined.
    """
    nodes: set[Node] = {()}
    for g in perms:
        fwd = dict(g) if isinstance(g, Mapping) else dict(enumerate(g))
        if len(set(fwd.values())) != len(fwd):
            raise ValidationError("permutation is not injective")
        inv = {v: k for k, v in fwd.items()}
        for m in (fwd, inv):
            chain: list[int] = []
            for i in range(depth):
                if i not in m:
                    break
                chain.append(m[i])
                nodes.add(tuple(chain))
    return ExplicitTree(nodes)


# ---------------------------------------------------------------------------
# canonical enumeration of a tree


class WeightEnumeration:
    """Injective numbering of the nodes of a lazy tree by (entry sum + length, lex).

    Every node gets a finite index, so infinitely splitting trees can be
    enumerated; index 0 is the root.
    """

    def __init__(self, tree: Tree):
        self.tree = tree
        self._order: list[Node] = []
        self._index: dict[Node, int] = {}
        self._weight_done = -1

    @staticmethod
    def weight(v: Node) -> int:
        return sum(v) + len(v)

    def _nodes_of_weight(self, w: int) -> list[Node]:
        out = []

        def grow(v: Node, left: int):
            if left == 0:
                out.append(v)
                return
            for x in range(left):
                c = v + (x,)
                if c in self.tree:
                    grow(c, left - x - 1)

        if () in self.tree:
            grow((), w)
        return sorted(out)

    def _extend(self):
        self._weight_done += 1
        for v in self._nodes_of_weight(self._weight_done):
            self._index[v] = len(self._order)
            self._order.append(v)

    def index(self, v: Node) -> int:
        v = tuple(v)
        if v not in self.tree:
            raise ValidationError(f"{v!r} is not in the tree")
        while self._weight_done < self.weight(v):
            self._extend()
        return self._index[v]

    def node(self, i: int, max_weight: int = 64) -> Node | None:
        while len(self._order) <= i and self._weight_done < max_weight:
            self._extend()
        return self._order[i] if i < len(self._order) else None
