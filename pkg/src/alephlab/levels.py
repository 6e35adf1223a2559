"""Completely decomposable level groups ``G_n = sum K_v x_v`` and their elements.

``K_v`` is the subgroup of Q of fractions whose denominator is a squarefree
product of primes from the label ``L(v)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .arith import (
    Characteristic,
    FinitePrimes,
    PrimeSet,
    UndecidableQuery,
    as_fraction,
    intersection,
    prime_factors,
    squarefree_over,
    valuation,
)
from .errors import ValidationError
from .linalg import rref, saturate
from .trees import Node, Tree


@dataclass(frozen=True)
class Rank1Component:
    node: Node
    allowed_primes: PrimeSet

    def contains(self, c: Fraction) -> bool:
        return squarefree_over(Fraction(c).denominator, self.allowed_primes)[0]


class LevelGroup:
    """``G_n`` for a labelling; ``nodes`` may be omitted for infinitely wide levels."""

    def __init__(self, level: int, label: Callable[[Node], PrimeSet], tree: Tree | None = None,
                 nodes: Sequence[Node] | None = None):
        self.level = level
        self._label = label
        self.tree = tree
        self.nodes = None if nodes is None else tuple(sorted(tuple(v) for v in nodes))
        self._cache: dict[Node, PrimeSet] = {}

    def label(self, node: Node) -> PrimeSet:
        node = tuple(node)
        got = self._cache.get(node)
        if got is None:
            got = self._label(node)
            self._cache[node] = got
        return got

    def component(self, node: Node) -> Rank1Component:
        return Rank1Component(tuple(node), self.label(node))

    def components(self) -> list[Rank1Component]:
        if self.nodes is None:
            raise UndecidableQuery("level is not listed explicitly")
        return [self.component(v) for v in self.nodes]

    def has_node(self, node: Node) -> bool:
        node = tuple(node)
        if len(node) != self.level:
            return False
        if self.nodes is not None:
            return node in self.nodes
        return self.tree is None or node in self.tree

    def scale(self, node: Node) -> int:
        """``D_v = prod L(v)`` for a finite label, so that ``K_v = (1/D_v) Z``."""
        lab = self.label(node)
        if not lab.is_finite:
            raise UndecidableQuery(f"label of {node!r} is infinite")
        return FinitePrimes(lab.elements()).product()


@dataclass(frozen=True)
class LevelElement:
    level: int
    support: tuple[tuple[Node, Fraction], ...] = ()

    def __post_init__(self):
        items = self.support.items() if isinstance(self.support, Mapping) else self.support
        acc: dict[Node, Fraction] = {}
        for node, c in items:
            node = tuple(int(x) for x in node)
            if len(node) != self.level:
                raise ValidationError(f"node {node!r} does not live at level {self.level}")
            acc[node] = acc.get(node, Fraction(0)) + as_fraction(c)
        object.__setattr__(self, "support", tuple(sorted((v, c) for v, c in acc.items() if c != 0)))

    @classmethod
    def of(cls, level: int, coeffs: Mapping | Iterable = ()) -> "LevelElement":
        return cls(level, tuple(coeffs.items()) if isinstance(coeffs, Mapping) else tuple(coeffs))

    @classmethod
    def basis(cls, node: Sequence[int], coeff=1) -> "LevelElement":
        node = tuple(node)
        return cls(len(node), ((node, Fraction(coeff)),))

    @property
    def coeffs(self) -> dict[Node, Fraction]:
        return dict(self.support)

    @property
    def nodes(self) -> tuple[Node, ...]:
        return tuple(v for v, _ in self.support)

    def coeff(self, node: Node) -> Fraction:
        return self.coeffs.get(tuple(node), Fraction(0))

    def is_zero(self) -> bool:
        return not self.support

    def __add__(self, other: "LevelElement") -> "LevelElement":
        return add(self, other)

    def __neg__(self):
        return LevelElement(self.level, tuple((v, -c) for v, c in self.support))

    def __sub__(self, other):
        return add(self, -other)

    def __mul__(self, k):
        k = as_fraction(k)
        return LevelElement(self.level, tuple((v, k * c) for v, c in self.support))

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1 / as_fraction(k))

    def __repr__(self):
        body = " + ".join(f"({c})x{list(v)}" for v, c in self.support) or "0"
        return f"<L{self.level}: {body}>"


def add(e1: LevelElement, e2: LevelElement) -> LevelElement:
    if e1.level != e2.level:
        raise ValidationError(f"level mismatch {e1.level} vs {e2.level}")
    return LevelElement(e1.level, e1.support + e2.support)


@dataclass(frozen=True)
class ElementOk:
    def __bool__(self):
        return True


@dataclass(frozen=True)
class ElementViolation:
    node: Node
    prime: int | None
    reason: str

    def __bool__(self):
        return False


def validate_element(e: LevelElement, g: LevelGroup) -> ElementOk | ElementViolation:
    if e.level != g.level:
        return ElementViolation((), None, f"element level {e.level} != group level {g.level}")
    for node, c in e.support:
        if not g.has_node(node):
            return ElementViolation(node, None, "node not in the level")
        ok, p, why = squarefree_over(c.denominator, g.label(node))
        if not ok:
            return ElementViolation(node, p, why)
    return ElementOk()


def bonding_apply(e: LevelElement, frm: int, to: int) -> LevelElement:
    """Image under ``x_v -> x_{v|to}``."""
    if frm != e.level:
        raise ValidationError(f"element lives at level {e.level}, not {frm}")
    if to > frm or to < 0:
        raise ValidationError(f"cannot bond from level {frm} to {to}")
    return LevelElement(to, tuple((v[:to], c) for v, c in e.support))


def project(e: LevelElement, target_nodes: Iterable[Node]) -> LevelElement:
    keep = {tuple(v) for v in target_nodes}
    return LevelElement(e.level, tuple((v, c) for v, c in e.support if v in keep))


def divisible_by(e: LevelElement, p: int, g: LevelGroup) -> bool:
    """Is ``e / p`` in ``G_n``?  Per node: p divides the numerator, or p is allowed and absent below."""
    for node, c in e.support:
        if c.numerator % p == 0:
            continue
        if p in g.label(node) and c.denominator % p != 0:
            continue
        return False
    return True


def p_height(c: Fraction, p: int, allowed: PrimeSet) -> int:
    """``h_p`` of ``c x_v`` inside ``K_v x_v``."""
    return valuation(c, p) + (1 if p in allowed else 0)


def characteristic(e: LevelElement, g: LevelGroup) -> Characteristic:
    """Characteristic of a nonzero element of ``G_n``."""
    if e.is_zero():
        raise ValidationError("the characteristic of 0 is undefined")
    labels = [g.label(v) for v in e.nodes]
    support = intersection(*labels)
    special: set[int] = set()
    for _, c in e.support:
        special.update(prime_factors(c.numerator))
        special.update(prime_factors(c.denominator))
    exc = {p: min(p_height(c, p, g.label(v)) for v, c in e.support) for p in special}
    return Characteristic(tuple(exc.items()), support, 1)


# ---------------------------------------------------------------------------
# pure closure and freeness


class SubgroupDescription:
    """``span_Q(X) & G_n`` given by a span basis in reduced echelon form."""

    def __init__(self, level: int, nodes: Sequence[Node], basis_rows: Sequence[Sequence[Fraction]],
                 group: LevelGroup):
        self.level = level
        self.nodes = tuple(nodes)
        self.rows = [list(r) for r in basis_rows]
        self.group = group

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def basis(self) -> list[LevelElement]:
        return [LevelElement(self.level, tuple(zip(self.nodes, r))) for r in self.rows]

    def in_span(self, e: LevelElement) -> bool:
        if any(v not in self.nodes for v in e.nodes):
            return False
        vec = [e.coeff(v) for v in self.nodes]
        red, piv = rref(self.rows + [vec])
        return len(piv) == self.rank

    def contains(self, e: LevelElement) -> bool:
        return e.level == self.level and self.in_span(e) and bool(validate_element(e, self.group))

    __contains__ = contains


def pure_closure(xs: Sequence[LevelElement], g: LevelGroup) -> SubgroupDescription:
    nodes = sorted({v for x in xs for v in x.nodes})
    rows = [[x.coeff(v) for v in nodes] for x in xs]
    red, piv = rref(rows) if rows else ([], [])
    return SubgroupDescription(g.level, nodes, red[: len(piv)], g)


@dataclass(frozen=True)
class Free:
    basis: tuple[LevelElement, ...]


@dataclass(frozen=True)
class NonFree:
    element: LevelElement
    divisors: PrimeSet


@dataclass(frozen=True)
class Unknown:
    reason: str


def integral_multiple(e: LevelElement, g: LevelGroup) -> LevelElement:
    """Smallest positive integer multiple of ``e`` lying in ``G_n``."""
    m = 1
    for v, c in e.support:
        m = math.lcm(m, c.denominator)
    return e * m


def freeness_check(s: SubgroupDescription, g: LevelGroup) -> Free | NonFree | Unknown:
    if s.rank == 0:
        return Free(())
    labels = {v: g.label(v) for v in s.nodes}
    if all(lab.is_finite for lab in labels.values()):
        scales = [g.scale(v) for v in s.nodes]
        scaled = []
        for r in s.rows:
            vec = [c * d for c, d in zip(r, scales)]
            den = 1
            for x in vec:
                den = math.lcm(den, x.denominator)
            scaled.append([int(x * den) for x in vec])
        sat = saturate(scaled, len(s.nodes))
        basis = tuple(
            LevelElement(s.level, tuple((v, Fraction(w, d)) for v, w, d in zip(s.nodes, row, scales)))
            for row in sat
        )
        return Free(basis)
    for b in s.basis:
        x = integral_multiple(b, g)
        sup = intersection(*(labels[v] for v in x.nodes))
        if not sup.is_finite:
            return NonFree(x, sup)
    return Unknown("infinite labels present but no basis element has infinite divisor set")
