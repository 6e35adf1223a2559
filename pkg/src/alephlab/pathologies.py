"""Counterexample constructions.

* The Bezout tree: integers ``a_v`` on the binary tree with
  ``a_v = a_{v0} + a_{v1}``, whose level sums form one element of the
  inverse limit divisible by ever larger prime products.
* A rank-2 group ``K = <x0, x1, (x0 + k_p x1)/p : p in P>`` in which every
  element has type 0 but ``<x0, x1>*`` is not free.
* The chain of free subgroups ``G*_n`` of ``K`` and a mixed inverse system
  built from it.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Sequence

from .arith import FinitePrimes, as_fraction, is_prime, prime_factors
from .engine import LabelledTree
from .errors import ValidationError
from .levels import LevelElement, bonding_apply, validate_element
from .linalg import det, hnf_rows, solve_in_span
from .trees import Node, full_tree


# ---------------------------------------------------------------------------
# Bezout tree


@dataclass(frozen=True)
class BezoutNode:
    p: int
    a: int
    Q: frozenset[int]


@dataclass
class BezoutTree:
    depth: int
    primes: tuple[int, ...]
    nodes: dict[Node, BezoutNode]
    level_primes: tuple[int, ...]  # the prime introduced at each level, root first

    def level(self, n: int) -> list[Node]:
        return sorted(v for v in self.nodes if len(v) == n)

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "primes": list(self.primes),
            "level_primes": list(self.level_primes),
            "nodes": [
                {"node": list(v), "p": r.p, "a": str(r.a), "Q": sorted(r.Q)}
                for v, r in sorted(self.nodes.items(), key=lambda kv: (len(kv[0]), kv[0]))
            ],
        }


def bezout_cofactors(q: int, p: int) -> tuple[int, int]:
    """``(u, v)`` with ``q u + p v = 1`` and ``u`` the least positive choice."""
    u = pow(q, -1, p)
    v = (1 - q * u) // p
    return u, v


def build_bezout_tree(primes: Sequence[int], depth: int) -> BezoutTree:
    """Grow the tree level by level.

    The prime introduced at a new level is the least supplied prime not yet
    used that divides no current ``a_v``.  Children of ``v`` with prime ``p``
    get ``a_v q u`` and ``a_v p v`` where ``q u + p v = 1``.
    """
    primes = tuple(int(p) for p in primes)
    if len(set(primes)) != len(primes) or not all(is_prime(p) for p in primes):
        raise ValidationError("primes must be distinct primes")
    if len(primes) < depth + 1:
        raise ValidationError(f"need at least {depth + 1} primes for depth {depth}")
    nodes: dict[Node, BezoutNode] = {(): BezoutNode(primes[0], 1, frozenset())}
    used = [primes[0]]
    frontier: list[Node] = [()]
    for _ in range(depth):
        q = next((r for r in primes if r not in used and all(nodes[v].a % r for v in frontier)), None)
        if q is None:
            raise ValidationError("prime list exhausted")
        used.append(q)
        nxt = []
        for v in frontier:
            rec = nodes[v]
            u, w = bezout_cofactors(q, rec.p)
            nodes[v + (0,)] = BezoutNode(rec.p, rec.a * q * u, rec.Q | {q})
            nodes[v + (1,)] = BezoutNode(q, rec.a * rec.p * w, rec.Q | {rec.p})
            nxt += [v + (0,), v + (1,)]
        frontier = nxt
    return BezoutTree(depth, primes, nodes, tuple(used))


@dataclass(frozen=True)
class BezoutViolation:
    node: Node
    clause: str
    detail: str

    def __bool__(self):
        return False


@dataclass(frozen=True)
class BezoutOk:
    nodes_checked: int

    def __bool__(self):
        return True


def verify_bezout(t: BezoutTree) -> BezoutOk | BezoutViolation:
    """Exhaustive clause check, reporting the first failure.

    Three sweeps: the sum relation, then the per-node clauses, then the
    bookkeeping of children, so a broken ``a`` or ``Q`` is named where it sits.
    """
    if t.nodes.get(()) != BezoutNode(t.primes[0], 1, frozenset()):
        return BezoutViolation((), "base", "root must carry a=1, Q=empty, the first prime")
    levels = [t.level(n) for n in range(t.depth + 1)]
    for n, level in enumerate(levels):
        if len(level) != 2**n:
            return BezoutViolation((), "shape", f"level {n} has {len(level)} nodes")
    for n, level in enumerate(levels[:-1]):
        for v in level:
            a, a0, a1 = t.nodes[v].a, t.nodes[v + (0,)].a, t.nodes[v + (1,)].a
            if a0 + a1 != a:
                return BezoutViolation(v, "f.v", f"{a0} + {a1} != {a}")
    for n, level in enumerate(levels):
        allowed = set(t.level_primes[: n + 1])
        level_ps = {t.nodes[v].p for v in level}
        for v in level:
            r = t.nodes[v]
            if r.a == 0:
                return BezoutViolation(v, "b", "a is zero")
            if r.a % math.prod(r.Q) != 0:
                return BezoutViolation(v, "d", f"prod Q = {math.prod(r.Q)} does not divide {r.a}")
            if r.a % r.p == 0:
                return BezoutViolation(v, "e", f"p = {r.p} divides a")
            if not r.Q <= level_ps - {r.p}:
                return BezoutViolation(v, "c", "Q not inside the other primes of the level")
            if r.p not in allowed:
                return BezoutViolation(v, "a", f"p = {r.p} not among the primes introduced so far")
    for n, level in enumerate(levels[:-1]):
        q = t.level_primes[n + 1]
        for v in level:
            r, c0, c1 = t.nodes[v], t.nodes[v + (0,)], t.nodes[v + (1,)]
            if c0.p != r.p:
                return BezoutViolation(v, "f.i", "left child changes prime")
            if c1.p != q:
                return BezoutViolation(v, "f.ii", "right child does not get the new prime")
            if c0.Q != r.Q | {q}:
                return BezoutViolation(v, "f.iii", "left child Q")
            if c1.Q != r.Q | {r.p}:
                return BezoutViolation(v, "f.iv", "right child Q")
    return BezoutOk(len(t.nodes))


def bezout_engine(t: BezoutTree) -> LabelledTree:
    """Binary tree labelled by the primes of all descendants (truncated at the tree depth)."""
    below: dict[Node, frozenset[int]] = {}
    for v in sorted(t.nodes, key=len, reverse=True):
        kids = [below[c] for c in (v + (0,), v + (1,)) if c in below]
        below[v] = frozenset({t.nodes[v].p}).union(*kids)
    labels = {v: FinitePrimes(tuple(s)) for v, s in below.items()}
    return LabelledTree(full_tree(2), lambda v: labels[v], truncation=t.depth, name="bezout")


@dataclass
class BezoutLimitReport:
    elements: list[LevelElement]
    coherence: list[bool]  # f(y_{n+1}) == y_n
    divisibility: list[bool]  # y_n / prod_{l<n} p_l in G_n
    full_divisibility: list[bool]  # y_n / prod of all introduced primes in G_n

    @property
    def ok(self) -> bool:
        return all(self.coherence) and all(self.divisibility) and all(self.full_divisibility)

    def to_json(self) -> dict:
        return {
            "coherence": self.coherence,
            "divisibility": self.divisibility,
            "full_divisibility": self.full_divisibility,
            "y": [
                {"level": e.level, "support": [{"node": list(v), "coeff": str(c)} for v, c in e.support]}
                for e in self.elements[:4]
            ],
        }


def bezout_limit_element(t: BezoutTree) -> BezoutLimitReport:
    eng = bezout_engine(t)
    ys = [LevelElement(n, tuple((v, Fraction(t.nodes[v].a)) for v in t.level(n))) for n in range(t.depth + 1)]
    coherence = [bonding_apply(ys[n + 1], n + 1, n) == ys[n] for n in range(t.depth)]
    everything = math.prod(t.level_primes)
    div, full = [], []
    for n, y in enumerate(ys):
        g = eng.build_level(n, listed=False)
        div.append(bool(validate_element(y / math.prod(t.level_primes[:n]), g)))
        full.append(bool(validate_element(y / everything, g)))
    return BezoutLimitReport(ys, coherence, div, full)


# ---------------------------------------------------------------------------
# rank-2 group with all types zero


Vec = tuple[Fraction, Fraction]


def _residue(x: Fraction, p: int) -> int:
    """``(p x) mod p`` for ``x`` with at most one factor p in the denominator."""
    y = x * p
    return y.numerator * pow(y.denominator, -1, p) % p


@dataclass
class PontryaginGroup:
    primes: tuple[int, ...]
    k: dict[int, int]

    rank: int = 2

    def generator(self, p: int) -> Vec:
        return (Fraction(1, p), Fraction(self.k[p], p))

    def contains(self, z: Vec) -> bool:
        a, b = (as_fraction(z[0]), as_fraction(z[1]))
        den = math.lcm(a.denominator, b.denominator)
        for p in sorted(prime_factors(den)):
            if den % (p * p) == 0 or p not in self.k:
                return False
            if _residue(b, p) != self.k[p] * _residue(a, p) % p:
                return False
        return True

    def divisible_by(self, z: Vec, p: int) -> bool:
        return self.contains((as_fraction(z[0]) / p, as_fraction(z[1]) / p))

    def to_json(self) -> dict:
        return {"primes": list(self.primes), "k": {str(p): self.k[p] for p in self.primes}}


def pontryagin_make(primes: Sequence[int], k: dict[int, int] | None = None, seed: int = 0) -> PontryaginGroup:
    primes = tuple(int(p) for p in primes)
    if len(set(primes)) != len(primes) or not all(is_prime(p) for p in primes):
        raise ValidationError("need distinct primes")
    if k is None:
        rng = random.Random(seed)
        k = {p: rng.randint(1, p - 1) if p > 2 else 1 for p in primes}
    k = {int(p): int(v) for p, v in k.items()}
    for p in primes:
        if p not in k or not 1 <= k[p] <= p - 1:
            raise ValidationError(f"k_{p} must lie in 1..{p - 1}")
    return PontryaginGroup(primes, {p: k[p] for p in primes})


def brute_force_member(g: PontryaginGroup, z: Vec) -> bool:
    """Search for ``c_p`` in ``0..p-1`` with ``z - sum c_p y_p`` integral."""
    a, b = as_fraction(z[0]), as_fraction(z[1])
    den = math.lcm(a.denominator, b.denominator)
    ps = [p for p in g.primes if den % p == 0]
    rest = den
    for p in ps:
        rest //= p
    if rest != 1:
        return False
    for cs in iproduct(*(range(p) for p in ps)):
        ra = a - sum(Fraction(c, p) for c, p in zip(cs, ps))
        rb = b - sum(Fraction(c * g.k[p], p) for c, p in zip(cs, ps))
        if ra.denominator == 1 and rb.denominator == 1:
            return True
    return False


# ---------------------------------------------------------------------------
# the chain G*_n


@dataclass
class FreeDescription:
    n: int
    basis: list[Vec]
    transform: list[list[int]]  # unimodular U with U * scaled generators = [basis; 0]
    index: int  # [G*_n : Z^2]

    def coords(self, z: Vec) -> list[Fraction] | None:
        return solve_in_span([list(b) for b in self.basis], list(z))

    def contains(self, z: Vec) -> bool:
        c = self.coords(z)
        return c is not None and all(x.denominator == 1 for x in c)


def gstar_generators(g: PontryaginGroup, n: int) -> list[Vec]:
    return [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))] + [g.generator(p) for p in g.primes[:n]]


def gstar_level(g: PontryaginGroup, n: int) -> FreeDescription:
    """Free basis of ``<x0, x1, y_{p_i} : i < n>`` via echelon form over Z."""
    if n > len(g.primes):
        raise ValidationError(f"only {len(g.primes)} primes available")
    gens = gstar_generators(g, n)
    scale = math.prod(g.primes[:n])
    rows = [[int(x * scale) for x in v] for v in gens]
    h, u = hnf_rows(rows)
    basis = [(Fraction(h[i][0], scale), Fraction(h[i][1], scale)) for i in range(2)]
    if any(any(r) for r in h[2:]):
        raise AssertionError("rank exceeds 2")
    d = det([h[0][:2], h[1][:2]])
    index = scale * scale // abs(d)
    return FreeDescription(n, basis, u, index)


def check_gstar(fd: FreeDescription, g: PontryaginGroup) -> dict:
    gens = gstar_generators(g, fd.n)
    unimodular = abs(det(fd.transform)) == 1
    members = all(fd.contains(v) for v in gens)
    in_group = all(g.contains(b) for b in fd.basis)
    return {"n": fd.n, "unimodular": unimodular, "generators_in_span": members, "basis_in_K": in_group,
            "index": fd.index}


# ---------------------------------------------------------------------------
# mixed inverse system


@dataclass(frozen=True)
class MixedBounds:
    levels: int = 3
    summands: int = 3
    enumeration: int = 3


def enumerate_free(fd: FreeDescription, count: int) -> list[Vec]:
    """Elements of a rank-2 free group ordered by (max |coordinate|, coordinates)."""
    out: list[Vec] = []
    h = 0
    while len(out) < count:
        pts = sorted({(a, b) for a in range(-h, h + 1) for b in range(-h, h + 1) if max(abs(a), abs(b)) == h})
        for a, b in pts:
            out.append(tuple(a * x + b * y for x, y in zip(fd.basis[0], fd.basis[1])))
            if len(out) == count:
                break
        h += 1
    return out


@dataclass
class MixedElement:
    """An element ``(g0, {j: c_j})`` of ``G_n = G_(n,0) + sum Z x_(n,j)``."""

    level: int
    core: Vec
    free: dict[int, int] = field(default_factory=dict)

    def key(self):
        return (self.level, self.core, tuple(sorted((j, c) for j, c in self.free.items() if c)))

    def __eq__(self, other):
        return self.key() == other.key()

    def __add__(self, other):
        free = dict(self.free)
        for j, c in other.free.items():
            free[j] = free.get(j, 0) + c
        return MixedElement(self.level, (self.core[0] + other.core[0], self.core[1] + other.core[1]),
                            {j: c for j, c in free.items() if c})

    def scale(self, k: int):
        return MixedElement(self.level, (self.core[0] * k, self.core[1] * k),
                            {j: c * k for j, c in self.free.items() if c * k})


@dataclass
class MixedSystem:
    group: PontryaginGroup
    bounds: MixedBounds
    cores: list[FreeDescription]  # cores[n] describes G_(n,0)
    widths: list[int]  # number of summands (including 0) at each level
    enums: list[list[Vec]]  # enumeration prefix of G_(n,0)

    @property
    def levels(self) -> int:
        return len(self.cores)

    def g(self, n: int, j: int) -> int:
        """Index map from level n+1 coordinates to level n coordinates."""
        if j == 0 or j % 2 == 1:
            return 0
        return j // 2

    def bond(self, z: MixedElement) -> MixedElement:
        """``f_(n+1, n)``."""
        n = z.level - 1
        core = z.core
        free: dict[int, int] = {}
        for j, c in z.free.items():
            if j % 2 == 1:
                e = self.enums[n][(j - 1) // 2]
                core = (core[0] + c * e[0], core[1] + c * e[1])
            else:
                free[j // 2] = free.get(j // 2, 0) + c
        return MixedElement(n, core, {j: c for j, c in free.items() if c})

    def bond_to(self, z: MixedElement, m: int) -> MixedElement:
        while z.level > m:
            z = self.bond(z)
        return z

    def generators(self, n: int) -> list[MixedElement]:
        fd = self.cores[n]
        gens = [MixedElement(n, b) for b in fd.basis]
        gens += [MixedElement(n, (Fraction(0), Fraction(0)), {j: 1}) for j in range(1, self.widths[n])]
        return gens

    def random_element(self, n: int, rng: random.Random) -> MixedElement:
        z = MixedElement(n, (Fraction(0), Fraction(0)))
        for gen in self.generators(n):
            z = z + gen.scale(rng.randint(-3, 3))
        return z


def mixed_system_build(g: PontryaginGroup, bounds: MixedBounds = MixedBounds()) -> MixedSystem:
    """Truncated system with ``G_(n,0) = G*_{N-n}`` so that the cores shrink as ``n`` grows."""
    N = bounds.levels
    if N < 1 or N > len(g.primes):
        raise ValidationError(f"levels must be in 1..{len(g.primes)}")
    if bounds.summands < 2 or bounds.enumeration < 1:
        raise ValidationError("bounds too small")
    cores = [gstar_level(g, N - n) for n in range(N)]
    # even coordinates 2, 4, ... must hit 1..J_n - 1 exactly once, so J_{n+1} = 2 J_n - 1,
    # and the J_n - 1 odd coordinates list a prefix of the enumeration of G_(n,0)
    widths = [max(bounds.summands, bounds.enumeration + 1)]
    for _ in range(1, N):
        widths.append(2 * widths[-1] - 1)
    enums = [enumerate_free(fd, widths[n] - 1) for n, fd in enumerate(cores)]
    return MixedSystem(g, bounds, cores, widths, enums)


def check_mixed(ms: MixedSystem, rng: random.Random | None = None, samples: int = 10) -> dict:
    rng = rng or random.Random(0)
    checks: dict[str, bool] = {}
    for n in range(ms.levels - 1):
        below, above = ms.cores[n], ms.cores[n + 1]
        checks[f"d.inclusion.{n}"] = all(below.contains(b) for b in above.basis)
        checks[f"e.listing.{n}"] = (
            len(set(ms.enums[n])) == len(ms.enums[n]) and all(below.contains(e) for e in ms.enums[n])
            and all(ms.bond(MixedElement(n + 1, (Fraction(0), Fraction(0)), {2 * j + 1: 1})).core == ms.enums[n][j]
                    for j in range(len(ms.enums[n])))
        )
        targets = {ms.g(n, j) for j in range(2, ms.widths[n + 1], 2)}
        checks[f"f.even_onto.{n}"] = targets >= set(range(1, ms.widths[n])) and all(
            t < ms.widths[n] for t in targets)
        evens = [ms.g(n, j) for j in range(2, ms.widths[n + 1], 2)]
        checks[f"f.even_injective.{n}"] = len(set(evens)) == len(evens)
        checks[f"c.onto.{n}"] = {ms.g(n, j) for j in range(ms.widths[n + 1])} >= set(range(ms.widths[n]))
    for n in range(ms.levels):
        checks[f"b.core_free.{n}"] = all(check_gstar(ms.cores[n], ms.group).values())
    # composition: generator images pushed down step by step agree with linear extension
    for k in range(ms.levels):
        for m in range(k + 1):
            for _ in range(samples):
                z = ms.random_element(k, rng)
                w = ms.random_element(k, rng)
                lhs = ms.bond_to(z + w, m)
                rhs = ms.bond_to(z, m) + ms.bond_to(w, m)
                ok = lhs == rhs
                for n in range(m, k + 1):
                    ok = ok and ms.bond_to(ms.bond_to(z, n), m) == ms.bond_to(z, m)
                checks.setdefault(f"composition.{k}.{m}", True)
                checks[f"composition.{k}.{m}"] &= ok
    return checks


def case_one_projection(ms: MixedSystem, z: MixedElement) -> dict | None:
    """For an element with a nonzero free coordinate, a level and summand where it survives."""
    levels = []
    cur = z
    while True:
        levels.append(cur)
        if cur.level == 0:
            break
        cur = ms.bond(cur)
    for e in reversed(levels):
        nz = sorted(j for j, c in e.free.items() if c)
        if nz:
            j = nz[0]
            return {"level": e.level, "summand": j, "value": e.free[j]}
    return None


def product_group_check(factors: Sequence[PontryaginGroup], samples: int = 20, seed: int = 0) -> dict:
    """Type-0 evidence for sampled elements and non-freeness evidence for ``<x0, x1>*``."""
    if not factors:
        return {"factors": 0, "trivial": True, "samples": [], "diagonal": None}
    rng = random.Random(seed)
    rows = []
    for _ in range(samples):
        comps = []
        for g in factors:
            while True:
                a, b = rng.randint(-20, 20), rng.randint(-20, 20)
                if a or b:
                    break
            comps.append((Fraction(a), Fraction(b)))
        pool = sorted({p for g in factors for p in g.primes})
        divisors = [p for p in pool if all(g.divisible_by(z, p) for g, z in zip(factors, comps))]
        rows.append({"element": [[str(c) for c in z] for z in comps], "divisors_in_P": divisors,
                     "finite": True})
    diag = []
    for g in factors:
        idx = [gstar_level(g, n).index for n in range(len(g.primes) + 1)]
        diag.append({"indices": idx, "strictly_increasing": all(a < b for a, b in zip(idx, idx[1:]))})
    return {"factors": len(factors), "trivial": False, "samples": rows, "diagonal": diag}
