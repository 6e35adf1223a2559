"""Coding elements of an inverse limit as permutations of omega.

Sort ``n`` is the level group ``A_n``, identified with ``Z^d`` through an
explicit coordinate map.  Its elements are coded by powers ``p_n^m`` with
``m >= 1``; ``m - 1`` is the rank of the coordinate vector under a fixed
bijection ``omega -> Z^d``.  An element ``(a_n)`` of the limit acts by
translation on every sort and fixes all other naturals.

Codes can be astronomically large, so points are kept symbolic as
``Code(sort, m)`` and only turned into integers when small.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .arith import nth_prime, prime_factors
from .errors import ValidationError

Vector = tuple[int, ...]


# ---------------------------------------------------------------------------
# omega <-> Z^d


def zigzag(t: int) -> int:
    return 2 * t if t >= 0 else -2 * t - 1


def unzigzag(k: int) -> int:
    return k // 2 if k % 2 == 0 else -(k + 1) // 2


def pair(a: int, b: int) -> int:
    """Bijection ``omega^2 -> omega``, ``(a, b) -> 2^a (2b + 1) - 1``."""
    return (1 << a) * (2 * b + 1) - 1


def unpair(k: int) -> tuple[int, int]:
    k += 1
    a = (k & -k).bit_length() - 1
    return a, ((k >> a) - 1) // 2


def vector_rank(v: Sequence[int]) -> int:
    """Bijection ``Z^d -> omega`` built from nested pairing; bit length is linear in the entries."""
    if not v:
        return 0
    idx = zigzag(v[-1])
    for t in reversed(v[:-1]):
        idx = pair(zigzag(t), idx)
    return idx


def vector_unrank(idx: int, dim: int) -> Vector:
    if dim == 0:
        if idx != 0:
            raise ValidationError("Z^0 has a single element")
        return ()
    out = []
    for _ in range(dim - 1):
        a, idx = unpair(idx)
        out.append(unzigzag(a))
    out.append(unzigzag(idx))
    return tuple(out)


# ---------------------------------------------------------------------------
# codes


@dataclass(frozen=True, order=True)
class Code:
    """The natural number ``p_sort ^ m``."""

    sort: int
    m: int

    @property
    def prime(self) -> int:
        return nth_prime(self.sort)

    def value(self) -> int:
        return self.prime**self.m

    def small(self, limit_bits: int = 64) -> bool:
        return self.m <= limit_bits and self.prime**self.m < 1 << limit_bits

    def to_json(self):
        return self.value() if self.small() else f"{self.prime}^{self.m}"


Point = int | Code


@dataclass(frozen=True)
class DomainCoding:
    """Sorts ``0..len(dims)-1`` with ``A_n = Z^{dims[n]}``."""

    dims: tuple[int, ...]

    def code(self, sort: int, vec: Sequence[int]) -> Code:
        if len(vec) != self.dims[sort]:
            raise ValidationError(f"sort {sort} has dimension {self.dims[sort]}")
        return Code(sort, vector_rank(vec) + 1)

    def element(self, c: Code) -> Vector:
        return vector_unrank(c.m - 1, self.dims[c.sort])

    def decode(self, k: int) -> Code | None:
        """The code behind a natural number, or ``None`` if ``k`` codes nothing."""
        return _decode(k, len(self.dims))

    def coded_points(self, bound: int) -> list[tuple[int, Code]]:
        """Coded naturals below ``bound`` in increasing order, listed by walking prime powers."""
        out = []
        for sort in range(len(self.dims)):
            p = nth_prime(sort)
            k, m = p, 1
            while k < bound:
                out.append((k, Code(sort, m)))
                k, m = k * p, m + 1
        return sorted(out)

    def normalize(self, x: Point) -> Point:
        if isinstance(x, Code):
            return x
        c = self.decode(x)
        return x if c is None else c


@lru_cache(maxsize=1 << 16)
def _decode(k: int, sorts: int) -> Code | None:
    if k < 2:
        return None
    f = prime_factors(k)
    if len(f) != 1:
        return None
    (p, m), = f.items()
    from .arith import prime_index

    n = prime_index(p)
    return Code(n, m) if n < sorts else None


def as_int(x: Point) -> int:
    return x.value() if isinstance(x, Code) else x


# ---------------------------------------------------------------------------
# permutations


@dataclass
class PartialPermutation:
    """``pi`` restricted to ``{0, ..., bound-1}``; ``mapping`` lists moved points only.

    ``shifts`` (one vector per sort) lets the permutation be evaluated at
    any point, including symbolic codes above the bound.
    """

    bound: int
    mapping: dict[int, Point]
    coding: DomainCoding | None = None
    shifts: tuple[Vector, ...] | None = None

    def __call__(self, x: Point) -> Point:
        if isinstance(x, int) and x < self.bound and self.shifts is None:
            return self.mapping.get(x, x)
        if self.coding is None or self.shifts is None:
            raise ValidationError("permutation has no action outside its bound")
        c = self.coding.normalize(x)
        if not isinstance(c, Code):
            return x
        v = self.coding.element(c)
        w = tuple(a + b for a, b in zip(v, self.shifts[c.sort]))
        img = self.coding.code(c.sort, w)
        return img.value() if isinstance(x, int) and img.small() else img

    def restriction(self) -> list[Point]:
        return [self.mapping.get(k, k) for k in range(self.bound)]

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "map": [[k, v.to_json() if isinstance(v, Code) else v] for k, v in sorted(self.mapping.items())],
        }


def encode_vectors(shifts: Sequence[Sequence[int]], coding: DomainCoding, bound: int) -> PartialPermutation:
    if len(shifts) != len(coding.dims):
        raise ValidationError("one shift per sort is required")
    shifts = tuple(tuple(int(x) for x in s) for s in shifts)
    for n, s in enumerate(shifts):
        if len(s) != coding.dims[n]:
            raise ValidationError(f"shift for sort {n} has the wrong dimension")
    perm = PartialPermutation(bound, {}, coding, shifts)
    for k, c in coding.coded_points(bound):
        if any(shifts[c.sort]):
            img = perm(c)
            # small codes are stored as integers so equal points compare equal
            perm.mapping[k] = img.value() if img.small() else img
    return perm


# ---------------------------------------------------------------------------
# coordinate maps for the two sources of inverse systems


@dataclass
class CoordinateSystem:
    """Coordinates of each sort together with a map from elements to shift vectors."""

    coding: DomainCoding
    to_vectors: Callable[[object], list[Vector]]
    describe: dict = field(default_factory=dict)


def engine_coordinates(engine, levels: int | None = None) -> CoordinateSystem:
    """Sorts are the level groups ``G_0..G_T`` of an engine with finitely many nodes and finite labels.

    A node ``v`` contributes the coordinate ``c_v D_v``.
    """
    from .engine import LimitElement, project_limit

    top = engine.truncation if levels is None else levels - 1
    node_lists, scales = [], []
    if getattr(engine.host, "width", None) is None:
        raise ValidationError("coding needs a host tree of finite width")
    for n in range(top + 1):
        g = engine.build_level(n)
        nodes = list(g.nodes)
        try:
            sc = [g.scale(v) for v in nodes]
        except Exception as exc:
            raise ValidationError(f"coding needs finite labels: {exc}") from None
        node_lists.append(nodes)
        scales.append(sc)
    index = [{v: i for i, v in enumerate(ns)} for ns in node_lists]

    def to_vectors(y: LimitElement) -> list[Vector]:
        out = []
        for n in range(top + 1):
            e = project_limit(y, n)
            vec = [0] * len(node_lists[n])
            for v, c in e.support:
                if v not in index[n]:
                    raise ValidationError(f"node {list(v)} is outside level {n}")
                x = Fraction(c) * scales[n][index[n][v]]
                if x.denominator != 1:
                    raise ValidationError(f"coefficient {c} at {list(v)} is not in the level group")
                vec[index[n][v]] = int(x)
            out.append(tuple(vec))
        return out

    coding = DomainCoding(tuple(len(ns) for ns in node_lists))
    return CoordinateSystem(coding, to_vectors, {"source": "engine", "dims": list(coding.dims)})


def mixed_coordinates(ms) -> CoordinateSystem:
    """Sorts are the levels of a mixed system; coordinates are basis coordinates of the core then free ones."""
    from .pathologies import MixedElement

    dims = tuple(2 + ms.widths[n] - 1 for n in range(ms.levels))

    def to_vectors(z: MixedElement) -> list[Vector]:
        if z.level != ms.levels - 1:
            raise ValidationError("mixed elements are given at the top level")
        out: list[Vector] = [()] * ms.levels
        cur = z
        while True:
            coords = ms.cores[cur.level].coords(cur.core)
            if coords is None or any(x.denominator != 1 for x in coords):
                raise ValidationError("core component outside G_(n,0)")
            free = [cur.free.get(j, 0) for j in range(1, ms.widths[cur.level])]
            out[cur.level] = tuple(int(x) for x in coords) + tuple(free)
            if cur.level == 0:
                break
            cur = ms.bond(cur)
        return out

    coding = DomainCoding(dims)
    return CoordinateSystem(coding, to_vectors, {"source": "mixed", "dims": list(dims)})


def encode_element(y, system: CoordinateSystem, bound: int) -> PartialPermutation:
    return encode_vectors(system.to_vectors(y), system.coding, bound)


# ---------------------------------------------------------------------------
# checks


@dataclass
class EmbeddingReport:
    bound: int
    points: int
    sum_mismatches: list[int]
    inverse_mismatches: list[int]
    injective: bool
    sort_preserving: bool

    @property
    def ok(self) -> bool:
        return not self.sum_mismatches and not self.inverse_mismatches and self.injective and self.sort_preserving

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "coded_points": self.points,
            "sum_mismatches": self.sum_mismatches[:10],
            "inverse_mismatches": self.inverse_mismatches[:10],
            "injective": self.injective,
            "sort_preserving": self.sort_preserving,
            "ok": self.ok,
        }


def _neg(vs: Sequence[Vector]) -> list[Vector]:
    return [tuple(-x for x in v) for v in vs]


def _add(a: Sequence[Vector], b: Sequence[Vector]) -> list[Vector]:
    return [tuple(x + y for x, y in zip(u, v)) for u, v in zip(a, b)]


def verify_embedding(y, z, system: CoordinateSystem, bound: int) -> EmbeddingReport:
    """``pi_{y+z} = pi_y . pi_z`` and ``pi_{-y} = pi_y^{-1}`` at every coded point below ``bound``."""
    vy, vz = system.to_vectors(y), system.to_vectors(z)
    coding = system.coding
    py = encode_vectors(vy, coding, bound)
    pz = encode_vectors(vz, coding, bound)
    psum = encode_vectors(_add(vy, vz), coding, bound)
    pneg = encode_vectors(_neg(vy), coding, bound)
    pts = coding.coded_points(bound)
    sum_bad, inv_bad = [], []
    images = set()
    sorts_ok = True
    for k, c in pts:
        if coding.normalize(psum(c)) != coding.normalize(py(pz(c))):
            sum_bad.append(k)
        if coding.normalize(pneg(py(c))) != c:
            inv_bad.append(k)
        img = coding.normalize(py(c))
        images.add(img)
        sorts_ok &= isinstance(img, Code) and img.sort == c.sort
    return EmbeddingReport(bound, len(pts), sum_bad, inv_bad, len(images) == len(pts), sorts_ok)


def distance_in_Sinf(p1: PartialPermutation, p2: PartialPermutation) -> Fraction:
    """``2^-n`` for the least ``n`` below the bound where the two disagree, else 0."""
    if p1.bound != p2.bound:
        raise ValidationError("permutations must share a bound")
    for n in range(p1.bound):
        if p1.mapping.get(n, n) != p2.mapping.get(n, n):
            return Fraction(1, 2**n)
    return Fraction(0)


def inverse_restriction(p: PartialPermutation) -> dict[int, Point]:
    """``pi^{-1}`` on the points below the bound that are images of points below the bound."""
    out = {}
    for k in range(p.bound):
        v = p.mapping.get(k, k)
        if isinstance(v, int) and v < p.bound:
            out[v] = k
    return out


def restriction_chains(p: PartialPermutation, depth: int) -> tuple[list[tuple], list[tuple]]:
    """The chains ``pi|n`` and ``pi^{-1}|n`` for ``n <= depth`` (stopping where undefined)."""
    fwd = {k: p.mapping.get(k, k) for k in range(p.bound)}
    inv = inverse_restriction(p)
    chains = []
    for m in (fwd, inv):
        chain, out = [], []
        for i in range(depth):
            if i not in m:
                break
            chain.append(m[i])
            out.append(tuple(chain))
        chains.append(out)
    return chains[0], chains[1]

