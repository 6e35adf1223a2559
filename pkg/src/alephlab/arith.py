"""Primes, symbolic prime sets, characteristics and types.

Prime sets come in a handful of shapes that keep the questions we need
(membership, almost-inclusion, almost-disjointness) decidable:

* ``FinitePrimes`` -- an explicit sorted tuple.
* ``BranchPrimes`` -- ``{p_code(x|n) : n >= 1}`` for an eventually periodic
  binary branch ``x``, where ``code(s) = int("1" + s, 2)`` and ``p_i`` is the
  i-th prime counted from ``p_0 = 2``.  Two different branches share exactly
  the primes indexed by their common prefixes.
* ``ResiduePrimes`` -- primes in one reduced residue class (modulus 1 is the
  set of all primes).
* ``TreePrimes`` -- primes attached to the nodes of an infinite tree above an
  anchor node, as produced by the nice-pair labelings.
* ``UnionPrimes`` / ``IntersectionPrimes``.

Exponents in characteristics are ints or ``math.inf``.
"""
from __future__ import annotations

import math
import threading
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Any, Iterable, Mapping

import sympy

from .errors import UndecidableQuery, ValidationError

INF = math.inf


# ---------------------------------------------------------------------------
# primes


@lru_cache(maxsize=None)
def nth_prime(i: int) -> int:
    """Return ``p_i`` with ``p_0 = 2``."""
    if i < 0:
        raise ValueError("prime index must be non-negative")
    return int(sympy.prime(i + 1))


_SIEVE_LIMIT = 1 << 22


@lru_cache(maxsize=1 << 16)
def prime_index(p: int) -> int:
    """Inverse of :func:`nth_prime` on primes."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p < _SIEVE_LIMIT:
        # the sieve caches its table, which makes repeated lookups cheap
        sympy.sieve.extend(p)
        return sympy.sieve.search(p)[0] - 1
    return int(sympy.primepi(p)) - 1


def is_prime(n: int) -> bool:
    return n >= 2 and bool(sympy.isprime(n))


def first_primes(count: int) -> tuple[int, ...]:
    return tuple(nth_prime(i) for i in range(count))


def prime_factors(n: int) -> dict[int, int]:
    n = abs(int(n))
    if n <= 1:
        return {}
    return {int(p): int(e) for p, e in sympy.factorint(n).items()}


def valuation(q: Fraction | int, p: int) -> int:
    q = Fraction(q)
    if q == 0:
        raise ValueError("valuation of zero")
    v, num, den = 0, q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


# ---------------------------------------------------------------------------
# prime sets


class PrimeSet:
    """Base class; subclasses are immutable."""

    is_finite: bool = False

    def __contains__(self, p: int) -> bool:  # pragma: no cover - abstract
        raise NotImplementedError

    def elements(self) -> tuple[int, ...]:
        raise UndecidableQuery(f"{self!r} is infinite")

    def nth(self, k: int) -> int:
        raise UndecidableQuery(f"{self!r} has no enumeration")

    def index_of(self, q: int) -> int | None:
        raise UndecidableQuery(f"{self!r} has no enumeration")

    def take(self, count: int) -> tuple[int, ...]:
        return tuple(self.nth(k) for k in range(count))

    def __or__(self, other: "PrimeSet") -> "PrimeSet":
        return union(self, other)

    def __and__(self, other: "PrimeSet") -> "PrimeSet":
        return intersection(self, other)


@dataclass(frozen=True)
class FinitePrimes(PrimeSet):
    primes: tuple[int, ...] = ()

    is_finite = True

    def __post_init__(self):
        ps = tuple(sorted(set(int(p) for p in self.primes)))
        for p in ps:
            if not is_prime(p):
                raise ValidationError(f"{p} is not prime")
        object.__setattr__(self, "primes", ps)

    def __contains__(self, p):
        return p in self.primes

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)

    def elements(self):
        return self.primes

    def nth(self, k):
        return self.primes[k]

    def index_of(self, q):
        i = bisect_left(self.primes, q)
        return i if i < len(self.primes) and self.primes[i] == q else None

    def product(self) -> int:
        return math.prod(self.primes)


EMPTY = FinitePrimes(())


def _bit_at(bits: str, period: str, i: int) -> str:
    if i < len(bits):
        return bits[i]
    return period[(i - len(bits)) % len(period)]


@dataclass(frozen=True)
class BranchPrimes(PrimeSet):
    """Primes indexed by the binary codes of the prefixes of ``bits + period^w``."""

    bits: str
    period: str

    def __post_init__(self):
        if not self.period or set(self.bits + self.period) - {"0", "1"}:
            raise ValidationError("branch needs a non-empty binary period")

    def bit(self, i: int) -> str:
        return _bit_at(self.bits, self.period, i)

    def prefix(self, n: int) -> str:
        return "".join(self.bit(i) for i in range(n))

    @staticmethod
    def code(s: str) -> int:
        return int("1" + s, 2)

    def nth(self, k):
        return nth_prime(self.code(self.prefix(k + 1)))

    def index_of(self, q):
        if not is_prime(q):
            return None
        i = prime_index(q)
        if i < 2:
            return None
        s = bin(i)[3:]
        return len(s) - 1 if s == self.prefix(len(s)) else None

    def __contains__(self, q):
        return self.index_of(q) is not None

    def _horizon(self, other: "BranchPrimes") -> int:
        lcm = len(self.period) * len(other.period) // math.gcd(len(self.period), len(other.period))
        return max(len(self.bits), len(other.bits)) + lcm

    def common_prefix_length(self, other: "BranchPrimes") -> int | None:
        """Length of the longest common prefix, or ``None`` if the branches coincide."""
        for i in range(self._horizon(other)):
            if self.bit(i) != other.bit(i):
                return i
        return None

    def same_branch(self, other: "BranchPrimes") -> bool:
        return self.common_prefix_length(other) is None


_RESIDUE_CACHE: dict[tuple[int, int], list[int]] = {}
_RESIDUE_LOCK = threading.Lock()


def _residue_list(m: int, r: int, upto_count: int | None = None, upto_value: int | None = None) -> list[int]:
    with _RESIDUE_LOCK:
        lst = _RESIDUE_CACHE.setdefault((m, r), [])
        p = lst[-1] if lst else 1
        while (upto_count is not None and len(lst) < upto_count) or (
            upto_value is not None and (not lst or lst[-1] < upto_value)
        ):
            p = int(sympy.nextprime(p))
            if p % m == r % m:
                lst.append(p)
        return lst


@dataclass(frozen=True)
class ResiduePrimes(PrimeSet):
    """Primes congruent to ``residue`` modulo ``modulus``; infinite by Dirichlet."""

    modulus: int = 1
    residue: int = 0

    def __post_init__(self):
        m = int(self.modulus)
        if m < 1:
            raise ValidationError("modulus must be positive")
        r = int(self.residue) % m
        if math.gcd(r, m) != 1 and m != 1:
            raise ValidationError("residue class must be reduced (coprime to modulus)")
        object.__setattr__(self, "modulus", m)
        object.__setattr__(self, "residue", r)

    def __contains__(self, q):
        return is_prime(q) and q % self.modulus == self.residue

    def nth(self, k):
        return _residue_list(self.modulus, self.residue, upto_count=k + 1)[k]

    def index_of(self, q):
        if q not in self:
            return None
        lst = _residue_list(self.modulus, self.residue, upto_value=q)
        return bisect_left(lst, q)


ALL_PRIMES = ResiduePrimes(1, 0)


@dataclass(frozen=True, eq=False)
class TreePrimes(PrimeSet):
    """Infinite set ``{p_s : s in S, anchor <= s}`` for a prime-labelled tree ``S``.

    ``source`` must provide ``node_of_prime(q)`` returning the owning node or
    ``None``; ``base`` is the set of all primes the labelling uses.
    """

    base: PrimeSet
    source: Any
    anchor: tuple[int, ...]

    def __contains__(self, q):
        if q not in self.base:
            return False
        node = self.source.node_of_prime(q)
        return node is not None and node[: len(self.anchor)] == self.anchor

    def __repr__(self):
        return f"TreePrimes(anchor={self.anchor!r})"


@dataclass(frozen=True, eq=False)
class PathPrimes(PrimeSet):
    """Infinite set ``{p_(v|n) : n}`` along an infinite branch ``v`` inside ``S``."""

    base: PrimeSet
    source: Any
    branch: Any

    def __contains__(self, q):
        if q not in self.base:
            return False
        node = self.source.node_of_prime(q)
        return node is not None and tuple(self.branch.prefix(len(node))) == node

    def __repr__(self):
        return f"PathPrimes(branch={self.branch!r})"


@dataclass(frozen=True)
class UnionPrimes(PrimeSet):
    parts: tuple[PrimeSet, ...]

    def __post_init__(self):
        object.__setattr__(self, "is_finite", all(p.is_finite for p in self.parts))

    def __contains__(self, q):
        return any(q in part for part in self.parts)

    def elements(self):
        if not self.is_finite:
            raise UndecidableQuery("union is infinite")
        return tuple(sorted(set().union(*(set(p.elements()) for p in self.parts))))


@dataclass(frozen=True)
class IntersectionPrimes(PrimeSet):
    parts: tuple[PrimeSet, ...]

    def __post_init__(self):
        object.__setattr__(self, "is_finite", self._decide_finite())

    def _decide_finite(self) -> bool:
        if any(p.is_finite for p in self.parts):
            return True
        for a, b in combinations(self.parts, 2):
            try:
                if almost_disjoint(a, b):
                    return True
            except UndecidableQuery:
                continue
        return False

    def __contains__(self, q):
        return all(q in part for part in self.parts)

    def elements(self):
        if not self.is_finite:
            raise UndecidableQuery("intersection is not known to be finite")
        for p in self.parts:
            if p.is_finite:
                return tuple(q for q in p.elements() if q in self)
        for a, b in combinations(self.parts, 2):
            try:
                if almost_disjoint(a, b):
                    return tuple(q for q in finite_intersection(a, b) if q in self)
            except UndecidableQuery:
                continue
        raise UndecidableQuery("intersection elements unavailable")  # pragma: no cover


def union(*sets: PrimeSet) -> PrimeSet:
    flat: list[PrimeSet] = []
    finite: set[int] = set()
    for s in sets:
        for part in s.parts if isinstance(s, UnionPrimes) else (s,):
            if isinstance(part, FinitePrimes):
                finite.update(part.primes)
            else:
                flat.append(part)
    if not flat:
        return FinitePrimes(tuple(finite))
    if not finite and len(flat) == 1:
        return flat[0]
    parts = ((FinitePrimes(tuple(finite)),) if finite else ()) + tuple(flat)
    return UnionPrimes(parts)


def intersection(*sets: PrimeSet) -> PrimeSet:
    if len(sets) == 1:
        return sets[0]
    for s in sets:
        if isinstance(s, FinitePrimes):
            return FinitePrimes(tuple(q for q in s.primes if all(q in t for t in sets)))
    res = IntersectionPrimes(tuple(sets))
    if res.is_finite:
        return FinitePrimes(res.elements())
    return res


# ---------------------------------------------------------------------------
# decidable set relations


def _is_all(s: PrimeSet) -> bool:
    return isinstance(s, ResiduePrimes) and s.modulus == 1


def _residue_classes_compatible(a: ResiduePrimes, b: ResiduePrimes) -> list[int]:
    """Reduced classes modulo lcm lying in both ``a`` and ``b``."""
    lcm = a.modulus * b.modulus // math.gcd(a.modulus, b.modulus)
    return [
        c
        for c in range(lcm)
        if math.gcd(c, lcm) == 1 and c % a.modulus == a.residue and c % b.modulus == b.residue
    ]


def _residue_difference_classes(a: ResiduePrimes, b: ResiduePrimes) -> list[int]:
    lcm = a.modulus * b.modulus // math.gcd(a.modulus, b.modulus)
    return [
        c
        for c in range(lcm)
        if math.gcd(c, lcm) == 1 and c % a.modulus == a.residue and c % b.modulus != b.residue
    ]


def _same_source(a: PrimeSet, b: PrimeSet) -> bool:
    return isinstance(a, TreePrimes) and isinstance(b, TreePrimes) and a.source is b.source


def _comparable(u: tuple, v: tuple) -> bool:
    k = min(len(u), len(v))
    return u[:k] == v[:k]


def _infinite_parts(s: UnionPrimes) -> tuple[list[PrimeSet], set[int]]:
    inf, fin = [], set()
    for p in s.parts:
        if p.is_finite:
            fin.update(p.elements())
        else:
            inf.append(p)
    return inf, fin


def almost_subset(a: PrimeSet, b: PrimeSet) -> bool:
    """Is ``a \\ b`` finite?"""
    if a.is_finite or _is_all(b):
        return True
    if b.is_finite:
        return False
    if isinstance(a, UnionPrimes):
        return all(almost_subset(p, b) for p in a.parts)
    if isinstance(b, UnionPrimes):
        inf, _ = _infinite_parts(b)
        if len(inf) == 1:
            return almost_subset(a, inf[0])
        for part in inf:
            try:
                if almost_subset(a, part):
                    return True
            except UndecidableQuery:
                pass
        raise UndecidableQuery(f"cannot decide {a!r} <=* {b!r}")
    if isinstance(a, IntersectionPrimes):
        for part in a.parts:
            try:
                if almost_subset(part, b):
                    return True
            except UndecidableQuery:
                pass
        raise UndecidableQuery(f"cannot decide {a!r} <=* {b!r}")
    if isinstance(a, BranchPrimes) and isinstance(b, BranchPrimes):
        return a.same_branch(b)
    if isinstance(a, ResiduePrimes) and isinstance(b, ResiduePrimes):
        return not _residue_difference_classes(a, b)
    if _same_source(a, b):
        if b.anchor == a.anchor[: len(b.anchor)]:
            return True
        if not _comparable(a.anchor, b.anchor):
            return False
        raise UndecidableQuery("strict sub-anchor inclusion depends on splitting")
    if isinstance(a, (TreePrimes, PathPrimes)):
        if almost_subset(a.base, b):
            return True
        if almost_disjoint(a.base, b):
            return False
    if isinstance(b, (TreePrimes, PathPrimes)):
        if not almost_subset(a, b.base):
            return False
    raise UndecidableQuery(f"cannot decide {a!r} <=* {b!r}")


def almost_disjoint(a: PrimeSet, b: PrimeSet) -> bool:
    """Is ``a & b`` finite?"""
    if a.is_finite or b.is_finite:
        return True
    if _is_all(a) or _is_all(b):
        return False
    for x, y in ((a, b), (b, a)):
        if isinstance(x, UnionPrimes):
            return all(almost_disjoint(p, y) for p in x.parts)
    for x, y in ((a, b), (b, a)):
        if isinstance(x, IntersectionPrimes):
            for part in x.parts:
                try:
                    if almost_disjoint(part, y):
                        return True
                except UndecidableQuery:
                    pass
            raise UndecidableQuery(f"cannot decide disjointness of {a!r}, {b!r}")
    if isinstance(a, BranchPrimes) and isinstance(b, BranchPrimes):
        return not a.same_branch(b)
    if isinstance(a, ResiduePrimes) and isinstance(b, ResiduePrimes):
        return not _residue_classes_compatible(a, b)
    if _same_source(a, b):
        return not _comparable(a.anchor, b.anchor)
    for x, y in ((a, b), (b, a)):
        if isinstance(x, (TreePrimes, PathPrimes)):
            if almost_disjoint(x.base, y):
                return True
            if almost_subset(x.base, y):
                return False
    raise UndecidableQuery(f"cannot decide disjointness of {a!r}, {b!r}")


def finite_intersection(a: PrimeSet, b: PrimeSet) -> tuple[int, ...]:
    """Explicit elements of ``a & b``; requires the intersection to be finite."""
    if a.is_finite:
        return tuple(q for q in a.elements() if q in b)
    if b.is_finite:
        return tuple(q for q in b.elements() if q in a)
    if not almost_disjoint(a, b):
        raise UndecidableQuery("intersection is infinite")
    for x, y in ((a, b), (b, a)):
        if isinstance(x, UnionPrimes):
            return tuple(sorted(set().union(*(set(finite_intersection(p, y)) for p in x.parts))))
    for x, y in ((a, b), (b, a)):
        if isinstance(x, IntersectionPrimes):
            for part in x.parts:
                try:
                    if almost_disjoint(part, y):
                        return tuple(q for q in finite_intersection(part, y) if q in x)
                except UndecidableQuery:
                    pass
    if isinstance(a, BranchPrimes) and isinstance(b, BranchPrimes):
        n = a.common_prefix_length(b)
        return tuple(sorted(a.nth(k) for k in range(n)))
    if isinstance(a, ResiduePrimes) and isinstance(b, ResiduePrimes):
        lcm = a.modulus * b.modulus // math.gcd(a.modulus, b.modulus)
        return tuple(q for q in sorted(prime_factors(lcm)) if q in a and q in b)
    if _same_source(a, b):
        return ()
    for x, y in ((a, b), (b, a)):
        if isinstance(x, (TreePrimes, PathPrimes)):
            return tuple(q for q in finite_intersection(x.base, y) if q in x)
    raise UndecidableQuery("no explicit intersection available")  # pragma: no cover


def finite_difference(a: PrimeSet, b: PrimeSet) -> tuple[int, ...]:
    """Explicit elements of ``a \\ b``; requires the difference to be finite."""
    if a.is_finite:
        return tuple(q for q in a.elements() if q not in b)
    if _is_all(b):
        return ()
    if not almost_subset(a, b):
        raise UndecidableQuery("difference is infinite")
    if isinstance(a, UnionPrimes):
        return tuple(sorted(set().union(*(set(finite_difference(p, b)) for p in a.parts))))
    if isinstance(b, UnionPrimes):
        inf, fin = _infinite_parts(b)
        for part in inf:
            try:
                if almost_subset(a, part):
                    return tuple(q for q in finite_difference(a, part) if q not in fin and q not in b)
            except UndecidableQuery:
                pass
    if isinstance(a, BranchPrimes) and isinstance(b, BranchPrimes):
        return ()
    if isinstance(a, ResiduePrimes) and isinstance(b, ResiduePrimes):
        lcm = a.modulus * b.modulus // math.gcd(a.modulus, b.modulus)
        return tuple(q for q in sorted(prime_factors(lcm)) if q in a and q not in b)
    if _same_source(a, b):
        return ()
    if isinstance(a, IntersectionPrimes):
        for part in a.parts:
            try:
                if almost_subset(part, b):
                    return tuple(q for q in finite_difference(part, b) if q in a)
            except UndecidableQuery:
                pass
    if isinstance(a, (TreePrimes, PathPrimes)):
        return tuple(q for q in finite_difference(a.base, b) if q in a)
    raise UndecidableQuery("no explicit difference available")


# ---------------------------------------------------------------------------
# almost-disjoint families


def almost_disjoint_family(count: int) -> list[BranchPrimes]:
    """``count`` pairwise almost-disjoint infinite prime sets.

    Member ``k`` follows the branch ``1^k 0 1 1 1 ...``; members ``i < k``
    share exactly the ``i`` primes coded by the prefixes ``1, 11, ..., 1^i``.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    return [BranchPrimes("1" * k + "0", "1") for k in range(count)]


def intersection_certificate(a: PrimeSet, b: PrimeSet) -> FinitePrimes:
    if not almost_disjoint(a, b):
        raise ValidationError("sets are not almost disjoint")
    return FinitePrimes(finite_intersection(a, b))


# ---------------------------------------------------------------------------
# characteristics and types


def _exp(v) -> int | float:
    if v == INF or v == "inf":
        return INF
    v = int(v)
    if v < 0:
        raise ValidationError("exponents are non-negative")
    return v


@dataclass(frozen=True)
class Characteristic:
    """Per-prime divisibility exponents in normal form.

    ``h_p`` is ``exceptional[p]`` when listed, ``support_exponent`` when
    ``p`` lies in ``support``, and 0 otherwise.
    """

    exceptional: tuple[tuple[int, int | float], ...] = ()
    support: PrimeSet = EMPTY
    support_exponent: int | float = 1

    def __post_init__(self):
        exc = self.exceptional
        if isinstance(exc, Mapping):
            exc = exc.items()
        norm = {}
        for p, e in exc:
            p = int(p)
            if not is_prime(p):
                raise ValidationError(f"{p} is not prime")
            norm[p] = _exp(e)
        object.__setattr__(self, "exceptional", tuple(sorted(norm.items())))
        object.__setattr__(self, "support_exponent", _exp(self.support_exponent))

    @property
    def exceptional_map(self) -> dict[int, int | float]:
        return dict(self.exceptional)

    def __getitem__(self, p: int) -> int | float:
        exc = self.exceptional_map
        if p in exc:
            return exc[p]
        return self.support_exponent if p in self.support else 0

    def sequence(self, count: int) -> list[int | float]:
        return [self[nth_prime(i)] for i in range(count)]

    @classmethod
    def zero(cls) -> "Characteristic":
        return cls()


def _region_check(region_finite, region_elems, exc_primes, value_is_inf) -> tuple[bool, tuple[int, ...] | None]:
    if not region_finite():
        return False, None
    elems = tuple(q for q in region_elems() if q not in exc_primes) if value_is_inf else None
    if value_is_inf and elems:
        return False, elems
    return True, elems


def char_equivalent(c1: Characteristic, c2: Characteristic) -> bool:
    """Equal at almost every prime, and finite wherever they differ."""
    e1, e2 = c1.exceptional_map, c2.exceptional_map
    for p in set(e1) | set(e2):
        a, b = c1[p], c2[p]
        if a != b and INF in (a, b):
            return False
    exc = set(e1) | set(e2)
    s1, s2, x1, x2 = c1.support, c2.support, c1.support_exponent, c2.support_exponent
    if x1 != 0:
        ok, _ = _region_check(lambda: almost_subset(s1, s2), lambda: finite_difference(s1, s2), exc, x1 == INF)
        if not ok:
            return False
    if x2 != 0:
        ok, _ = _region_check(lambda: almost_subset(s2, s1), lambda: finite_difference(s2, s1), exc, x2 == INF)
        if not ok:
            return False
    if x1 != x2:
        ok, _ = _region_check(lambda: almost_disjoint(s1, s2), lambda: finite_intersection(s1, s2), exc,
                              INF in (x1, x2))
        if not ok:
            return False
    return True


@dataclass(frozen=True)
class TypeComparison:
    """Outcome of ``t(c1) <= t(c2)`` with the evidence behind it.

    ``exceptions`` lists the finitely many primes where ``c1`` exceeds ``c2``
    (when that set is finite); ``witness`` describes an infinite exception
    set or an infinite value that cannot be repaired.
    """

    holds: bool
    reason: str
    exceptions: tuple[int, ...] | None = None
    witness: dict | None = None

    def __bool__(self):
        return self.holds


def compare_types(c1: Characteristic, c2: Characteristic) -> TypeComparison:
    exc = set(c1.exceptional_map) | set(c2.exceptional_map)
    bad: list[int] = []
    for p in sorted(exc):
        a, b = c1[p], c2[p]
        if a > b:
            if a == INF:
                return TypeComparison(False, f"h_{p} is infinite on the left only", witness={"prime": p})
            bad.append(p)
    s1, s2, x1, x2 = c1.support, c2.support, c1.support_exponent, c2.support_exponent
    if x1 > 0:
        if not almost_subset(s1, s2):
            return TypeComparison(
                False,
                "left support minus right support is infinite",
                witness={"kind": "difference", "left": s1, "right": s2},
            )
        extra = [q for q in finite_difference(s1, s2) if q not in exc]
        if extra and x1 == INF:
            return TypeComparison(False, "infinite exponent outside right support", witness={"prime": extra[0]})
        bad.extend(extra)
    if x1 > x2:
        if not almost_disjoint(s1, s2):
            return TypeComparison(
                False,
                "left exponent exceeds right exponent on an infinite common support",
                witness={"kind": "intersection", "left": s1, "right": s2},
            )
        extra = [q for q in finite_intersection(s1, s2) if q not in exc]
        if extra and x1 == INF:
            return TypeComparison(False, "infinite exponent exceeds right", witness={"prime": extra[0]})
        bad.extend(extra)
    return TypeComparison(True, "exceptions are finite and finite-valued", exceptions=tuple(sorted(set(bad))))


def type_leq(c1: Characteristic, c2: Characteristic) -> bool:
    return compare_types(c1, c2).holds


@dataclass(frozen=True, eq=False)
class TypeClass:
    """Equivalence class of a characteristic; ``==`` and ``<=`` are the type relations."""

    representative: Characteristic = field(default_factory=Characteristic)

    def __eq__(self, other):
        if not isinstance(other, TypeClass):
            return NotImplemented
        return char_equivalent(self.representative, other.representative)

    def __le__(self, other):
        return type_leq(self.representative, other.representative)

    def __ge__(self, other):
        return type_leq(other.representative, self.representative)

    __hash__ = None  # type: ignore[assignment]

    @property
    def is_zero(self) -> bool:
        return self == ZERO_TYPE


ZERO_TYPE = TypeClass(Characteristic())


def rational_characteristic(c: Fraction, allowed: PrimeSet) -> Characteristic:
    """Characteristic of ``c * x`` inside the rank-1 group with denominators from ``allowed``."""
    c = Fraction(c)
    if c == 0:
        raise ValidationError("the characteristic of 0 is undefined")
    primes = set(prime_factors(c.numerator)) | set(prime_factors(c.denominator))
    exc = {p: valuation(c, p) + (1 if p in allowed else 0) for p in primes}
    return Characteristic(tuple(exc.items()), allowed, 1)


def as_fraction(x: Any) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.replace("−", "-").strip())
    return Fraction(x)


def fraction_str(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def squarefree_over(d: int, allowed: PrimeSet) -> tuple[bool, int | None, str]:
    """Check ``d`` is a squarefree product of primes from ``allowed``."""
    for p, e in sorted(prime_factors(d).items()):
        if p not in allowed:
            return False, p, f"prime {p} not allowed"
        if e > 1:
            return False, p, f"denominator not squarefree at {p}"
    return True, None, ""


def iter_subsets(items: Iterable[int]):
    items = list(items)
    for r in range(len(items) + 1):
        yield from combinations(items, r)
