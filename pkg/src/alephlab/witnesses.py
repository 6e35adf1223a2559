"""Witness algorithms over nice pairs.

* ``torsionless_witness`` -- a homomorphism onto a free rank-1 summand that
  does not kill a given nonzero limit element.
* ``separability_retraction`` -- a retraction of the inverse limit onto the
  pure closure of a finite set, through a free summand of some level group.
* ``surjection_obstruction`` / ``product_obstruction`` -- type evidence that
  a level group cannot map onto a given target.

Certificates serialise to JSON with a ``verify`` document that
:func:`verify_certificate` re-checks without touching the engine.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import (
    INF,
    BranchPrimes,
    Characteristic,
    FinitePrimes,
    PrimeSet,
    ResiduePrimes,
    TreePrimes,
    almost_disjoint,
    compare_types,
    finite_intersection,
    fraction_str,
    nth_prime,
)
from .engine import (
    LimitElement,
    NicePair,
    project_limit,
    separation_level,
    validate_limit,
)
from .errors import StabilizationError, TheoremViolation, ValidationError, check_cancel
from .levels import LevelElement, project
from .linalg import (
    SummandProjection,
    det,
    first_dependency,
    maximal_minors_gcd,
    rank,
    saturate,
    solve_in_span,
)
from .trees import ORACLE_HORIZON, Branch, Node, branch_exit


# ---------------------------------------------------------------------------
# homomorphisms onto level summands


@dataclass(frozen=True)
class HomDescriptor:
    """``z -> projection of z_level onto the summand over nodes``.

    With finite labels the target is ``sum (1/D_v) Z x_v``; ``to_integer``
    reads off the coordinates in that basis.
    """

    level: int
    nodes: tuple[Node, ...]
    scales: tuple[int, ...]

    def __call__(self, z: LimitElement) -> LevelElement:
        return project(project_limit(z, self.level), self.nodes)

    def to_integer(self, z: LimitElement) -> tuple[int, ...]:
        e = self(z)
        out = []
        for v, d in zip(self.nodes, self.scales):
            c = e.coeff(v) * d
            if c.denominator != 1:
                raise ValidationError(f"{z!r} is not in the group at {list(v)}")
            out.append(c.numerator)
        return tuple(out)


@dataclass(frozen=True)
class TorsionlessWitness:
    hom: HomDescriptor
    n_star: int
    path: tuple[Node, ...]
    value: Fraction
    label: tuple[int, ...]

    @property
    def level(self) -> int:
        return self.hom.level

    @property
    def node(self) -> Node:
        return self.hom.nodes[0]


def _scale(np: NicePair, v: Node) -> int:
    lab = np.label(v)
    if not lab.is_finite:
        raise TheoremViolation(f"label of {list(v)} is infinite at the witness node")
    return math.prod(lab.elements())


def torsionless_witness(np: NicePair, y: LimitElement, limit: int = ORACLE_HORIZON, cancel=None) -> TorsionlessWitness:
    """Follow nonzero coefficients from a stable level until the path leaves ``S``."""
    if y.is_zero():
        raise ValidationError("the element must be nonzero")
    ok, why = validate_limit(np, y)
    if not ok:
        raise ValidationError(why)
    h = separation_level(y.branches)
    n_star = h
    while n_star > 0 and not project_limit(y, n_star - 1).is_zero():
        n_star -= 1
    level = n_star
    e = project_limit(y, level)
    node = e.nodes[0]
    path = [node]
    while node in np.S:
        check_cancel(cancel)
        if level >= limit:
            raise StabilizationError("nonzero path never leaves S; is S well-founded?")
        level += 1
        e = project_limit(y, level)
        node = next(v for v in e.nodes if v[:-1] == node)
        path.append(node)
    value = e.coeff(node)
    hom = HomDescriptor(level, (node,), (_scale(np, node),))
    if hom(y).is_zero():
        raise TheoremViolation("witness homomorphism kills the element")
    return TorsionlessWitness(hom, n_star, tuple(path), value, tuple(np.label(node).elements()))


# ---------------------------------------------------------------------------
# independence and stabilisation


def _branch_space(xs: Sequence[LimitElement]) -> list[Branch]:
    seen: dict = {}
    for x in xs:
        for b in x.branches:
            seen.setdefault(repr(b.key), b)
    return [seen[k] for k in sorted(seen)]


def _coords(x: LimitElement, space: Sequence[Branch]) -> list[Fraction]:
    d = {repr(b.key): c for b, c in x.support}
    return [d.get(repr(b.key), Fraction(0)) for b in space]


def independent_subset(xs: Sequence[LimitElement]) -> tuple[list[int], list[tuple[int, list[Fraction]]]]:
    """Indices kept by first-found pivoting, plus the dependencies of the dropped ones."""
    space = _branch_space(xs)
    kept: list[int] = []
    dropped: list[tuple[int, list[Fraction]]] = []
    for i, x in enumerate(xs):
        vecs = [_coords(xs[j], space) for j in kept]
        sol = solve_in_span(vecs, _coords(x, space))
        if sol is None:
            kept.append(i)
        else:
            dropped.append((i, sol))
    return kept, dropped


@dataclass(frozen=True)
class Stabilization:
    n_star: int
    k_star: int
    ranks: tuple[int, ...]
    kept: tuple[int, ...]


def level_rank(xs: Sequence[LimitElement], n: int) -> int:
    es = [project_limit(x, n) for x in xs]
    nodes = sorted({v for e in es for v in e.nodes})
    return rank([[e.coeff(v) for v in nodes] for e in es]) if nodes else 0


def stabilization_depth(np: NicePair | None, xs: Sequence[LimitElement], max_depth: int = ORACLE_HORIZON,
                        cancel=None) -> Stabilization:
    kept, _ = independent_subset(xs)
    ind = [xs[i] for i in kept]
    k_star = len(ind)
    if k_star == 0:
        return Stabilization(0, 0, (0,), ())
    h = separation_level(_branch_space(ind))
    if h > max_depth:
        raise StabilizationError(f"branches separate only at level {h}")
    ranks = []
    for n in range(h + 1):
        check_cancel(cancel)
        ranks.append(level_rank(ind, n))
    if ranks[-1] != k_star:
        raise TheoremViolation("level images of an independent set are dependent past separation")
    if any(a > b for a, b in zip(ranks, ranks[1:])):
        raise TheoremViolation("level ranks decreased")
    n_star = ranks.index(k_star)
    return Stabilization(n_star, k_star, tuple(ranks), tuple(kept))


# ---------------------------------------------------------------------------
# separability retraction


@dataclass
class RetractionCertificate:
    level: int
    nodes: tuple[Node, ...]
    scales: tuple[int, ...]
    kept: tuple[int, ...]
    basis: list[list[int]]  # Z-basis of the pure closure, in scaled node coordinates
    complement: list[list[int]]
    x_coords: list[list[int]]
    transcript: list[dict]
    k_star: int
    n_star: int
    branches: tuple = ()
    _proj: SummandProjection | None = field(default=None, repr=False)

    @property
    def hom(self) -> HomDescriptor:
        return HomDescriptor(self.level, self.nodes, self.scales)

    def basis_elements(self) -> list[LimitElement]:
        return [self.lift(row) for row in self.basis]

    def lift(self, coords: Sequence[int]) -> LimitElement:
        """Element of the limit with the given scaled coordinates on the chosen nodes."""
        terms = []
        for b, d, w in zip(self.branches, self.scales, coords):
            if w:
                terms.append((b, Fraction(w, d)))
        return LimitElement(tuple(terms))

    def retract(self, z: LimitElement) -> LimitElement:
        if self._proj is None:
            self._proj = SummandProjection(self.basis, len(self.nodes))
        w = self.hom.to_integer(z)
        return self.lift(self._proj(list(w)))

    def to_json(self) -> dict:
        return {
            "kind": "retraction",
            "level": self.level,
            "nodes": [list(v) for v in self.nodes],
            "n_star": self.n_star,
            "k_star": self.k_star,
            "kept": list(self.kept),
            "transcript": self.transcript,
            "verify": {
                "scales": list(self.scales),
                "basis": self.basis,
                "complement": self.complement,
                "x_coords": self.x_coords,
            },
        }


def separability_retraction(np: NicePair, xs: Sequence[LimitElement], limit: int = ORACLE_HORIZON,
                            cancel=None) -> RetractionCertificate:
    """Retraction onto the pure closure of ``xs`` through a free summand of a level group.

    The level is the first one past stabilisation where the branches of the
    independent part are separated and have all left ``S``; at that level
    the projection onto the nodes with finite label must keep full rank.
    """
    for x in xs:
        ok, why = validate_limit(np, x)
        if not ok:
            raise ValidationError(why)
    stab = stabilization_depth(np, xs, limit, cancel)
    ind = [xs[i] for i in stab.kept]
    if stab.k_star == 0:
        return RetractionCertificate(0, (), (), (), [], [], [[] for _ in xs], [], 0, 0)
    branches = _branch_space(ind)
    exits = []
    for b in branches:
        e = branch_exit(b, np.S, limit)
        if e is None:
            raise StabilizationError(f"branch {b!r} does not leave S below {limit}")
        exits.append(e)
    h = separation_level(branches)
    level = max(stab.n_star, h, max(exits))
    transcript = []
    for m in range(stab.n_star, level + 1):
        check_cancel(cancel)
        es = [project_limit(x, m) for x in ind]
        ym = sorted({v for e in es for v in e.nodes})
        ystar = [v for v in ym if np.label(v).is_finite]
        k_m = rank([[e.coeff(v) for v in ystar] for e in es]) if ystar else 0
        transcript.append({"level": m, "Y": [list(v) for v in ym], "Ystar": [list(v) for v in ystar], "rank": k_m})
    if transcript[-1]["rank"] != stab.k_star:
        raise TheoremViolation(
            f"rank on finite-label nodes is {transcript[-1]['rank']} but the pure closure has rank {stab.k_star}"
        )
    nodes = tuple(tuple(v) for v in transcript[-1]["Ystar"])
    scales = tuple(_scale(np, v) for v in nodes)
    hom = HomDescriptor(level, nodes, scales)
    rows = [list(hom.to_integer(x)) for x in ind]
    basis = saturate(rows, len(nodes))
    if len(basis) != stab.k_star or maximal_minors_gcd(basis) != 1:
        raise TheoremViolation("saturated image is not a rank-k direct summand")
    proj = SummandProjection(basis, len(nodes))
    through = {b.prefix(level): b for b in branches}
    cert = RetractionCertificate(
        level, nodes, scales, stab.kept, basis, proj.complement(),
        [list(hom.to_integer(x)) for x in xs], transcript, stab.k_star, stab.n_star,
        tuple(through[v] for v in nodes), proj,
    )
    for b in cert.basis_elements():
        ok, why = validate_limit(np, b)
        if not ok:
            raise TheoremViolation(f"basis element outside the group: {why}")
    for x in xs:
        if cert.retract(x) != x:
            raise TheoremViolation(f"retraction moves {x!r}")
    return cert


def random_limit_element(np: NicePair, rng: random.Random, max_terms: int = 3, max_stem: int = 3,
                         max_entry: int = 3) -> LimitElement:
    """Random nonzero combination of zero-tail branches with coefficients allowed by their labels."""
    from .trees import ZeroTail

    while True:
        terms = []
        for _ in range(rng.randint(1, max_terms)):
            stem = tuple(rng.randint(0, max_entry) for _ in range(rng.randint(0, max_stem)))
            if stem not in np.host:
                continue
            b = ZeroTail(stem)
            lab = np.limit_label(b)
            den = 1
            for p in lab.elements():
                if rng.random() < 0.5:
                    den *= p
            num = rng.choice([x for x in range(-6, 7) if x])
            terms.append((b, Fraction(num, den)))
        y = LimitElement(tuple(terms))
        if not y.is_zero():
            return y


# ---------------------------------------------------------------------------
# type obstructions


def primeset_json(s: PrimeSet) -> dict:
    from .codec import primeset_to_json

    return primeset_to_json(s)


@dataclass(frozen=True)
class ObstructionCertificate:
    kind: str
    level: int
    node: Node
    element: LevelElement
    evidence: dict

    def to_json(self) -> dict:
        from .codec import level_element_to_json

        return {
            "kind": self.kind,
            "level": self.level,
            "node": list(self.node),
            "element": level_element_to_json(self.element),
            "verify": self.evidence,
        }


@dataclass(frozen=True)
class NoObstruction:
    scanned: int
    reason: str

    def to_json(self) -> dict:
        return {"kind": "none", "scanned": self.scanned, "reason": self.reason}


def _root_set(np: NicePair) -> PrimeSet:
    lab = np.label(())
    if lab.is_finite:
        raise ValidationError("the source engine has a finite root label")
    return np.pstar


def surjection_obstruction(src: NicePair, dst: NicePair, sample: int = 8) -> ObstructionCertificate:
    """``x_root`` of ``src`` has type above anything in ``dst`` can reach.

    Every element of a level group of ``dst`` is divisible only by primes of
    ``P2`` plus finitely many others, so its type is bounded by infinite
    height on ``P2``; ``x_root`` of ``src`` is divisible by every prime of
    ``P1`` and ``P1 \\ P2`` is infinite.
    """
    p1, p2 = src.pstar, dst.pstar
    if p1.is_finite:
        raise ValidationError("source prime set must be infinite")
    if not almost_disjoint(p1, p2):
        raise ValidationError("prime sets are not almost disjoint")
    common = finite_intersection(p1, p2)
    a = LevelElement.basis(())
    char_a = Characteristic((), src.label(()), 1)
    bound = Characteristic((), p2, INF)
    cmp = compare_types(char_a, bound)
    if cmp.holds:
        raise TheoremViolation("no type obstruction between the two prime sets")
    diff = []
    k = 0
    while len(diff) < sample:
        q = p1.nth(k)
        if q not in p2:
            diff.append(q)
        k += 1
    evidence = {
        "claim": "type(a) not <= infinity on P2",
        "P1": primeset_json(p1),
        "P2": primeset_json(p2),
        "intersection": list(common),
        "difference_sample": diff,
        "a_label": "P1",
    }
    return ObstructionCertificate("surjection", 0, (), a, evidence)


def product_obstruction(np: NicePair, depth: int | None = None, sample: int = 8) -> ObstructionCertificate | NoObstruction:
    """A node whose label is infinite gives an element of nonzero type."""
    depth = np.truncation if depth is None else depth
    scanned = 0
    for n in range(depth + 1):
        for v in np.level_nodes(n):
            scanned += 1
            lab = np.label(v)
            if lab.is_finite:
                continue
            zero = Characteristic()
            cmp = compare_types(Characteristic((), lab, 1), zero)
            if cmp.holds:
                raise TheoremViolation("infinite label yet zero type")
            if isinstance(lab, TreePrimes) and v == ():
                lab_json = primeset_json(np.pstar)
            else:
                lab_json = {"kind": "opaque", "anchor": list(v)}
            divisors = []
            for k in range(4 * sample):
                if len(divisors) == sample:
                    break
                q = np.pstar.nth(k)
                if q in lab:
                    divisors.append(q)
            evidence = {
                "claim": "type(a) != 0",
                "label": lab_json,
                "divisor_sample": divisors,
            }
            return ObstructionCertificate("product", n, v, LevelElement.basis(v), evidence)
    return NoObstruction(scanned, "every scanned label is finite")


# ---------------------------------------------------------------------------
# independent verification from serialised evidence


def _branch_prime_iter(bits: str, period: str, count: int) -> list[int]:
    s = ""
    out = []
    for i in range(count):
        s += bits[i] if i < len(bits) else period[(i - len(bits)) % len(period)]
        out.append(nth_prime(int("1" + s, 2)))
    return out


def _member(doc: dict, q: int) -> bool:
    kind = doc["kind"]
    if kind == "finite":
        return q in doc["primes"]
    if kind == "residue":
        m, r = doc["modulus"], doc["residue"]
        from sympy import isprime

        return bool(isprime(q)) and q % m == r % m
    if kind == "branch":
        from sympy import isprime, primepi

        if not isprime(q):
            return False
        code = bin(int(primepi(q)) - 1)[2:]
        if len(code) < 2 or code[0] != "1":
            return False
        s = code[1:]
        bits, period = doc["bits"], doc["period"]
        return all(s[i] == (bits[i] if i < len(bits) else period[(i - len(bits)) % len(period)])
                   for i in range(len(s)))
    raise ValidationError(f"cannot verify membership for kind {kind!r}")


def _is_infinite(doc: dict) -> bool:
    return doc["kind"] in ("branch", "residue")


def _common_prefix(d1: dict, d2: dict) -> int | None:
    b1, p1, b2, p2 = d1["bits"], d1["period"], d2["bits"], d2["period"]
    horizon = max(len(b1), len(b2)) + len(p1) * len(p2)
    for i in range(horizon):
        x = b1[i] if i < len(b1) else p1[(i - len(b1)) % len(p1)]
        y = b2[i] if i < len(b2) else p2[(i - len(b2)) % len(p2)]
        if x != y:
            return i
    return None


def _check_almost_disjoint(d1: dict, d2: dict, listed: list[int]) -> str | None:
    for q in listed:
        if not (_member(d1, q) and _member(d2, q)):
            return f"listed prime {q} is not common"
    if d1["kind"] == "branch" and d2["kind"] == "branch":
        n = _common_prefix(d1, d2)
        if n is None:
            return "the two branch sets coincide"
        expect = sorted(_branch_prime_iter(d1["bits"], d1["period"], n))
        if sorted(listed) != expect:
            return "intersection list does not match the shared prefixes"
        return None
    if d1["kind"] == "residue" and d2["kind"] == "residue":
        m1, r1, m2, r2 = d1["modulus"], d1["residue"], d2["modulus"], d2["residue"]
        g = math.gcd(m1, m2)
        if m1 == 1 or m2 == 1 or (r1 - r2) % g == 0:
            return "residue classes overlap infinitely"
        return None
    for d in (d1, d2):
        if d["kind"] == "finite":
            return None
    return "mixed kinds: almost-disjointness not checkable"


def verify_certificate(doc: dict) -> tuple[bool, str]:
    """Re-check a serialised certificate using only its ``verify`` document."""
    kind = doc.get("kind")
    ev = doc.get("verify", {})
    if kind == "surjection":
        p1, p2 = ev["P1"], ev["P2"]
        if not _is_infinite(p1):
            return False, "P1 must be infinite"
        err = _check_almost_disjoint(p1, p2, ev["intersection"])
        if err:
            return False, err
        for q in ev["difference_sample"]:
            if not _member(p1, q) or _member(p2, q):
                return False, f"{q} is not in P1 minus P2"
        el = doc["element"]
        if el["level"] != 0 or el["support"] != [{"node": [], "coeff": "1"}]:
            return False, "element must be the root generator"
        # x_root is divisible once by every prime of P1 (its label); P1 minus P2 is
        # infinite since P1 is infinite and meets P2 finitely: infinitely many
        # primes where the source height (1) exceeds the target bound (0).
        return True, "infinite set P1 \\ P2 with height 1 against height 0"
    if kind == "product":
        lab = ev["label"]
        if not _is_infinite(lab):
            return False, "label is not certified infinite"
        for q in ev["divisor_sample"]:
            if not _member(lab, q):
                return False, f"{q} not in the label"
        return True, "infinitely many primes divide the element once"
    if kind == "retraction":
        basis, comp, xc = ev["basis"], ev["complement"], ev["x_coords"]
        k = len(basis)
        dim = len(doc["nodes"])
        if k != doc["k_star"]:
            return False, "basis size differs from k*"
        if k and len(basis) + len(comp) != dim:
            return False, "basis and complement do not fill the space"
        if k and abs(det(basis + comp)) != 1:
            return False, "basis plus complement is not unimodular"
        for row in xc:
            sol = solve_in_span(basis, row)
            if sol is None or any(c.denominator != 1 for c in sol):
                return False, "an element of X is not an integer combination of the basis"
        if k and rank(xc) != k:
            return False, "X does not span the basis rationally"
        return True, "free direct summand containing X"
    return False, f"unknown certificate kind {kind!r}"
