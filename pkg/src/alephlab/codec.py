"""JSON encodings for prime sets, characteristics, trees, elements and engines."""
from __future__ import annotations

from fractions import Fraction
from typing import Any

from .arith import (
    INF,
    BranchPrimes,
    Characteristic,
    FinitePrimes,
    IntersectionPrimes,
    PathPrimes,
    PrimeSet,
    ResiduePrimes,
    TreePrimes,
    UnionPrimes,
    as_fraction,
    fraction_str,
    intersection,
    union,
)
from .errors import ValidationError
from .trees import (
    ExplicitTree,
    LazyTree,
    OracleBranch,
    PeriodicBranch,
    Tree,
    ZeroTail,
    decreasing_tree,
    fan_tree,
    full_tree,
    staircase_tree,
    validate_tree,
)


# -- prime sets


def primeset_to_json(s: PrimeSet) -> dict:
    if isinstance(s, FinitePrimes):
        return {"kind": "finite", "primes": list(s.primes)}
    if isinstance(s, BranchPrimes):
        return {"kind": "branch", "bits": s.bits, "period": s.period}
    if isinstance(s, ResiduePrimes):
        return {"kind": "residue", "modulus": s.modulus, "residue": s.residue}
    if isinstance(s, TreePrimes):
        return {"kind": "subtree", "anchor": list(s.anchor), "base": primeset_to_json(s.base)}
    if isinstance(s, PathPrimes):
        return {"kind": "path", "branch": branch_to_json(s.branch), "base": primeset_to_json(s.base)}
    if isinstance(s, UnionPrimes):
        return {"kind": "union", "parts": [primeset_to_json(p) for p in s.parts]}
    if isinstance(s, IntersectionPrimes):
        return {"kind": "intersection", "parts": [primeset_to_json(p) for p in s.parts]}
    raise ValidationError(f"cannot encode {s!r}")


def primeset_from_json(d: dict) -> PrimeSet:
    kind = d.get("kind")
    if kind == "finite":
        return FinitePrimes(tuple(int(p) for p in d["primes"]))
    if kind == "branch":
        return BranchPrimes(str(d["bits"]), str(d["period"]))
    if kind == "residue":
        return ResiduePrimes(int(d["modulus"]), int(d["residue"]))
    if kind == "union":
        return union(*(primeset_from_json(p) for p in d["parts"]))
    if kind == "intersection":
        return intersection(*(primeset_from_json(p) for p in d["parts"]))
    raise ValidationError(f"cannot decode prime set of kind {kind!r} without an engine")


def _exp_json(e):
    return "inf" if e == INF else int(e)


def characteristic_to_json(c: Characteristic) -> dict:
    out = {
        "exceptional": {str(p): _exp_json(e) for p, e in c.exceptional},
        "support": primeset_to_json(c.support),
    }
    if c.support_exponent != 1:
        out["support_exponent"] = _exp_json(c.support_exponent)
    return out


def characteristic_from_json(d: dict) -> Characteristic:
    exc = tuple((int(p), e) for p, e in d.get("exceptional", {}).items())
    sup = primeset_from_json(d.get("support", {"kind": "finite", "primes": []}))
    return Characteristic(exc, sup, d.get("support_exponent", 1))


# -- trees and branches

_STOCK = {
    "full": lambda d: full_tree(d.get("width")),
    "staircase": lambda d: staircase_tree(),
    "fan": lambda d: fan_tree(),
    "decreasing": lambda d: decreasing_tree(int(d.get("top", 10))),
}


def tree_to_json(t: Tree) -> dict:
    if isinstance(t, ExplicitTree):
        return {"nodes": [list(v) for v in t.nodes]}
    name = getattr(t, "name", "")
    if name == "full":
        return {"stock": "full"}
    if name.startswith("full"):
        return {"stock": "full", "width": int(name[4:])}
    if name.startswith("decreasing"):
        return {"stock": "decreasing", "top": int(name[10:])}
    if name in ("staircase", "fan"):
        return {"stock": name}
    return {"stock": "opaque", "name": name}


def tree_from_json(d: dict, validate: bool = True) -> Tree:
    if "nodes" in d:
        t = ExplicitTree(tuple(v) for v in d["nodes"])
        if validate:
            res = validate_tree(t)
            if not res:
                where = "" if res.node is None else f" at {list(res.node)}"
                raise ValidationError(f"invalid tree{where}: {res.reason}")
        return t
    stock = d.get("stock")
    if stock in _STOCK:
        return _STOCK[stock](d)
    raise ValidationError(f"unknown tree description {d!r}")


def branch_to_json(b) -> dict:
    if isinstance(b, PeriodicBranch):
        if b.is_zerotail:
            return {"kind": "zerotail", "stem": list(b.stem)}
        return {"kind": "periodic", "stem": list(b.stem), "period": list(b.period)}
    if isinstance(b, OracleBranch):
        return {"kind": "oracle", "tag": b.tag}
    raise ValidationError(f"cannot encode branch {b!r}")


def branch_from_json(d: dict):
    kind = d.get("kind")
    if kind == "zerotail":
        return ZeroTail(tuple(d["stem"]))
    if kind == "periodic":
        return PeriodicBranch(tuple(d["stem"]), tuple(d["period"]))
    raise ValidationError(f"cannot decode branch kind {kind!r}")


# -- elements


def level_element_to_json(e) -> dict:
    return {"level": e.level, "support": [{"node": list(v), "coeff": fraction_str(c)} for v, c in e.support]}


def level_element_from_json(d: dict):
    from .levels import LevelElement

    return LevelElement(int(d["level"]), tuple((tuple(t["node"]), as_fraction(t["coeff"])) for t in d["support"]))


def limit_element_to_json(y) -> dict:
    return {"support": [{"branch": branch_to_json(b), "coeff": fraction_str(c)} for b, c in y.support]}


def limit_element_from_json(d: dict):
    from .engine import LimitElement

    if "support" not in d:
        raise ValidationError("limit element needs a support list")
    return LimitElement(tuple((branch_from_json(t["branch"]), as_fraction(t["coeff"])) for t in d["support"]))


# -- engines


def engine_to_json(np) -> dict:
    kind = getattr(np, "name", "")
    if kind == "G_P":
        return {"kind": "GP", "pstar": primeset_to_json(np.pstar), "S": tree_to_json(np.S),
                "truncation": np.truncation}
    if kind == "G_A" and hasattr(np, "source_tree"):
        out = {"kind": "GA", "a": tree_to_json(np.source_tree), "truncation": np.truncation}
        if getattr(np, "source_branch", None) is not None:
            out["branch"] = branch_to_json(np.source_branch)
        return out
    if not isinstance(np.S, ExplicitTree):
        raise ValidationError("only explicit S can be encoded as a prime table")
    return {
        "tree": tree_to_json(np.host),
        "S": tree_to_json(np.S),
        "primes": [{"node": list(v), "p": np.prime_of(v)} for v in np.S.nodes],
        "truncation": np.truncation,
    }


def engine_from_json(d: dict):
    from .engine import NicePair, make_GA, make_GP

    trunc = int(d.get("truncation", 6))
    kind = d.get("kind", "table")
    if kind == "GP":
        s = tree_from_json(d["S"]) if "S" in d else None
        return make_GP(primeset_from_json(d["pstar"]), s, truncation=trunc)
    if kind == "GA":
        a = tree_from_json(d["a"])
        b = branch_from_json(d["branch"]) if "branch" in d else None
        return make_GA(a, b, truncation=trunc)
    S = tree_from_json(d["S"])
    if not isinstance(S, ExplicitTree):
        raise ValidationError("a prime table needs an explicit S")
    table = {}
    for entry in d["primes"]:
        v = tuple(entry["node"])
        if v in table:
            raise ValidationError(f"node {list(v)} assigned twice")
        table[v] = int(entry["p"])
    missing = [v for v in S.nodes if v not in table]
    if missing:
        raise ValidationError(f"no prime for node {list(missing[0])}")
    host = tree_from_json(d["tree"]) if "tree" in d else full_tree(S.width + 1)
    return NicePair(S, table, host=host, truncation=trunc)


# -- permutations


def permutation_to_json(bound: int, mapping: dict[int, int]) -> dict:
    return {"bound": bound, "map": [[k, v] for k, v in sorted(mapping.items()) if k != v]}


def permutation_from_json(d: dict) -> tuple[int, dict[int, int]]:
    return int(d["bound"]), {int(k): int(v) for k, v in d["map"]}


def dumps(obj: Any) -> str:
    import json

    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def _default(o):
    if isinstance(o, Fraction):
        return fraction_str(o)
    if isinstance(o, tuple):
        return list(o)
    if o == INF:
        return "inf"
    raise TypeError(f"not JSON serialisable: {o!r}")
