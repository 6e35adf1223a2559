"""Command line entry point: ``aleph-lab <group> <action> [options]``.

Every command prints a JSON report (schema ``aleph-lab/1``).  Exit status is
0 when every check passes, 1 when a check fails, 2 on invalid input and 3
when a runtime assertion backed by a theorem fails.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import codec
from .arith import almost_disjoint_family, first_primes, intersection_certificate
from .engine import (
    bonding_laws,
    homogeneity_witness,
    make_GA,
    make_GP,
    np1,
    validate_limit,
    validate_nice_pair,
)
from .errors import AlephError, StabilizationError, TheoremViolation, UndecidableQuery, ValidationError
from .trees import wellfounded_check

SCHEMA = "aleph-lab/1"


class Report:
    def __init__(self, command: str, inputs: dict, seed: int | None):
        self.command = command
        self.inputs = inputs
        self.seed = seed
        self.checks: list[dict] = []
        self.result: dict = {}
        self.timings: dict[str, float] = {}

    def check(self, name: str, ok: bool, reproducer=None, **info):
        row = {"name": name, "ok": bool(ok), **info}
        if not ok and reproducer is not None:
            row["reproducer"] = reproducer
        self.checks.append(row)
        return ok

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def to_json(self, with_timings: bool) -> dict:
        digest = hashlib.sha256(json.dumps(self.inputs, sort_keys=True).encode()).hexdigest()
        out = {
            "schema": SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "inputs_digest": digest,
            "seed": self.seed,
            "checks": sorted(self.checks, key=lambda c: c["name"]),
            "result": self.result,
            "ok": self.ok,
        }
        if with_timings:
            out["timings"] = self.timings
        return out


# -- input helpers


def _load(path: str | None):
    if path is None:
        return None
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ValidationError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None


def parse_primes(spec: str | None, default: int) -> tuple[int, ...]:
    """``first:N`` or a comma separated list."""
    if spec is None:
        return first_primes(default)
    if spec.startswith("first:"):
        try:
            n = int(spec[6:])
        except ValueError:
            raise ValidationError(f"bad prime spec {spec!r}") from None
        if n < 0:
            raise ValidationError("prime count must be nonnegative")
        return first_primes(n)
    try:
        return tuple(int(x) for x in spec.split(",") if x.strip())
    except ValueError:
        raise ValidationError(f"bad prime spec {spec!r}") from None


def _engine(args):
    doc = _load(getattr(args, "engine", None) or getattr(args, "file", None))
    if doc is None:
        return np1(truncation=args.truncation), {"engine": "NP1"}
    if "truncation" not in doc:
        doc = {**doc, "truncation": args.truncation}
    try:
        return codec.engine_from_json(doc), {"engine": doc}
    except KeyError as exc:
        raise ValidationError(f"engine description lacks {exc}") from None


def _need_seed(args) -> int:
    if args.seed is None:
        raise ValidationError("--seed is required for randomized checks")
    return args.seed


def _limit_elements(doc) -> list:
    if isinstance(doc, dict) and "elements" in doc:
        doc = doc["elements"]
    if isinstance(doc, dict):
        doc = [doc]
    if not isinstance(doc, list):
        raise ValidationError("expected a limit element or a list of them")
    return [codec.limit_element_from_json(d) for d in doc]


# -- commands


def cmd_engine_build(args, rep: Report):
    np, desc = _engine(args)
    rep.inputs.update(desc)
    levels = []
    for n in range(args.depth + 1):
        nodes = []
        for v in np.level_nodes(n):
            lab = np.label(v)
            nodes.append({"node": list(v), "label": codec.primeset_to_json(lab) if not lab.is_finite
                          else {"kind": "finite", "primes": list(lab.elements())}})
        levels.append({"level": n, "nodes": nodes})
    rep.result = {"levels": levels}
    rep.check("engine.valid", bool(validate_nice_pair(np, args.depth)))


def cmd_engine_check(args, rep: Report):
    np, desc = _engine(args)
    rep.inputs.update(desc)
    res = validate_nice_pair(np, args.depth)
    if not res:
        raise ValidationError(f"clause {res.clause} fails at {res.node}: {res.reason}")
    laws = bonding_laws(np, min(args.depth, np.truncation), random.Random(args.seed or 0))
    for name, ok in laws.items():
        rep.check(name, ok)
    rep.check("nice_pair", True)


def cmd_witness_torsionless(args, rep: Report):
    from .witnesses import torsionless_witness

    np, desc = _engine(args)
    ys = _limit_elements(_load(args.element))
    rep.inputs.update(desc, element=[codec.limit_element_to_json(y) for y in ys])
    out = []
    for i, y in enumerate(ys):
        w = torsionless_witness(np, y)
        img = w.hom(y)
        rep.check(f"nonzero_image.{i}", not img.is_zero())
        rep.check(f"finite_label.{i}", np.label(w.node).is_finite)
        out.append({
            "hom": {"level": w.hom.level, "nodes": [list(v) for v in w.hom.nodes], "scales": list(w.hom.scales)},
            "n_star": w.n_star,
            "path": [list(v) for v in w.path],
            "value": codec.fraction_str(w.value),
            "label": list(w.label),
            "integer_image": list(w.hom.to_integer(y)),
        })
    rep.result = {"witnesses": out}


def cmd_witness_retract(args, rep: Report):
    from .witnesses import random_limit_element, separability_retraction, verify_certificate

    np, desc = _engine(args)
    xs = _limit_elements(_load(args.element))
    rep.inputs.update(desc, elements=[codec.limit_element_to_json(x) for x in xs])
    seed = args.seed or 0
    rep.seed = seed
    cert = separability_retraction(np, xs)
    doc = cert.to_json()
    for i, x in enumerate(xs):
        rep.check(f"fixes.{i}", cert.retract(x) == x, reproducer=codec.limit_element_to_json(x))
    rng = random.Random(seed)
    for i in range(args.probes):
        z = random_limit_element(np, rng)
        r = cert.retract(z)
        rep.check(f"idempotent.{i}", cert.retract(r) == r, reproducer=codec.limit_element_to_json(z))
    ok, why = verify_certificate(json.loads(json.dumps(doc)))
    rep.check("certificate", ok, reason=why)
    rep.result = {"certificate": doc}


def _family_engine(spec: str, args, count: int):
    try:
        idx = [int(x) for x in spec.split(",")]
    except ValueError:
        raise ValidationError(f"bad family index list {spec!r}") from None
    if len(idx) != count or min(idx) < 0:
        raise ValidationError(f"expected {count} nonnegative family indices, got {spec!r}")
    fam = almost_disjoint_family(max(idx) + 1)
    return [make_GP(fam[i], truncation=args.truncation) for i in idx]


def cmd_obstruct_surjection(args, rep: Report):
    from .witnesses import surjection_obstruction, verify_certificate

    if args.pair:
        src, dst = _family_engine(args.pair, args, 2)
        rep.inputs["pair"] = args.pair
    else:
        d1, d2 = _load(args.p1), _load(args.p2)
        if d1 is None or d2 is None:
            raise ValidationError("give --pair i,j or both --p1 and --p2")
        src = make_GP(codec.primeset_from_json(d1), truncation=args.truncation)
        dst = make_GP(codec.primeset_from_json(d2), truncation=args.truncation)
        rep.inputs.update(p1=d1, p2=d2)
    cert = surjection_obstruction(src, dst)
    doc = json.loads(json.dumps(cert.to_json()))
    ok, why = verify_certificate(doc)
    rep.check("verified", ok, reason=why)
    rep.result = {"certificate": doc}


def cmd_obstruct_product(args, rep: Report):
    from .witnesses import product_obstruction, verify_certificate

    if args.pair:
        (np,) = _family_engine(args.pair, args, 1)
        rep.inputs["pair"] = args.pair
    else:
        np, desc = _engine(args)
        rep.inputs.update(desc)
    cert = product_obstruction(np, args.depth)
    doc = json.loads(json.dumps(cert.to_json()))
    if doc["kind"] == "none":
        rep.result = {"certificate": doc}
        rep.check("obstruction_found", False, reproducer=rep.inputs)
        return
    ok, why = verify_certificate(doc)
    rep.check("verified", ok, reason=why)
    rep.result = {"certificate": doc}


def _bezout(args, rep: Report):
    from .pathologies import build_bezout_tree

    primes = parse_primes(args.primes, args.depth + 1)
    rep.inputs.update(depth=args.depth, primes=list(primes))
    return build_bezout_tree(primes, args.depth)


def cmd_bezout_build(args, rep: Report):
    t = _bezout(args, rep)
    rep.result = t.to_json()
    rep.check("built", True)


def cmd_bezout_verify(args, rep: Report):
    from .pathologies import verify_bezout

    t = _bezout(args, rep)
    res = verify_bezout(t)
    if res:
        rep.check("clauses", True, nodes=res.nodes_checked)
    else:
        rep.check("clauses", False, reproducer={"node": list(res.node), "clause": res.clause}, detail=res.detail)
    rep.result = t.to_json()


def cmd_bezout_limit(args, rep: Report):
    from .pathologies import bezout_limit_element, verify_bezout

    t = _bezout(args, rep)
    res = verify_bezout(t)
    rep.check("clauses", bool(res))
    r = bezout_limit_element(t)
    for n, ok in enumerate(r.coherence):
        rep.check(f"coherence.{n + 1}->{n}", ok)
    for n, ok in enumerate(r.divisibility):
        rep.check(f"divisibility.{n}", ok, reproducer={"level": n})
    for n, ok in enumerate(r.full_divisibility):
        rep.check(f"full_divisibility.{n}", ok, reproducer={"level": n})
    rep.result = r.to_json()


def cmd_pontryagin_check(args, rep: Report):
    from .pathologies import brute_force_member, check_gstar, gstar_level, pontryagin_make

    seed = _need_seed(args)
    primes = parse_primes(args.primes, 6)
    g = pontryagin_make(primes, seed=seed)
    rep.inputs.update(primes=list(primes), samples=args.samples)
    rng = random.Random(seed)
    dens = [1] + list(primes) + [primes[i] * primes[j] for i in range(len(primes)) for j in range(i)] + [4, 9]
    bad = []
    for _ in range(args.samples):
        z = (Fraction(rng.randint(-40, 40), rng.choice(dens)), Fraction(rng.randint(-40, 40), rng.choice(dens)))
        if g.contains(z) != brute_force_member(g, z):
            bad.append([str(z[0]), str(z[1])])
    rep.check("membership_vs_brute_force", not bad, reproducer=bad[:3])
    rep.check("generators", all(g.contains(g.generator(p)) for p in primes))
    rep.check("x0_not_divisible", not any(g.divisible_by((1, 0), p) for p in primes))
    chain = []
    for n in range(len(primes) + 1):
        fd = gstar_level(g, n)
        c = check_gstar(fd, g)
        rep.check(f"gstar.{n}", c["unimodular"] and c["generators_in_span"] and c["basis_in_K"])
        chain.append({"n": n, "basis": [[str(x) for x in b] for b in fd.basis], "index": fd.index})
    incl = all(gstar_level(g, n + 1).contains(b) for n in range(len(primes)) for b in gstar_level(g, n).basis)
    rep.check("gstar_chain_increasing", incl)
    rep.result = {"group": g.to_json(), "chain": chain}


def _mixed(args, rep: Report):
    from .pathologies import MixedBounds, mixed_system_build, pontryagin_make

    seed = _need_seed(args)
    primes = parse_primes(args.primes, max(args.levels, 3))
    g = pontryagin_make(primes, seed=seed)
    bounds = MixedBounds(args.levels, args.summands, args.enumeration)
    rep.inputs.update(primes=list(primes), levels=args.levels, summands=args.summands,
                      enumeration=args.enumeration)
    return mixed_system_build(g, bounds)


def _mixed_json(ms) -> dict:
    return {
        "widths": ms.widths,
        "cores": [[[str(x) for x in b] for b in fd.basis] for fd in ms.cores],
        "enumerations": [[[str(x) for x in e] for e in en] for en in ms.enums],
    }


def cmd_mixed_build(args, rep: Report):
    ms = _mixed(args, rep)
    rep.result = _mixed_json(ms)
    rep.check("built", True)


def cmd_mixed_check(args, rep: Report):
    from .pathologies import case_one_projection, check_mixed

    ms = _mixed(args, rep)
    rng = random.Random(args.seed)
    for name, ok in check_mixed(ms, rng).items():
        rep.check(name, ok)
    z = ms.random_element(ms.levels - 1, rng)
    rep.result = {**_mixed_json(ms), "case_one": case_one_projection(ms, z)}


def _sinfty_system(args, rep: Report):
    from .sinfty import engine_coordinates

    np, desc = _engine(args)
    rep.inputs.update(desc)
    return np, engine_coordinates(np)


def cmd_sinfty_encode(args, rep: Report):
    from .sinfty import encode_element

    np, system = _sinfty_system(args, rep)
    ys = _limit_elements(_load(args.element))
    rep.inputs.update(bound=args.bound, element=[codec.limit_element_to_json(y) for y in ys])
    perms = []
    for i, y in enumerate(ys):
        ok, why = validate_limit(np, y)
        if not ok:
            raise ValidationError(why)
        p = encode_element(y, system, args.bound)
        perms.append(p.to_json())
        rep.check(f"encoded.{i}", True)
    rep.result = {"permutations": perms, "dims": list(system.coding.dims)}


def cmd_sinfty_verify(args, rep: Report):
    from .sinfty import verify_embedding
    from .witnesses import random_limit_element

    seed = _need_seed(args)
    np, system = _sinfty_system(args, rep)
    rep.inputs.update(bound=args.bound, pairs=args.pairs)
    rng = random.Random(seed)
    failures = 0
    for i in range(args.pairs):
        y, z = random_limit_element(np, rng), random_limit_element(np, rng)
        r = verify_embedding(y, z, system, args.bound)
        if not r.ok:
            failures += 1
            rep.check(f"pair.{i}", False, reproducer={"y": codec.limit_element_to_json(y),
                                                      "z": codec.limit_element_to_json(z)})
    rep.check("all_pairs", failures == 0, failed=failures)
    rep.result = {"pairs": args.pairs, "coded_points": len(system.coding.coded_points(args.bound))}


def cmd_reduce_from_tree(args, rep: Report):
    doc = _load(args.file)
    if doc is None:
        raise ValidationError("--file with a tree description is required")
    a = codec.tree_from_json(doc)
    branch = codec.branch_from_json(_load(args.branch)) if args.branch else None
    rep.inputs.update(tree=doc, branch=None if branch is None else codec.branch_to_json(branch))
    np = make_GA(a, branch, truncation=args.truncation)
    rep.check("nice_pair", bool(validate_nice_pair(np, min(args.depth, 3))))
    S = [{"node": list(v), "p": np.prime_of(v)} for v in np.S.nodes_upto(args.depth, 4)]
    rep.result = {"S": S}
    if np.declared_branch is not None:
        cert = homogeneity_witness(np, np.declared_branch, args.depth)
        rep.check("homogeneity", bool(cert))
        if cert:
            rep.result["divisors"] = list(cert.primes)
    else:
        wf = wellfounded_check(a, args.depth)
        rep.result["wellfounded"] = type(wf).__name__


def cmd_family_almost_disjoint(args, rep: Report):
    fam = almost_disjoint_family(args.count)
    rep.inputs["count"] = args.count
    sets = [codec.primeset_to_json(s) for s in fam]
    pairs = []
    for i in range(len(fam)):
        for j in range(i + 1, len(fam)):
            cert = intersection_certificate(fam[i], fam[j])
            pairs.append({"i": i, "j": j, "intersection": list(cert.primes)})
    from .witnesses import _check_almost_disjoint

    for row in pairs:
        err = _check_almost_disjoint(sets[row["i"]], sets[row["j"]], row["intersection"])
        rep.check(f"pair.{row['i']}.{row['j']}", err is None, reproducer=row)
    rep.result = {"sets": sets, "pairs": pairs}


COMMANDS: dict[tuple[str, str], Callable] = {
    ("engine", "build"): cmd_engine_build,
    ("engine", "check"): cmd_engine_check,
    ("witness", "torsionless"): cmd_witness_torsionless,
    ("witness", "retract"): cmd_witness_retract,
    ("obstruct", "surjection"): cmd_obstruct_surjection,
    ("obstruct", "product"): cmd_obstruct_product,
    ("bezout", "build"): cmd_bezout_build,
    ("bezout", "verify"): cmd_bezout_verify,
    ("bezout", "limit"): cmd_bezout_limit,
    ("pontryagin", "check"): cmd_pontryagin_check,
    ("mixed", "build"): cmd_mixed_build,
    ("mixed", "check"): cmd_mixed_check,
    ("sinfty", "encode"): cmd_sinfty_encode,
    ("sinfty", "verify"): cmd_sinfty_verify,
    ("reduce", "from-tree"): cmd_reduce_from_tree,
    ("family", "almost-disjoint"): cmd_family_almost_disjoint,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=4)
    common.add_argument("--truncation", type=int, default=6)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--json-out", default=None)
    common.add_argument("--timings", action="store_true", help="include wall-clock timings (not reproducible)")
    common.add_argument("--file", default=None)
    common.add_argument("--engine", default=None)
    common.add_argument("--element", default=None)
    common.add_argument("--primes", default=None, help="first:N or a comma separated list")
    common.add_argument("--bound", type=int, default=10_000)
    common.add_argument("--pairs", type=int, default=100)
    common.add_argument("--samples", type=int, default=200)
    common.add_argument("--probes", type=int, default=20)
    common.add_argument("--levels", type=int, default=3)
    common.add_argument("--summands", type=int, default=3)
    common.add_argument("--enumeration", type=int, default=3)
    common.add_argument("--count", type=int, default=4)
    common.add_argument("--pair", default=None, help="indices into the stock almost disjoint family (i,j or a single i)")
    common.add_argument("--p1", default=None)
    common.add_argument("--p2", default=None)
    common.add_argument("--branch", default=None)

    parser = argparse.ArgumentParser(prog="aleph-lab", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True)
    actions: dict[str, argparse._SubParsersAction] = {}
    for group, action in COMMANDS:
        if group not in actions:
            actions[group] = groups.add_parser(group).add_subparsers(dest="action", required=True)
        actions[group].add_parser(action, parents=[common])
    return parser


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    rep = Report(f"{args.group} {args.action}", {}, args.seed)
    start = time.perf_counter()
    try:
        COMMANDS[(args.group, args.action)](args, rep)
        code = 0 if rep.ok else 1
    except (ValidationError, UndecidableQuery, StabilizationError) as exc:
        print(f"aleph-lab: {exc}", file=sys.stderr)
        rep.result = {"error": str(exc), "type": type(exc).__name__}
        rep.check("input", False, reproducer=rep.inputs)
        code = 2
    except TheoremViolation as exc:
        print(f"aleph-lab: assertion failed: {exc}", file=sys.stderr)
        rep.result = {"error": str(exc), "type": "TheoremViolation"}
        rep.check("assertion", False, reproducer=rep.inputs)
        code = 3
    except AlephError as exc:
        print(f"aleph-lab: {exc}", file=sys.stderr)
        rep.result = {"error": str(exc), "type": type(exc).__name__}
        rep.check("input", False)
        code = 2
    rep.timings["total_s"] = round(time.perf_counter() - start, 4)
    text = codec.dumps(rep.to_json(args.timings))
    if args.json_out:
        Path(args.json_out).write_text(text)
    out.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
