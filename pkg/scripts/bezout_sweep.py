"""Sweep Bezout-tree depth and prime order; report sizes, timings and exhaustion rate."""

import argparse
import json
import random
import time
from dataclasses import asdict, dataclass

from alephlab.arith import first_primes
from alephlab.errors import ValidationError
from alephlab.pathologies import bezout_limit_element, build_bezout_tree, verify_bezout


@dataclass
class Config:
    max_depth: int = 12
    primes: int = 13
    shuffles: int = 50
    seed: int = 0


def run(cfg: Config) -> dict:
    primes = first_primes(cfg.primes)
    rows = []
    for depth in range(cfg.max_depth + 1):
        t0 = time.perf_counter()
        t = build_bezout_tree(primes, depth)
        ok = bool(verify_bezout(t))
        lim = bezout_limit_element(t)
        rows.append({
            "depth": depth,
            "nodes": len(t.nodes),
            "level_primes": list(t.level_primes),
            "max_digits": max(len(str(abs(r.a))) for r in t.nodes.values()),
            "verified": ok,
            "limit_ok": lim.ok,
            "seconds": round(time.perf_counter() - t0, 4),
        })
    # how often does a shuffled prime list run dry before the target depth?
    rng = random.Random(cfg.seed)
    dry = 0
    for _ in range(cfg.shuffles):
        order = list(primes)
        rng.shuffle(order)
        try:
            build_bezout_tree(order, cfg.max_depth)
        except ValidationError:
            dry += 1
    return {"config": asdict(cfg), "depths": rows, "shuffled_exhausted": dry}


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in asdict(Config()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    print(json.dumps(run(Config(**vars(ap.parse_args()))), indent=2))
