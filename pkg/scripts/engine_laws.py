"""Bonding-map laws over many random nice pairs, with size statistics."""

import argparse
import json
import random
import statistics
import time
from dataclasses import asdict, dataclass

from alephlab.engine import RandomPairConfig, bonding_laws, random_nice_pair


@dataclass
class Config:
    pairs: int = 200
    max_nodes: int = 8
    truncation: int = 6
    samples: int = 4
    seed: int = 0


def run(cfg: Config) -> dict:
    rng = random.Random(cfg.seed)
    pcfg = RandomPairConfig(max_nodes=cfg.max_nodes, truncation=cfg.truncation)
    failures, sizes, times = [], [], []
    for i in range(cfg.pairs):
        np = random_nice_pair(rng, pcfg)
        t0 = time.perf_counter()
        laws = bonding_laws(np, rng=rng, samples=cfg.samples)
        times.append(time.perf_counter() - t0)
        sizes.append(len(np.S.nodes))
        bad = sorted(k for k, v in laws.items() if not v)
        if bad:
            failures.append({"index": i, "S": [list(v) for v in np.S.nodes], "failed": bad})
    return {
        "config": asdict(cfg),
        "failures": failures,
        "mean_S_size": statistics.mean(sizes),
        "mean_seconds": round(statistics.mean(times), 4),
        "max_seconds": round(max(times), 4),
    }


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in asdict(Config()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    print(json.dumps(run(Config(**vars(ap.parse_args()))), indent=2))
