"""Distribution of witness levels, stabilisation depths and retraction ranks on random inputs."""

import argparse
import json
import random
from collections import Counter
from dataclasses import asdict, dataclass

from alephlab.engine import RandomPairConfig, random_nice_pair
from alephlab.errors import TheoremViolation
from alephlab.witnesses import random_limit_element, separability_retraction, torsionless_witness


@dataclass
class Config:
    engines: int = 200
    max_set: int = 4
    probes: int = 20
    max_nodes: int = 8
    seed: int = 0


def run(cfg: Config) -> dict:
    rng = random.Random(cfg.seed)
    witness_levels, path_lengths = Counter(), Counter()
    ranks, retraction_levels = Counter(), Counter()
    violations = []
    for i in range(cfg.engines):
        np = random_nice_pair(rng, RandomPairConfig(max_nodes=cfg.max_nodes))
        y = random_limit_element(np, rng)
        w = torsionless_witness(np, y)
        witness_levels[w.level] += 1
        path_lengths[len(w.path)] += 1
        xs = [random_limit_element(np, rng) for _ in range(rng.randint(1, cfg.max_set))]
        try:
            cert = separability_retraction(np, xs)
        except TheoremViolation as exc:
            violations.append({"index": i, "error": str(exc)})
            continue
        ranks[cert.k_star] += 1
        retraction_levels[cert.level] += 1
        for _ in range(cfg.probes):
            r = cert.retract(random_limit_element(np, rng))
            if cert.retract(r) != r:
                violations.append({"index": i, "error": "not idempotent"})
                break
    return {
        "config": asdict(cfg),
        "witness_levels": dict(sorted(witness_levels.items())),
        "path_lengths": dict(sorted(path_lengths.items())),
        "k_star": dict(sorted(ranks.items())),
        "retraction_levels": dict(sorted(retraction_levels.items())),
        "violations": violations,
    }


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in asdict(Config()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    print(json.dumps(run(Config(**vars(ap.parse_args()))), indent=2))
