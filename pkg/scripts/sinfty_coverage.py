"""How many coded points fall below the bound, and what one embedding check costs."""

import argparse
import json
import random
import time
from dataclasses import asdict, dataclass

from alephlab.engine import np1
from alephlab.pathologies import mixed_system_build, pontryagin_make
from alephlab.sinfty import engine_coordinates, mixed_coordinates, verify_embedding
from alephlab.witnesses import random_limit_element


@dataclass
class Config:
    bounds: str = "100,1000,10000,100000"
    pairs: int = 20
    seed: int = 0


def run(cfg: Config) -> dict:
    rng = random.Random(cfg.seed)
    np = np1()
    ms = mixed_system_build(pontryagin_make((2, 3, 5), seed=cfg.seed))
    sources = {
        "engine": (engine_coordinates(np), lambda: random_limit_element(np, rng)),
        "mixed": (mixed_coordinates(ms), lambda: ms.random_element(ms.levels - 1, rng)),
    }
    rows = []
    for bound in (int(b) for b in cfg.bounds.split(",")):
        for name, (system, draw) in sources.items():
            t0 = time.perf_counter()
            bad = sum(not verify_embedding(draw(), draw(), system, bound).ok for _ in range(cfg.pairs))
            rows.append({
                "source": name,
                "bound": bound,
                "coded_points": len(system.coding.coded_points(bound)),
                "failures": bad,
                "seconds_per_pair": round((time.perf_counter() - t0) / cfg.pairs, 5),
            })
    return {"config": asdict(cfg), "rows": rows}


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in asdict(Config()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    print(json.dumps(run(Config(**vars(ap.parse_args()))), indent=2))
