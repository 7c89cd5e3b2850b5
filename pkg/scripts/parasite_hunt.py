"""Throw many more Newton starts than usual at small instances and look for orbits beyond dim Sing_k."""

import argparse
import json
from dataclasses import asdict, dataclass

import numpy as np

from bethewronski import sweeps
from bethewronski.bethe_sl2 import MasterProblem, SolverConfig, generic_points, solve_orbits


@dataclass
class Config:
    seed: int = 1
    max_total: int = 6
    factor: int = 20  # multiplies the exhaustive start budget
    points: int = 2  # z draws per instance


def main(cfg: Config) -> dict:
    rng = np.random.default_rng(cfg.seed)
    solver = SolverConfig(seed=cfg.seed, exhaustive=True, exhaustive_factor=cfg.factor)
    report = {"config": asdict(cfg), "instances": 0, "starts": 0, "parasites": [], "deficits": []}
    for M in sweeps.compositions(3, 3, cfg.max_total, min_n=2):
        for k in range(1, min(3, sum(M) // 2) + 1):
            for _ in range(cfg.points):
                p = MasterProblem(M, generic_points(len(M), rng), k)
                res = solve_orbits(p, solver)
                report["instances"] += 1
                report["starts"] += res.starts_used
                entry = {"M": M, "k": k, "found": len(res.orbits), "expected": res.expected}
                if len(res.orbits) > res.expected:
                    report["parasites"].append(entry)
                elif len(res.orbits) < res.expected:
                    report["deficits"].append(entry)
    return report


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in asdict(Config()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    print(json.dumps(main(Config(**vars(ap.parse_args()))), indent=2))
