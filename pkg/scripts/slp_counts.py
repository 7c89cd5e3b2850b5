"""Table of sl_p singular-vector dimensions, Schubert bounds and solved orbit counts.

Non-dominant level counts are listed with a null bound and are not solved.
"""

import argparse
import json
from dataclasses import dataclass

import numpy as np

from bethewronski import sweeps
from bethewronski.schubert import slp_upper_bound
from bethewronski.slp_extension import SlpProblem, slp_dim_sing


@dataclass
class Config:
    seed: int = 3
    max_total: int = 4
    max_K: int = 3
    solve: bool = True


def main(cfg: Config) -> list:
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for M in sweeps.compositions(4, 4, cfg.max_total):
        for k1 in range(0, cfg.max_K + 1):
            for k2 in range(0, min(k1, cfg.max_K - k1) + 1):
                k = (k1, k2)
                kernel = slp_dim_sing(SlpProblem(3, M, tuple(range(len(M))), k))
                ok = sweeps.dominant(k, sum(M))
                bound = slp_upper_bound(M, k, p=3) if ok else None
                row = {"M": M, "k": k, "kernel": kernel, "bound": bound}
                if cfg.solve and ok and kernel:
                    _, res, attempts = sweeps.solve_slp_generic(M, k, rng, kernel)
                    row.update(orbits=len(res.orbits), attempts=attempts)
                rows.append(row)
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=Config.seed)
    ap.add_argument("--max-total", type=int, default=Config.max_total)
    ap.add_argument("--max-K", dest="max_K", type=int, default=Config.max_K)
    ap.add_argument("--no-solve", dest="solve", action="store_false")
    for row in main(Config(**vars(ap.parse_args()))):
        print(json.dumps(row))
