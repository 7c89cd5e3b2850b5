"""Fuchsian normal forms (A, B, C) and exponents at 0 and 1 for exact two-point planes."""

import argparse
from dataclasses import dataclass

from bethewronski.slp_extension import ReductionFailed, exponents, fuchsian_instance, fuchsian_reduce


@dataclass
class Config:
    max_p: int = 4
    max_m: int = 3


def main(cfg: Config) -> None:
    print(f"{'p':>2} {'m1':>3} {'m2':>3} {'k1':>3}  {'A':>6} {'B':>6} {'C':>6}  exp@0          exp@1")
    for p in range(2, cfg.max_p + 1):
        for m1 in range(1, cfg.max_m + 1):
            for m2 in range(1, cfg.max_m + 1):
                for k1 in range(0, min(m1, m2) + 1):
                    V = fuchsian_instance(p, m1, m2, k1)
                    if V is None:
                        continue
                    try:
                        f = fuchsian_reduce(V)
                    except ReductionFailed as exc:
                        print(f"{p:>2} {m1:>3} {m2:>3} {k1:>3}  reduction failed: {exc}")
                        continue
                    e0, e1 = exponents(f, 0), exponents(f, 1)
                    print(f"{p:>2} {m1:>3} {m2:>3} {k1:>3}  {str(f.A):>6} {str(f.B):>6} {str(f.C):>6}  "
                          f"{str(e0):<14} {e1}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-p", type=int, default=Config.max_p)
    ap.add_argument("--max-m", type=int, default=Config.max_m)
    main(Config(**vars(ap.parse_args())))
