"""Run the rigidity detector on eps-grids of the unit square at increasing refinement."""
import argparse
import time
from dataclasses import dataclass

from medianspace import fixtures, rigidity_detect


@dataclass
class Config:
    max_level: int = 3  # refinements 2, 4, ..., 2**max_level
    base: str = "0,0"


def main(cfg: Config) -> None:
    for j in range(1, cfg.max_level + 1):
        level = 2 ** j
        S = fixtures.eps_grid(level)
        t0 = time.perf_counter()
        v = rigidity_detect(S, cfg.base)
        ok = v.verify(S)
        secs = time.perf_counter() - t0
        print(f"level {level:3d}  {S.n:4d} points  {v.verdict.name:<10} verified={ok}  {secs:.2f}s")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-level", type=int, default=Config.max_level)
    ap.add_argument("--base", default=Config.base)
    main(Config(**vars(ap.parse_args())))
