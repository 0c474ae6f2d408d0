"""Print compactness profiles of grids and weighted-star truncations side by side.

Grids stay bounded as eps shrinks; the star counts grow like 1/eps.
"""
import argparse
from dataclasses import dataclass, field
from fractions import Fraction

from medianspace import compactness_profile, fixtures


@dataclass
class Config:
    grids: list[int] = field(default_factory=lambda: [4, 8, 16])
    stars: list[int] = field(default_factory=lambda: [10, 20, 40, 100])
    eps: list[Fraction] = field(default_factory=lambda: [Fraction(1, 100), Fraction(1, 10),
                                                          Fraction(1, 2), Fraction(1)])


def main(cfg: Config) -> None:
    header = "space".ljust(20) + "".join(f"N({e})".rjust(10) for e in cfg.eps)
    print(header)
    rows = [(f"grid:{k}", fixtures.grid(k)) for k in cfg.grids]
    rows += [(f"weighted_star:{K}", fixtures.weighted_star(K)) for K in cfg.stars]
    for name, S in rows:
        prof = compactness_profile(S, S.points, cfg.eps)
        print(name.ljust(20) + "".join(str(prof.N(e)).rjust(10) for e in cfg.eps))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grids", type=int, nargs="+", default=Config().grids)
    ap.add_argument("--stars", type=int, nargs="+", default=Config().stars)
    ap.add_argument("--eps", type=Fraction, nargs="+", default=Config().eps)
    main(Config(**vars(ap.parse_args())))
