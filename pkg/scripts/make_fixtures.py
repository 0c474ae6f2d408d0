"""Write the fixture corpus (and optional random spaces) as space files."""
import argparse
from dataclasses import dataclass
from pathlib import Path

from medianspace import fileio, fixtures


@dataclass
class Config:
    out: Path = Path("fixtures")
    random: int = 0
    seed: int = 0


def main(cfg: Config) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)
    for spec in fixtures.CORPUS:
        S = fixtures.parse_fixture(spec)
        path = cfg.out / (spec.replace(":", "_").replace("*", "x").replace("/", "-") + ".json")
        fileio.write_space(S, path)
        print(f"{path}  {S.n} points")
    for k in range(cfg.random):
        S = fixtures.random_median_graph(cfg.seed + k)
        path = cfg.out / f"random_{cfg.seed + k}.json"
        fileio.write_space(S, path)
        print(f"{path}  {S.n} points")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Config.out)
    ap.add_argument("--random", type=int, default=Config.random)
    ap.add_argument("--seed", type=int, default=Config.seed)
    main(Config(**vars(ap.parse_args())))
