"""Catalogue sizes and timings for minimal patterns, n = 0 .. n_max."""
import argparse
import time
from dataclasses import dataclass

from ensemblectl.enumeration import enumerate_minimal


@dataclass
class Config:
    n_max: int = 7


def run(cfg: Config):
    rows = []
    for n in range(cfg.n_max + 1):
        t0 = time.perf_counter()
        catalog = enumerate_minimal(n, n_max=cfg.n_max)
        dt = time.perf_counter() - t0
        partitions = len({e.cycle_partition for e in catalog})
        rows.append((n, len(catalog), partitions, dt))
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=Config.n_max)
    cfg = Config(ap.parse_args().n_max)
    print("n,classes,cycle_partitions,seconds")
    for n, count, parts, dt in run(cfg):
        print(f"{n},{count},{parts},{dt:.4f}")
