"""Benchmark the triple-sum curvature energy.

Sweeps cloud sizes and thread counts, reports wall times and checks that
the compensated reduction is thread-count invariant.  Usage:

    python3 scripts/bench_curvature.py --sizes 500,1000,2000 --threads 1,2,4
"""

import argparse
import time

import numpy as np

from ecap.menger import DiscreteMeasure, curvature_energy


def cloud(n: int, seed: int = 0) -> DiscreteMeasure:
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=n) + 1j * rng.normal(size=n)
    return DiscreteMeasure(pts, np.full(n, 1.0 / n))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="500,1000,2000")
    ap.add_argument("--threads", default="1,2,4")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    threads = [int(t) for t in args.threads.split(",")]

    # one throwaway call so JIT compilation stays out of the timings
    curvature_energy(cloud(64, args.seed), threads=1)

    print(f"{'n':>6} {'threads':>7} {'seconds':>9} {'Mtriples/s':>11} "
          f"{'energy':>14}")
    for n in sizes:
        mu = cloud(n, args.seed)
        base = None
        for t in threads:
            t0 = time.perf_counter()
            e = curvature_energy(mu, threads=t)
            dt = time.perf_counter() - t0
            rate = n * (n - 1) * (n - 2) / 6 / dt / 1e6
            print(f"{n:>6} {t:>7} {dt:>9.2f} {rate:>11.1f} {e:>14.6e}")
            if base is None:
                base = e
            elif e != base:
                print(f"        WARNING: thread-count drift "
                      f"{abs(e - base):.3e}")


if __name__ == "__main__":
    main()
