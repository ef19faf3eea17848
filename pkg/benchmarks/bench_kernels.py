"""Compiled vs numpy kernels on seeded Poisson clouds.

    python3 benchmarks/bench_kernels.py [--sizes 10 20 40] [--repeat 3]

Prints one CSV row per (kernel, n, backend) with the best wall time over
``--repeat`` runs, and checks that both backends return identical arrays.
"""

import argparse
import time

import numpy as np

from areatrap import kernels
from areatrap.lpp import chain_depths
from areatrap.sampler import SeedSpec, sample_poisson_square


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=float, nargs="+", default=[10.0, 20.0, 40.0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    a = ap.parse_args(argv)

    backends = kernels.available_backends()
    print("kernel,n,points,backend,seconds,speedup")
    for n in a.sizes:
        c = sample_poisson_square(n, SeedSpec(a.seed, 0))
        depth = chain_depths(c.ys)
        jobs = {
            "weighted_dp": lambda: kernels.weighted_dp(c.xs, c.ys, n, 1.0, 0.04),
            "exact_area_dp": lambda: kernels.exact_area_dp(c.xs, c.ys, n, depth),
        }
        for name, fn in jobs.items():
            times, outs = {}, {}
            for b in backends:
                with kernels.use_backend(b):
                    times[b], outs[b] = _best(fn, a.repeat)
            ref = outs["python"]
            for b in backends:
                same = all(np.array_equal(np.asarray(x), np.asarray(y)) for x, y in zip(ref, outs[b]))
                if not same:
                    raise SystemExit(f"{name}: backend {b} disagrees with python at n={n}")
                print(f"{name},{n:g},{c.count},{b},{times[b]:.4f},{times['python'] / times[b]:.1f}")


if __name__ == "__main__":
    main()
