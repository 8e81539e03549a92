"""Benchmark the compiled Dijkstra kernel against the pure-Python twin.

Runs both implementations on the same randomized cost maps, checks that
distances and predecessors are bit-identical, and reports wall times and
speedups. Usage:

    python3 benchmarks/bench_gridpath.py --sizes 100 200 --repeats 5
"""

import argparse
import statistics
import time

import numpy as np

from terragp._core import _gridpath_py

try:
    from terragp._core import _gridpath_c
except ImportError:
    _gridpath_c = None


def make_case(rng: np.random.Generator, side: int, with_grav: bool):
    cost = rng.uniform(0.5, 50.0, side * side)
    grav = rng.uniform(-3.0, 8.0, side * side) if with_grav else np.zeros(side * side)
    return cost, grav


def run_kernel(mod, cost, grav, side, connectivity):
    t0 = time.perf_counter()
    dist, pred = mod.dijkstra_grid(
        cost, side, side, 1.0, connectivity, 0, side * side - 1, grav, 1e-3
    )
    return time.perf_counter() - t0, dist, pred


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200],
                    help="square grid side lengths")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if _gridpath_c is None:
        print("compiled kernel not available; nothing to compare")
        return 1

    rng = np.random.Generator(np.random.Philox(args.seed))
    header = f"{'grid':>10} {'compiled':>12} {'pure':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for side in args.sizes:
        t_c, t_p = [], []
        for rep in range(args.repeats):
            cost, grav = make_case(rng, side, with_grav=rep % 2 == 0)
            dt_c, dist_c, pred_c = run_kernel(_gridpath_c, cost, grav, side,
                                              args.connectivity)
            dt_p, dist_p, pred_p = run_kernel(_gridpath_py, cost, grav, side,
                                              args.connectivity)
            if not (np.array_equal(dist_c, dist_p) and np.array_equal(pred_c, pred_p)):
                print(f"MISMATCH at side={side} repeat={rep}")
                return 1
            t_c.append(dt_c)
            t_p.append(dt_p)
        mc, mp = statistics.median(t_c), statistics.median(t_p)
        print(f"{side}x{side:<6} {mc * 1e3:>10.2f}ms {mp * 1e3:>10.2f}ms {mp / mc:>8.1f}x")
    print("outputs bit-identical across all runs")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())