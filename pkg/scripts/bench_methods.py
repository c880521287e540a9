#!/usr/bin/env python3
"""Time the exponential closed form against the linear transfer-matrix product.

The closed form sums 2**N phasors per momentum, the transfer matrix
multiplies N two-by-two matrices; this prints where the crossover sits and
how far the two disagree.
"""
import argparse
import time

import numpy as np

from ftgraph import Coupling, sqrt_prime_positions
from ftgraph.scattering import amplitude_arrays


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--max-n", type=int, default=16)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    c = Coupling(1.5, 0.3)
    ks = np.linspace(0.01, 50.0, args.points)
    print(f"{'N':>3s} {'recursion':>10s} {'closedform':>11s} {'transfer':>9s} {'max |dT|':>10s}")
    for n in range(1, args.max_n + 1):
        d = sqrt_prime_positions(n)
        row = {}
        for method in ("recursion", "closedform", "transfer"):
            row[method] = best_of(lambda: amplitude_arrays(c, d, ks, method), args.repeats)
        diff = np.max(np.abs(row["closedform"][1][0] - row["transfer"][1][0]))
        print(f"{n:3d} {row['recursion'][0]:10.4f} {row['closedform'][0]:11.4f} {row['transfer'][0]:9.4f} {diff:10.2e}")


if __name__ == "__main__":
    main()
