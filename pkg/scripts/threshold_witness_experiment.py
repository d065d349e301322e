#!/usr/bin/env python3
"""How often do random spiral subsets of a given size repeat an angle?

At the threshold size every subset must. Below it, this measures how often
the equivalent-triple argument still happens to apply, and how large an
exhaustively searched repeat-free subset gets for small n.
"""
import argparse
import sys

from distinct_angles import repeated_angle_witness, rgen_threshold, spiral_config
from distinct_angles.configurations import rng
from distinct_angles.subsets import search_distinct_angle_subset


def witness_rate(n, size, trials, seed):
    cfg = spiral_config(n, f"1/{n}")
    gen = rng(seed, n, size)
    hits, worst = 0, 0.0
    for _ in range(trials):
        subset = sorted(int(i) for i in gen.choice(range(1, n + 1), size, replace=False))
        w = repeated_angle_witness(cfg, subset)
        if w is not None:
            hits += 1
            worst = max(worst, float(w.discrepancy))
    return hits / trials, worst


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[16, 25, 36, 49])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--below", type=int, default=3, help="also try this many smaller sizes")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--exhaustive-upto", type=int, default=12)
    args = ap.parse_args()

    for n in args.n:
        m = rgen_threshold(n)
        for size in range(max(3, m - args.below), m + 1):
            rate, worst = witness_rate(n, size, args.trials, args.seed)
            tag = "threshold" if size == m else ""
            print(f"n={n:>3} size={size:>2} witness_rate={rate:.3f} "
                  f"max_discrepancy={worst:.2e} {tag}")

    for n in range(6, args.exhaustive_upto + 1):
        res = search_distinct_angle_subset(spiral_config(n, f"1/{n}").points, "exhaustive")
        print(f"n={n:>3} largest repeat-free subset={len(res.subset)} "
              f"threshold={rgen_threshold(n)} complete={res.complete}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
