#!/usr/bin/env python3
"""Lattice shells, their translation-class counts, and planar projections."""
import argparse
import sys

from distinct_angles import best_shell, census_bruteforce, generic_projection
from distinct_angles.census import n_r_d, verify_projection_property
from distinct_angles.configurations import lattice_general_position_report
from distinct_angles.errors import NoQuadruplesFound


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--d", type=int, nargs="+", default=[3])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=300)
    args = ap.parse_args()

    for d in args.d:
        for r in args.r:
            shell = best_shell(r, d)
            line = (f"r={r} d={d} level={shell.level} size={shell.size} "
                    f"mean_bound={float(shell.mean_bound):.2f} N_rd={n_r_d(r, d)}")
            if shell.size < 3 or d < 3:
                print(line)
                continue
            rep = lattice_general_position_report(shell.points)
            img, frame = generic_projection(shell.points, seed=args.seed)
            try:
                chk = verify_projection_property(shell.points, frame, trials=args.trials,
                                                 seed=args.seed, max_attempts=50 * args.trials)
                err = f"{float(chk.max_relative_error):.1e}"
            except NoQuadruplesFound:
                err = "n/a"  # no difference-equal quadruples in this shell
            angles = census_bruteforce(img, strict=False)
            print(f"{line} collinear_free={rep.ok_collinearity} attempt={frame.attempt} "
                  f"projected_distinct={angles.distinct_count} "
                  f"max_rel_err={err}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
