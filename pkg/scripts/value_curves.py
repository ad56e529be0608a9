"""Write the limit value curves and their bounds on a grid of T as CSV."""
import argparse
import csv
import sys

import numpy as np

from stoplab import poisson


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=float, default=0.05)
    ap.add_argument("--hi", type=float, default=3.0)
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--output", default=None)
    args = ap.parse_args()

    table = poisson.default_cutoffs()
    grid = np.round(np.arange(args.lo, args.hi + args.step / 2, args.step), 10)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["T", "v", "u", "u_lower", "u_upper", "w", "w_lower", "w_upper", "prophet_discrete"])
    for T in grid:
        lo, hi = poisson.u_sandwich(T)
        w_hi = poisson.w_upper_bound(T) if T < np.pi / 2 else float("nan")
        writer.writerow([f"{x:.10g}" for x in (
            T, poisson.v(T), poisson.u(T, table), lo, hi, poisson.w(T, table),
            poisson.w_lower_bound(T), w_hi, poisson.prophet_discrete(T))])
    if args.output:
        out.close()


if __name__ == "__main__":
    main()
