"""Print the discrete value matrix, its diagonal continuation and the first
cutoffs, next to their truncated three-decimal forms."""
import argparse
import math

import numpy as np

from stoplab import discrete, poisson


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=11)
    ap.add_argument("--diag", default="11..17")
    args = ap.parse_args()

    mat = discrete.value_matrix(range(2, 11), range(1, 11))
    print("V_{n,N}: rows N=2..10, columns n=1..10")
    for N, row in zip(range(2, 11), mat):
        print(f"N={N:2d}  " + " ".join(f"{x:5.3f}" for x in row))

    lo, hi = (int(s) for s in args.diag.split(".."))
    print("\ndiagonal V_{n,n}")
    for n in range(lo, hi + 1):
        print(f"n={n:2d}  {discrete.discrete_values(n, n)[n]:.4f}")

    table = poisson.cutoffs(max(args.k, 1), 1e-12)
    print(f"\ncutoffs (tail bound {table.tail_bound:.1e})")
    print(" k   delta_k          truncated  rounded")
    for k in range(1, args.k + 1):
        d = table[k]
        print(f"{k:2d}   {d:.12f}   {math.floor(d * 1000) / 1000:.3f}      {np.round(d, 3):.3f}")


if __name__ == "__main__":
    main()
