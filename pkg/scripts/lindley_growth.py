"""Optimal expected rank R_n against the cutoff-driven rule along doubling n."""
import argparse
import math

from stoplab import lindley, poisson


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-exp", type=int, default=16)
    args = ap.parse_args()

    n_top = 2 ** args.max_exp
    table = poisson.cutoffs(n_top)
    limit = math.exp(table[1])
    print("n,R_n,delta_rule_loss,gap_to_limit")
    for e in range(args.max_exp + 1):
        n = 2**e
        r = lindley.lindley_values(n).R_n
        d = lindley.evaluate_rank_rule(lindley.delta_rank_rule(n, table))
        print(f"{n},{r:.8f},{d:.8f},{limit - r:.3e}")


if __name__ == "__main__":
    main()
