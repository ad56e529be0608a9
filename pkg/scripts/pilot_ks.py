"""KS distances of the rescaled discrete Moser rule to its Poisson limit,
for a range of horizons and reps."""
import argparse

from stoplab import montecarlo


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", default="10,100,1000,10000")
    ap.add_argument("--reps", type=int, default=100_000)
    ap.add_argument("--b", type=float, default=2.0)
    ap.add_argument("--T", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    grid = [int(s) for s in args.n.split(",")]
    rows = montecarlo.ks_convergence_check(grid, T=args.T, b=args.b, reps=args.reps, seed=args.seed)
    print("n,ks_time,ks_value,mean_value,mean_value_stderr")
    for r in rows:
        print(f"{r.n},{r.ks_time:.6f},{r.ks_value:.6f},{r.mean_value:.6f},{r.mean_value_stderr:.6f}")


if __name__ == "__main__":
    main()
