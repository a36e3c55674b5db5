"""Time naive against fast star products and write the CSV report."""

import argparse
import sys

from confcalc.bench import benchmark_star


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="6,8,10,12,14,16,18,20")
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="bench_star.csv")
    args = ap.parse_args()
    rep = benchmark_star([int(s) for s in args.sizes.split(",")], args.reps, seed=args.seed)
    with open(args.out, "w") as fh:
        fh.write(rep.to_csv())
    sys.stdout.write(rep.to_csv())
    print(f"fast path faster at >= 14 sites: {rep.fast_wins()}")


if __name__ == "__main__":
    main()
