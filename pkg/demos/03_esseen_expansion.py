"""Delta_n sqrt(n) for binomial sums approaches (p + 1) / (3 sqrt(2 pi p q)).

The distance to the normal law is computed exactly from the convolved lattice
law at every n, so the only error left is the one being studied.

Run:  python3 demos/03_esseen_expansion.py [--csv out.csv]
"""
import argparse

from lindeberg.experiments import esseen_expansion_experiment, write_csv

parser = argparse.ArgumentParser()
parser.add_argument("--csv", default=None)
parser.add_argument("--n-max", type=int, default=5000)
args = parser.parse_args()

reports = []
for p in (0.6, 0.75, 0.9):
    rep = esseen_expansion_experiment(p, range(1, args.n_max + 1))
    reports.append(rep)
    checkpoints = [n for n in (10, 100, 1000, args.n_max) if n <= args.n_max]
    trail = ", ".join(f"n={n}: {rep.observed[n - 1]:.5f}" for n in checkpoints)
    print(f"p={p}: target {rep.target:.5f}; {trail}; tail max off by {rep.max_abs_error_at_tail:.1e}")

if args.csv:
    with open(args.csv, "w") as fh:
        write_csv(reports, fh)
    print(f"wrote {args.csv}")
