"""Symmetric three-point sums with P(|X| = 1) = alpha / n.

P(S_n = 0) tends to e^{-alpha} I0(alpha), the zero mass of a symmetrized
Poisson walk. The gap closes roughly like 1/n.

Run:  python3 demos/04_three_point_bessel.py
"""
from lindeberg.experiments import three_point_bessel_experiment

for alpha in (0.5, 1.0, 2.0):
    rep = three_point_bessel_experiment(alpha, [50, 200, 800, 2000])
    gaps = "  ".join(f"n={n}: {o - rep.target:+.2e}" for n, o in zip(rep.n_values, rep.observed))
    print(f"alpha={alpha}: limit {rep.target:.6f}  {gaps}")
