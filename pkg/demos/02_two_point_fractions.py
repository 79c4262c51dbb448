"""Brute force against closed form for i.i.d. two-point summands.

The brute-force evaluator only knows the definition (a supremum over the
truncation level). The closed forms are piecewise expressions in p, n, eps and
gamma. Sweeping a grid shows they agree to rounding error.

Run:  python3 demos/02_two_point_fractions.py
"""
import itertools
import math

from lindeberg.distributions import two_point
from lindeberg.fractions import (G_0, G_1, G_CONST, G_STAR, FractionKind, FractionParams, esseen_fraction,
                                 fraction, two_point_fraction_closed_form)

p, n = 0.8, 1
v = esseen_fraction([two_point(p)] * n, G_STAR, FractionParams(1.0, 1.0))
print(f"p={p}, n={n}, eps=1, gamma=1: value {v.value:.12f} reached at z={v.attained_z:.6f} ({v.side.value})")

worst = 0.0
count = 0
for p, n, eps, gamma in itertools.product([0.5, 0.6, 0.75, 0.9], [1, 3, 20], [0.5, 1.0, 2.0, math.inf],
                                          [0.3, 1.0, 4.0]):
    for g, kind in itertools.product((G_STAR, G_CONST, G_0, G_1), FractionKind):
        params = FractionParams(eps, gamma)
        brute = fraction(kind, [two_point(p)] * n, g, params).value
        closed = two_point_fraction_closed_form(kind, g, p, n, params)
        worst = max(worst, abs(brute - closed) / closed)
        count += 1
print(f"{count} comparisons, largest relative difference {worst:.1e}")

# the weight g0 with eps > 1 can exceed its eps = 1 value when n <= p/q < n eps^2
p, n, eps, gamma = 0.8, 1, 3.0, 2.0
at_eps = esseen_fraction([two_point(p)], G_0, FractionParams(eps, gamma)).value
at_one = esseen_fraction([two_point(p)], G_STAR, FractionParams(1.0, gamma)).value
print(f"g0 at eps={eps}: {at_eps:.4f}; g* at eps=1: {at_one:.4f}; gamma (p-q)/p = {gamma * 0.6 / 0.8:.4f}")
