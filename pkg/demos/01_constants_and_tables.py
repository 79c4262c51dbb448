"""Where the numbers come from: the named constants, then the computed bound tables.

Run:  python3 demos/01_constants_and_tables.py
"""
import math

from lindeberg.bounds import (TABLE3_ESSEEN_POINTS, TABLE4_GAMMAS, abe_lower_esseen, aex_upper_esseen,
                              gamma0, resolve_gamma)
from lindeberg.constants import constants
from lindeberg.fractions import FractionParams

c = constants()
print("Constants, each obtained by solving its defining equation:")
for name, value in c.as_dict().items():
    print(f"  {name:<11} {value:.10f}")
print(f"  {'gamma0':<11} {gamma0():.10f}  (where the two-point lower bound meets 1/(2 sqrt(2 pi)))")

print("\nUpper bounds for the Esseen-type asymptotically exact constant.")
print("The bound shrinks as eps grows and flattens once eps passes about 3:")
for eps, g in TABLE3_ESSEEN_POINTS[:6]:
    value = aex_upper_esseen(FractionParams(eps, resolve_gamma(g))).value
    label = "inf" if math.isinf(eps) else f"{eps:g}"
    print(f"  eps={label:<5} gamma={g!s:<6} -> {value:.5f}")

print("\nTwo-point lower bounds: the supremum over p and the p that attains it.")
for g in TABLE4_GAMMAS:
    b = abe_lower_esseen(g)
    print(f"  gamma={g:<5g} p*={b.witness_p:.6f} bound={b.value:.6f}")
