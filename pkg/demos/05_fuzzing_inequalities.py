"""Random laws against the quoted absolute constants.

For every random law and n the fuzzer computes the exact distance Delta_n and
divides it by each fraction. A ratio above the quoted constant would be a
counterexample; the report shows how close the worst case comes.

Run:  python3 demos/05_fuzzing_inequalities.py [seed] [trials]
"""
import sys

from lindeberg.experiments import inequality_fuzzer, property_checks

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 7
trials = int(sys.argv[2]) if len(sys.argv) > 2 else 300

rep = inequality_fuzzer(seed, trials)
print(f"seed {seed}: {rep.trials} laws, {rep.checks} inequality checks, {len(rep.violations)} violations")
for label, ratio in sorted(rep.max_ratio.items()):
    print(f"  max Delta/L for {label:<13} {ratio:.4f}")
w = rep.worst
print(f"closest call: {w.family} law, n={w.n}, {w.fraction} at eps={w.epsilon:g}, gamma={w.gamma:.3g}: "
      f"ratio {w.ratio:.4f} vs constant {w.constant}")

props = property_checks(seed, 100)
print(f"structural properties on {props.cases} random cases: {'all hold' if props.ok else props.failures[:3]}")
