"""Convergence experiments and randomized checks built on exact convolution."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from .bounds import lookup_reference, reference_tables
from .distributions import (DiscreteDistribution, convolve_iid, iter_sum_laws, symmetric_three_point,
                            two_point, uniform_distance_to_normal)
from .fractions import (G_0, G_1, G_STAR, FractionParams, WeightFunction, abs_third_moment_fraction,
                        esseen_fraction, rozovskii_fraction, third_moment_fraction)
from .specfun import bessel_i0e

__all__ = [
    "ConvergenceReport",
    "CSV_HEADER",
    "esseen_expansion_target",
    "esseen_expansion_experiment",
    "three_point_zero_probability",
    "three_point_bessel_experiment",
    "FuzzConfig",
    "FuzzCase",
    "FuzzReport",
    "inequality_fuzzer",
    "PropertyReport",
    "property_checks",
    "random_weight",
    "write_csv",
]

CSV_HEADER = ("experiment", "n", "observed", "target", "error")
TAIL_FRACTION = 0.2


@dataclass(frozen=True)
class ConvergenceReport:
    experiment: str
    n_values: tuple[int, ...]
    observed: tuple[float, ...]
    target: float
    max_abs_error_at_tail: float

    def __post_init__(self):
        if len(self.n_values) != len(self.observed):
            raise ValueError("n_values and observed must have equal length")
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ValueError("n_values must be strictly increasing")

    def rows(self) -> Iterable[tuple]:
        for n, obs in zip(self.n_values, self.observed):
            yield self.experiment, n, obs, self.target, obs - self.target


def _tail_error(observed: Sequence[float], target: float, use_max: bool) -> float:
    k = max(1, math.ceil(TAIL_FRACTION * len(observed)))
    tail = observed[-k:]
    if use_max:
        # lattice sums oscillate in n; the limit is a limsup, so compare the tail maximum
        return abs(max(tail) - target)
    return max(abs(v - target) for v in tail)


def _check_n_values(n_values) -> tuple[int, ...]:
    ns = tuple(int(n) for n in n_values)
    if not ns or ns[0] < 1 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n_values must be a non-empty strictly increasing list of positive integers")
    return ns


def esseen_expansion_target(p: float) -> float:
    """Limit of Delta_n sqrt(n) for the two-point law: (p + 1) / (3 sqrt(2 pi p q))."""
    q = 1.0 - max(p, 1.0 - p)
    big = 1.0 - q
    return (big + 1.0) / (3.0 * math.sqrt(2.0 * math.pi * big * q))


def esseen_expansion_experiment(p: float, n_values: Sequence[int] | None = None) -> ConvergenceReport:
    """Track Delta_n sqrt(n) for i.i.d. two-point summands along ``n_values`` (default 1..10^4)."""
    if not 0.5 <= p < 1.0:
        raise ValueError(f"p must lie in [1/2, 1), got {p}")
    ns = _check_n_values(range(1, 10_001) if n_values is None else n_values)
    wanted = set(ns)
    observed = []
    for law in iter_sum_laws(two_point(p), ns[-1]):
        if law.n in wanted:
            observed.append(uniform_distance_to_normal(law) * math.sqrt(law.n))
    target = esseen_expansion_target(p)
    return ConvergenceReport(f"esseen(p={p})", ns, tuple(observed), target,
                             _tail_error(observed, target, use_max=True))


def three_point_zero_probability(p: float, n: int) -> float:
    """P(S_n = 0) for the symmetric three-point law by the trinomial sum, in log space."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    log_ratio = 2.0 * math.log(p / 2.0)
    terms = [math.exp(math.lgamma(n + 1) - math.lgamma(n - 2 * k + 1) - 2.0 * math.lgamma(k + 1)
                      + k * log_ratio + (n - 2 * k) * math.log1p(-p))
             for k in range(n // 2 + 1)]
    return math.fsum(terms)


def three_point_bessel_experiment(alpha: float, n_values: Sequence[int]) -> ConvergenceReport:
    """P(S_n = 0)/2 for n i.i.d. symmetric three-point summands with P(|X| = 1) = alpha/n."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    ns = _check_n_values(n_values)
    if any(n % 2 or n <= alpha for n in ns):
        raise ValueError("every n must be even and exceed alpha")
    observed = []
    for n in ns:
        law = convolve_iid(symmetric_three_point(alpha / n), n)
        observed.append(0.5 * law.prob_at(0.0))
    target = 0.5 * bessel_i0e(alpha)
    return ConvergenceReport(f"bessel(alpha={alpha})", ns, tuple(observed), target,
                             _tail_error(observed, target, use_max=False))


def write_csv(reports: Iterable[ConvergenceReport], out: TextIO | None = None) -> str:
    """Write the rows of ``reports`` as CSV; returns the text when ``out`` is None."""
    buf = io.StringIO() if out is None else out
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rep in reports:
        for row in rep.rows():
            w.writerow([row[0], row[1], repr(float(row[2])), repr(float(row[3])), repr(float(row[4]))])
    return buf.getvalue() if out is None else ""


# -- random distributions ----------------------------------------------------------

FAMILIES = ("two_point", "three_point", "lattice", "nonlattice")


def _standardize(values: np.ndarray, probs: np.ndarray) -> DiscreteDistribution:
    mean = float(np.dot(values, probs))
    v = values - mean
    sd = math.sqrt(float(np.dot(v * v, probs)))
    order = np.argsort(v)
    return DiscreteDistribution(tuple((v / sd)[order].tolist()), tuple(probs[order].tolist()))


def _random_distribution(rng: np.random.Generator, family: str, n_max: int,
                         nonlattice_n_max: int) -> tuple[DiscreteDistribution, int]:
    if family == "two_point":
        return two_point(float(rng.uniform(0.02, 0.98))), int(rng.integers(1, n_max + 1))
    if family == "three_point":
        return symmetric_three_point(float(rng.uniform(0.02, 0.98))), int(rng.integers(1, n_max + 1))
    k = int(rng.integers(2, 7))
    probs = rng.dirichlet(np.ones(k))
    probs = probs / math.fsum(probs)
    if family == "lattice":
        values = rng.choice(np.arange(-5, 6), size=k, replace=False).astype(float)
        return _standardize(values, probs), int(rng.integers(1, n_max + 1))
    if family == "nonlattice":
        values = rng.uniform(-5.0, 5.0, size=k)
        return _standardize(values, probs), int(rng.integers(1, nonlattice_n_max + 1))
    raise ValueError(f"unknown family {family!r}")


def random_weight(rng: np.random.Generator) -> WeightFunction:
    """Random member of the weight class: nonnegative mix of 1, z, min(z, a_i) and z^delta."""
    w = rng.uniform(0.0, 1.0, size=4)
    w[0] += 0.05
    knots = np.sort(rng.uniform(0.05, 10.0, size=int(rng.integers(0, 4))))
    kw = rng.uniform(0.0, 1.0, size=knots.size)
    delta = float(rng.uniform(0.0, 1.0))
    bounded = bool(rng.random() < 0.3)
    lin, power = (0.0, 0.0) if bounded else (w[1], w[2])

    def g(z: float) -> float:
        s = w[0] + lin * z + power * z ** delta
        for a, c in zip(knots, kw):
            s += c * min(z, a)
        return float(s)

    return WeightFunction.custom(g, bounded=bounded)


# -- inequality fuzzer ----------------------------------------------------------------

@dataclass(frozen=True)
class FuzzConfig:
    families: tuple[str, ...] = FAMILIES
    n_max: int = 200
    nonlattice_n_max: int = 4

    def __post_init__(self):
        unknown = set(self.families) - set(FAMILIES)
        if unknown or not self.families:
            raise ValueError(f"families must be a non-empty subset of {FAMILIES}")
        if not 1 <= self.n_max <= 200 or not 1 <= self.nonlattice_n_max <= self.n_max:
            raise ValueError("need 1 <= nonlattice_n_max <= n_max <= 200")


@dataclass(frozen=True)
class FuzzCase:
    trial: int
    family: str
    n: int
    atoms: tuple[tuple[float, float], ...]
    delta: float
    fraction: str
    epsilon: float
    gamma: float
    value: float
    ratio: float
    constant: float

    @property
    def violated(self) -> bool:
        return self.ratio > self.constant


@dataclass
class FuzzReport:
    seed: int
    trials: int
    checks: int = 0
    max_ratio: dict[str, float] = field(default_factory=dict)
    max_ratio_to_constant: float = 0.0
    worst: FuzzCase | None = None
    violations: list[FuzzCase] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "checks": self.checks,
            "max_ratio": dict(sorted(self.max_ratio.items())),
            "max_ratio_to_constant": self.max_ratio_to_constant,
            "violations": len(self.violations),
        }


def _reference_checks():
    """(label, weight, fraction fn, eps, gamma, constant) for every finite quoted cell."""
    checks = []
    tables = reference_tables()
    for which, fn in (("esseen", esseen_fraction), ("rozovskii", rozovskii_fraction)):
        for row in tables[which]:
            g = row.gamma_value
            if g is None or math.isinf(g):
                continue
            checks.append((f"{which}/g*", G_STAR, fn, row.epsilon, g, row.value))
            if row.epsilon <= 1.0:
                # g0 and g* fractions coincide for eps <= 1
                checks.append((f"{which}/g0", G_0, fn, row.epsilon, g, row.value))
            elif which == "rozovskii":
                # min(z, 1) >= z / eps on (0, eps), so L_R(g0) >= L_R(g*) / eps
                checks.append((f"{which}/g0", G_0, fn, row.epsilon, g, row.epsilon * row.value))
            else:
                one = lookup_reference("esseen", 1.0, g)
                if one is not None:
                    # L_E(g0, eps) >= L_E(g0, 1) = L_E(g*, 1)
                    checks.append((f"{which}/g0", G_0, fn, row.epsilon, g, one))
    return checks


def inequality_fuzzer(seed: int, trials: int, config: FuzzConfig = FuzzConfig()) -> FuzzReport:
    """Check Delta_n <= A * L on random laws against every finite quoted constant.

    Trial ``i`` draws from its own child of ``SeedSequence(seed)``, so reports
    are identical for a given seed regardless of evaluation order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    report = FuzzReport(seed=seed, trials=trials)
    checks = _reference_checks()
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        rng = np.random.default_rng(child)
        family = config.families[int(rng.integers(len(config.families)))]
        dist, n = _random_distribution(rng, family, config.n_max, config.nonlattice_n_max)
        delta = uniform_distance_to_normal(convolve_iid(dist, n))
        summands = [dist] * n
        for label, g, fn, eps, gamma, const in checks:
            value = fn(summands, g, FractionParams(eps, gamma)).value
            ratio = delta / value
            report.checks += 1
            report.max_ratio[label] = max(report.max_ratio.get(label, 0.0), ratio)
            rel = ratio / const
            case = None
            if rel > report.max_ratio_to_constant:
                case = FuzzCase(i, family, n, tuple(dist.atoms), delta, label, eps, gamma, value, ratio, const)
                report.max_ratio_to_constant = rel
                report.worst = case
            if ratio > const:
                report.violations.append(case or FuzzCase(i, family, n, tuple(dist.atoms), delta, label,
                                                          eps, gamma, value, ratio, const))
    return report


# -- structural properties of the fractions ---------------------------------------------

@dataclass
class PropertyReport:
    cases: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


_PROPERTY_EPS = (0.3, 0.7, 1.0, 1.5, 3.0, math.inf)
_SANDWICH_SLACK = 1e-9
_SCALE_RTOL = 1e-12


def property_checks(seed: int, cases: int = 500) -> PropertyReport:
    """Sandwich, g1 range, scale invariance and |M| <= Lambda on random laws and weights."""
    rep = PropertyReport()
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(cases)):
        rng = np.random.default_rng(child)
        family = FAMILIES[int(rng.integers(len(FAMILIES)))]
        dist, n = _random_distribution(rng, family, 50, 4)
        n_distinct = int(rng.integers(0, 3))
        summands = [dist] * n
        for _ in range(n_distinct):
            extra, _ = _random_distribution(rng, "lattice", 1, 1)
            summands.append(extra)
        eps = _PROPERTY_EPS[int(rng.integers(len(_PROPERTY_EPS)))]
        gamma = float(rng.uniform(0.05, 5.0))
        params = FractionParams(eps, gamma)
        g = random_weight(rng)
        tag = f"case {i} ({family}, n={n}, eps={eps}, gamma={gamma:.4g})"
        rep.cases += 1
        for name, fn in (("esseen", esseen_fraction), ("rozovskii", rozovskii_fraction)):
            lo = fn(summands, G_0, params).value
            hi = fn(summands, G_1, params).value
            if name == "rozovskii" and math.isinf(eps) and not g.bounded:
                mid = None
            else:
                mid = fn(summands, g, params).value
                scaled = [fn(summands, WeightFunction.custom(lambda z, c=c: c * g(z), bounded=g.bounded),
                             params).value for c in (0.1, 7.0)]
                for s in scaled:
                    if abs(s - mid) > _SCALE_RTOL * max(1.0, abs(mid)) + (1e-10 if name == "esseen" else 0.0):
                        rep.failures.append(f"{tag}: {name} not scale invariant ({s} vs {mid})")
            if mid is not None and not (lo <= mid + _SANDWICH_SLACK and mid <= hi + _SANDWICH_SLACK):
                rep.failures.append(f"{tag}: {name} sandwich broken ({lo}, {mid}, {hi})")
            cap = max(eps, 1.0) * (max(gamma, 1.0) if name == "esseen" else gamma + 1.0)
            if not (1.0 - 1e-12 <= hi <= cap * (1.0 + 1e-12)):
                rep.failures.append(f"{tag}: {name} g1 fraction {hi} outside [1, {cap}]")
        for z in rng.uniform(0.01, 4.0, size=5):
            m = third_moment_fraction(summands, float(z))
            lam = abs_third_moment_fraction(summands, float(z))
            if abs(m) > lam * (1.0 + 1e-12) + 1e-15:
                rep.failures.append(f"{tag}: |M({z})| = {abs(m)} exceeds Lambda = {lam}")
    return rep
