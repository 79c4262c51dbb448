"""Finite discrete distributions, truncated moments and exact i.i.d. sums.

Lattice laws (all atoms on ``offset + k * span``) are convolved on integer
indices, so no floating-point merging of atoms ever happens for them.
Other laws are convolved by pairwise sums with a relative merge tolerance.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .specfun import std_normal_cdf_array

__all__ = [
    "DistributionError",
    "ConvolutionSizeError",
    "DiscreteDistribution",
    "SumLaw",
    "two_point",
    "symmetric_three_point",
    "tail_second_moment",
    "trunc_third_moment",
    "trunc_abs_third_moment",
    "convolve_iid",
    "iter_sum_laws",
    "uniform_distance_to_normal",
    "distance_to_normal",
    "parse_distribution",
    "distribution_to_json",
]

DEFAULT_ATOM_LIMIT = 2_000_000
_LATTICE_TOL = 1e-9
_MERGE_RTOL = 1e-12


class DistributionError(ValueError):
    """Invalid distribution input; the message names the violated invariant."""


class ConvolutionSizeError(RuntimeError):
    pass


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite distribution with strictly increasing atoms ``values`` and weights ``probs``."""

    values: tuple[float, ...]
    probs: tuple[float, ...]
    lattice: tuple[float, float, tuple[int, ...]] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.values) != len(self.probs) or not self.values:
            raise DistributionError("values and probs must be non-empty and of equal length")
        if any(not math.isfinite(v) for v in self.values):
            raise DistributionError("atom values must be finite")
        if any(not (pr > 0.0) for pr in self.probs):
            raise DistributionError("probabilities must be strictly positive")
        if abs(math.fsum(self.probs) - 1.0) > 1e-12:
            raise DistributionError(f"probabilities sum to {math.fsum(self.probs)!r}, not 1")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise DistributionError("atom values must be strictly increasing")
        if self.variance <= 0.0:
            raise DistributionError("degenerate distribution (zero variance)")
        if self.lattice is None:
            object.__setattr__(self, "lattice", _detect_lattice(self.values))

    @classmethod
    def from_atoms(cls, atoms: Sequence[tuple[float, float]]) -> "DiscreteDistribution":
        """Build from unordered ``(value, prob)`` pairs; duplicates are rejected."""
        items = sorted((float(x), float(p)) for x, p in atoms)
        return cls(tuple(x for x, _ in items), tuple(p for _, p in items))

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.values, self.probs))

    @property
    def mean(self) -> float:
        return math.fsum(x * p for x, p in zip(self.values, self.probs))

    @property
    def second_moment(self) -> float:
        return math.fsum(x * x * p for x, p in zip(self.values, self.probs))

    @property
    def variance(self) -> float:
        m = self.mean
        return math.fsum((x - m) ** 2 * p for x, p in zip(self.values, self.probs))

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    @property
    def abs_third_moment(self) -> float:
        return math.fsum(abs(x) ** 3 * p for x, p in zip(self.values, self.probs))

    @property
    def third_moment(self) -> float:
        return math.fsum(x ** 3 * p for x, p in zip(self.values, self.probs))

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        v, p = self.values, self.probs
        return all(abs(a + b) <= tol and abs(pa - pb) <= tol
                   for a, b, pa, pb in zip(v, reversed(v), p, reversed(p)))

    def cdf(self, x: float) -> float:
        """Left-continuous distribution function P(X < x)."""
        return math.fsum(p for v, p in zip(self.values, self.probs) if v < x)


def _detect_lattice(values: Sequence[float]):
    if len(values) == 1:
        return None
    v = np.asarray(values)
    span = float(np.min(np.diff(v)))
    k = (v - v[0]) / span
    idx = np.rint(k)
    if np.max(np.abs(k - idx)) > _LATTICE_TOL or idx[-1] > 10_000:
        return None
    return float(v[0]), span, tuple(int(i) for i in idx)


def two_point(p: float) -> DiscreteDistribution:
    """Zero-mean unit-variance law with P(X = sqrt(q/p)) = p, P(X = -sqrt(p/q)) = q."""
    if not 0.0 < p < 1.0:
        raise DistributionError(f"p must lie in (0, 1), got {p}")
    q = 1.0 - p
    lo, hi = -math.sqrt(p / q), math.sqrt(q / p)
    # span is 1/sqrt(pq); the two atoms are lattice sites 0 and 1
    return DiscreteDistribution((lo, hi), (q, p), lattice=(lo, hi - lo, (0, 1)))


def symmetric_three_point(p: float) -> DiscreteDistribution:
    """P(X = -1) = P(X = 1) = p/2, P(X = 0) = 1 - p."""
    if not 0.0 < p < 1.0:
        raise DistributionError(f"p must lie in (0, 1), got {p}")
    return DiscreteDistribution((-1.0, 0.0, 1.0), (p / 2.0, 1.0 - p, p / 2.0),
                                lattice=(-1.0, 1.0, (0, 1, 2)))


# -- truncated moments ---------------------------------------------------------

def tail_second_moment(d: DiscreteDistribution, z: float) -> float:
    """E X^2 1(|X| >= z)."""
    return math.fsum(x * x * p for x, p in zip(d.values, d.probs) if abs(x) >= z)


def trunc_third_moment(d: DiscreteDistribution, z: float) -> float:
    """E X^3 1(|X| < z), the algebraic truncated third moment."""
    return math.fsum(x ** 3 * p for x, p in zip(d.values, d.probs) if abs(x) < z)


def trunc_abs_third_moment(d: DiscreteDistribution, z: float) -> float:
    """E |X|^3 1(|X| < z)."""
    return math.fsum(abs(x) ** 3 * p for x, p in zip(d.values, d.probs) if abs(x) < z)


# -- sums ----------------------------------------------------------------------

@dataclass(frozen=True)
class SumLaw:
    """Exact law of the standardized sum (S_n - E S_n) / B_n of n i.i.d. copies of ``base``."""

    n: int
    base: DiscreteDistribution | None
    b_n: float
    values: np.ndarray
    probs: np.ndarray

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.probs.tolist()))

    def prob_at(self, x: float, tol: float = 1e-9) -> float:
        i = np.searchsorted(self.values, x - tol)
        if i < len(self.values) and abs(self.values[i] - x) <= tol:
            return float(self.probs[i])
        return 0.0


def _lattice_pmf_steps(base: DiscreteDistribution, n_max: int, limit: int) -> Iterator[np.ndarray]:
    offset, span, idx = base.lattice
    kernel = np.zeros(idx[-1] + 1)
    kernel[list(idx)] = base.probs
    if n_max * idx[-1] + 1 > limit:
        raise ConvolutionSizeError(f"lattice sum would need {n_max * idx[-1] + 1} sites (> {limit})")
    pmf = kernel.copy()
    yield pmf
    for _ in range(1, n_max):
        pmf = np.convolve(pmf, kernel)
        yield pmf


def _lattice_law(base: DiscreteDistribution, n: int, pmf: np.ndarray) -> SumLaw:
    offset, span, _ = base.lattice
    mean = base.mean
    b_n = math.sqrt(n * base.variance)
    k = np.arange(pmf.size, dtype=float)
    # n*offset + k*span - n*mean, arranged to limit cancellation
    values = (k * span + n * (offset - mean)) / b_n
    keep = pmf > 0.0
    return SumLaw(n=n, base=base, b_n=b_n, values=values[keep], probs=pmf[keep])


def _merge(values: np.ndarray, probs: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(values, kind="stable")
    values, probs = values[order], probs[order]
    new_group = np.empty(values.size, dtype=bool)
    new_group[0] = True
    new_group[1:] = np.diff(values) > tol
    group = np.cumsum(new_group) - 1
    merged_p = np.bincount(group, weights=probs)
    merged_v = values[new_group]
    return merged_v, merged_p


def iter_sum_laws(base: DiscreteDistribution, n_max: int, limit: int = DEFAULT_ATOM_LIMIT) -> Iterator[SumLaw]:
    """Yield the standardized sum laws for n = 1, 2, ..., n_max by iterated convolution."""
    if n_max < 1:
        raise ValueError("n must be >= 1")
    if base.lattice is not None:
        for n, pmf in enumerate(_lattice_pmf_steps(base, n_max, limit), start=1):
            yield _lattice_law(base, n, pmf)
        return
    bv = np.asarray(base.values)
    bp = np.asarray(base.probs)
    mean = base.mean
    scale = float(np.max(np.abs(bv)))
    values, probs = bv.copy(), bp.copy()
    for n in range(1, n_max + 1):
        if n > 1:
            if values.size * bv.size > limit:
                raise ConvolutionSizeError(f"convolution would produce {values.size * bv.size} atoms (> {limit})")
            values, probs = _merge((values[:, None] + bv[None, :]).ravel(),
                                   (probs[:, None] * bp[None, :]).ravel(),
                                   _MERGE_RTOL * scale * n)
        b_n = math.sqrt(n * base.variance)
        yield SumLaw(n=n, base=base, b_n=b_n, values=(values - n * mean) / b_n, probs=probs.copy())


def convolve_iid(d: DiscreteDistribution, n: int, limit: int = DEFAULT_ATOM_LIMIT) -> SumLaw:
    """Exact law of the standardized sum of ``n`` i.i.d. copies of ``d``."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    law = None
    for law in iter_sum_laws(d, int(n), limit):
        pass
    return law


def distance_to_normal(values, probs) -> tuple[float, float]:
    """sup_x |P(S < x) - Phi(x)| for a discrete law given by sorted atoms.

    Returns ``(distance, x)`` with ``x`` the atom at which the supremum is
    attained (as a one-sided limit). Cumulative sums are accumulated in
    extended precision from the nearer tail.
    """
    v = np.asarray(values, dtype=float)
    pr = np.asarray(probs, dtype=np.longdouble)
    left = np.cumsum(pr)                      # P(S <= x_i)
    right = np.cumsum(pr[::-1])[::-1]         # P(S >= x_i)
    before = np.concatenate(([np.longdouble(0.0)], left[:-1]))   # P(S < x_i)
    after = np.concatenate((right[1:], [np.longdouble(0.0)]))     # P(S > x_i)
    phi = std_normal_cdf_array(v)
    phi_up = std_normal_cdf_array(-v)
    neg = v <= 0.0
    # |P(S < x) - Phi(x)| and |P(S <= x) - Phi(x)|, each via the better-conditioned tail
    d_before = np.where(neg, np.abs(before - phi), np.abs(right - phi_up))
    d_at = np.where(neg, np.abs(left - phi), np.abs(after - phi_up))
    d = np.maximum(d_before, d_at).astype(float)
    i = int(np.argmax(d))
    return float(d[i]), float(v[i])


def uniform_distance_to_normal(s: SumLaw) -> float:
    """Kolmogorov distance between the standardized sum and the standard normal law."""
    return distance_to_normal(s.values, s.probs)[0]


# -- JSON ----------------------------------------------------------------------

def parse_distribution(text: str, *, allow_nonzero_mean: bool = False,
                       mean_tol: float = 1e-12) -> DiscreteDistribution:
    """Parse ``{"atoms": [{"x": ..., "p": ...}, ...]}`` into a distribution.

    Raises ``json.JSONDecodeError`` for malformed JSON and
    ``DistributionError`` for schema or invariant violations.
    """
    doc = json.loads(text)
    if not isinstance(doc, dict) or "atoms" not in doc:
        raise DistributionError('document must be an object with an "atoms" list')
    atoms = doc["atoms"]
    if not isinstance(atoms, list) or not atoms:
        raise DistributionError('"atoms" must be a non-empty list')
    pairs = []
    for i, a in enumerate(atoms):
        if not isinstance(a, dict) or set(a) != {"x", "p"}:
            raise DistributionError(f'atom {i} must have exactly the keys "x" and "p"')
        x, p = a["x"], a["p"]
        if isinstance(x, bool) or isinstance(p, bool) or not isinstance(x, (int, float)) \
                or not isinstance(p, (int, float)):
            raise DistributionError(f"atom {i}: x and p must be numbers")
        pairs.append((float(x), float(p)))
    xs = [x for x, _ in pairs]
    if len(set(xs)) != len(xs):
        raise DistributionError("duplicate atom values")
    d = DiscreteDistribution.from_atoms(pairs)
    if not allow_nonzero_mean and abs(d.mean) > mean_tol * max(1.0, d.std):
        raise DistributionError(f"mean is {d.mean!r}, not 0")
    return d


def distribution_to_json(d: DiscreteDistribution) -> str:
    return json.dumps({"atoms": [{"x": x, "p": p} for x, p in d.atoms]})
