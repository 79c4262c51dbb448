"""Esseen-type and Rozovskii-type truncated-moment fractions.

All quantities are expressed in units of ``B_n`` (the square root of the sum
of second moments), so that a truncation level ``z`` corresponds to the
absolute level ``z * B_n``.

Both truncated moments are left-continuous step functions of ``z`` that jump
only at atom magnitudes. Between consecutive breakpoints the fraction
integrands are therefore products of constants with the weight ratios

    A(z) = g(zB) / (z g(B))   (nonincreasing)
    C(z) = g(zB) / g(B)       (nondecreasing)

For the four canonical weights one of the two ratios is constant on every
piece once ``z = 1`` is added as a breakpoint, so each piece attains its
supremum at one of its ends. Custom weights fall back to branch and bound.
"""
from __future__ import annotations

import enum
import heapq
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .distributions import DiscreteDistribution, DistributionError

__all__ = [
    "WeightKind",
    "WeightFunction",
    "FractionParams",
    "FractionKind",
    "Method",
    "Side",
    "FractionValue",
    "FractionError",
    "WeightFunctionError",
    "lindeberg_fraction",
    "third_moment_fraction",
    "abs_third_moment_fraction",
    "esseen_fraction",
    "rozovskii_fraction",
    "fraction",
    "two_point_fraction_closed_form",
    "G_STAR",
    "G_CONST",
    "G_0",
    "G_1",
]

BRANCH_BOUND_TOL = 1e-10
BRANCH_BOUND_MAX_SPLITS = 200_000
_MONOTONE_RTOL = 1e-12


class FractionError(ArithmeticError):
    """A fraction cannot be evaluated for the given inputs."""


class WeightFunctionError(ValueError):
    pass


class WeightKind(enum.Enum):
    GSTAR = "gstar"
    GCONST = "gconst"
    G0 = "g0"
    G1 = "g1"
    CUSTOM = "custom"


class FractionKind(enum.Enum):
    ESSEEN = "esseen"
    ROZOVSKII = "rozovskii"


class Method(enum.Enum):
    BRUTE_FORCE = "brute-force"
    CLOSED_FORM = "closed-form"


class Side(enum.Enum):
    """How the supremum is reached at ``attained_z``."""

    AT = "at"
    FROM_RIGHT = "from-right"
    FROM_LEFT = "from-left"


@dataclass(frozen=True)
class WeightFunction:
    """A weight ``g`` with ``g`` and ``z / g(z)`` both nondecreasing.

    Canonical members: ``g*(z) = z``, ``g_c(z) = 1``, ``g0(z) = min(z, B)``
    and ``g1(z) = max(z, B)``. The last two depend on the normalizer ``B``.
    Custom weights are functions of the absolute level ``z`` and are checked
    on a logarithmic grid when constructed.
    """

    kind: WeightKind
    func: Callable[[float], float] | None = field(default=None, compare=False)
    bounded: bool = False
    label: str = ""

    @classmethod
    def custom(cls, func: Callable[[float], float], *, bounded: bool = False, label: str = "custom",
               grid: tuple[float, float, int] = (1e-6, 1e6, 1000)) -> "WeightFunction":
        """Wrap a user weight, verifying positivity and both monotonicities on a log grid.

        ``bounded=True`` declares ``sup g < inf``; only then is ``epsilon = inf``
        accepted by the Rozovskii fraction.
        """
        lo, hi, num = grid
        zs = np.geomspace(lo, hi, num)
        gs = np.array([float(func(float(z))) for z in zs])
        if not np.all(np.isfinite(gs)) or np.any(gs <= 0.0):
            raise WeightFunctionError("weight must be finite and strictly positive for z > 0")
        if np.any(np.diff(gs) < -_MONOTONE_RTOL * np.abs(gs[:-1])):
            raise WeightFunctionError("weight must be nondecreasing")
        ratio = zs / gs
        if np.any(np.diff(ratio) < -_MONOTONE_RTOL * np.abs(ratio[:-1])):
            raise WeightFunctionError("z / g(z) must be nondecreasing")
        return cls(WeightKind.CUSTOM, func, bounded, label)

    @property
    def is_canonical(self) -> bool:
        return self.kind is not WeightKind.CUSTOM

    @property
    def name(self) -> str:
        return self.label or self.kind.value

    def __call__(self, z: float, b: float = 1.0) -> float:
        """g(z) at absolute level ``z`` for normalizer ``b``."""
        k = self.kind
        if k is WeightKind.GSTAR:
            return z
        if k is WeightKind.GCONST:
            return 1.0
        if k is WeightKind.G0:
            return min(z, b)
        if k is WeightKind.G1:
            return max(z, b)
        return float(self.func(z))

    def ratio_a(self, t: float, b: float) -> float:
        """g(tB) / (t g(B)) for a normalized level ``t > 0``."""
        k = self.kind
        if k is WeightKind.GSTAR:
            return 1.0
        if k is WeightKind.GCONST:
            return 1.0 / t
        if k is WeightKind.G0:
            return 1.0 if t <= 1.0 else 1.0 / t
        if k is WeightKind.G1:
            return 1.0 / t if t <= 1.0 else 1.0
        return self.func(t * b) / (t * self.func(b))

    def ratio_c(self, t: float, b: float) -> float:
        """g(tB) / g(B) for a normalized level ``t >= 0``."""
        k = self.kind
        if k is WeightKind.GSTAR:
            return t
        if k is WeightKind.GCONST:
            return 1.0
        if k is WeightKind.G0:
            return min(t, 1.0)
        if k is WeightKind.G1:
            return max(t, 1.0)
        return self.func(t * b) / self.func(b)

    def ratio_a_at_infinity(self) -> float:
        k = self.kind
        if k in (WeightKind.GSTAR, WeightKind.G1):
            return 1.0
        if k in (WeightKind.GCONST, WeightKind.G0):
            return 0.0
        if self.bounded:
            return 0.0
        raise FractionError("epsilon = inf needs a bounded custom weight (declare bounded=True)")


G_STAR = WeightFunction(WeightKind.GSTAR)
G_CONST = WeightFunction(WeightKind.GCONST)
G_0 = WeightFunction(WeightKind.G0)
G_1 = WeightFunction(WeightKind.G1)


@dataclass(frozen=True)
class FractionParams:
    epsilon: float
    gamma: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive (inf allowed), got {self.epsilon}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive (inf allowed), got {self.gamma}")

    @property
    def infinite_epsilon(self) -> bool:
        return math.isinf(self.epsilon)

    def require_finite_gamma(self) -> None:
        # gamma = inf only makes sense as a limit inside the constant bounds
        if math.isinf(self.gamma):
            raise FractionError("fractions need a finite gamma")


@dataclass(frozen=True)
class FractionValue:
    value: float
    attained_z: float
    side: Side
    method: Method

    def __float__(self) -> float:
        return self.value


# -- aggregated atom profile ---------------------------------------------------

@dataclass(frozen=True)
class _Profile:
    """Distinct atom magnitudes of all summands with normalized moment weights."""

    b: float
    mags: np.ndarray       # absolute magnitudes, strictly increasing, > 0
    t: np.ndarray          # mags / b
    w2: np.ndarray         # sum of P * x^2 / b^2 at each magnitude
    w3: np.ndarray         # sum of P * x^3 / b^3 at each magnitude


def _as_list(dists) -> list[DiscreteDistribution]:
    if isinstance(dists, DiscreteDistribution):
        return [dists]
    dists = list(dists)
    if not dists:
        raise DistributionError("at least one summand is required")
    return dists


def _profile(dists: Sequence[DiscreteDistribution]) -> _Profile:
    # identical summands are aggregated, so n copies cost as much as one
    counts = Counter(_as_list(dists))
    acc2: dict[float, list[float]] = {}
    acc3: dict[float, list[float]] = {}
    for d, c in counts.items():
        if abs(d.mean) > 1e-10 * d.std:
            raise DistributionError(f"summands must be centered; got mean {d.mean!r}")
        for x, p in zip(d.values, d.probs):
            if x == 0.0:
                continue
            m = abs(x)
            acc2.setdefault(m, []).append(c * p * x * x)
            acc3.setdefault(m, []).append(c * p * x ** 3)
    b2 = math.fsum(v for vals in acc2.values() for v in vals)
    if not b2 > 0.0:
        raise DistributionError("degenerate summands: total variance is zero")
    b = math.sqrt(b2)
    mags = np.array(sorted(acc2))
    w2 = np.array([math.fsum(acc2[m]) / b2 for m in mags])
    w3 = np.array([math.fsum(acc3[m]) / (b2 * b) for m in mags])
    return _Profile(b=b, mags=mags, t=mags / b, w2=w2, w3=w3)


def lindeberg_fraction(dists, z: float) -> float:
    """L_n(z): normalized sum of E X^2 1(|X| >= z B_n)."""
    if not z > 0:
        raise ValueError("z must be positive")
    pr = _profile(dists)
    return math.fsum(pr.w2[pr.mags >= z * pr.b])


def third_moment_fraction(dists, z: float) -> float:
    """M_n(z): normalized sum of E X^3 1(|X| < z B_n)."""
    if not z > 0:
        raise ValueError("z must be positive")
    pr = _profile(dists)
    return math.fsum(pr.w3[pr.mags < z * pr.b])


def abs_third_moment_fraction(dists, z: float) -> float:
    """Lambda_n(z): normalized sum of E |X|^3 1(|X| < z B_n)."""
    if not z > 0:
        raise ValueError("z must be positive")
    pr = _profile(dists)
    return math.fsum((pr.w2 * pr.t)[pr.mags < z * pr.b])


# -- pieces ----------------------------------------------------------------------

@dataclass(frozen=True)
class _Piece:
    left: float           # open end
    right: float          # closed end, or the open end epsilon / inf
    m: float              # M_n on the piece
    lind: float           # L_n on the piece
    right_open: bool


def _pieces(pr: _Profile, eps: float) -> list[_Piece]:
    inside = pr.mags < eps * pr.b if math.isfinite(eps) else np.ones(pr.mags.size, bool)
    n_in = int(np.count_nonzero(inside))
    # suffix sums of w2 and prefix sums of w3, taken with fsum for accuracy
    w2 = pr.w2.tolist()
    w3 = pr.w3.tolist()
    points: dict[float, int] = {}
    for i in range(n_in):
        points[float(pr.t[i])] = i + 1        # atoms with index < i + 1 lie at or below this point
    if 1.0 < eps:
        points.setdefault(1.0, int(np.searchsorted(pr.t[:n_in], 1.0, side="right")))
    if math.isfinite(eps):
        points.setdefault(eps, n_in)
    pieces = []
    left, below = 0.0, 0
    for r in sorted(points):
        m = math.fsum(w3[:below])
        lind = math.fsum(w2[below:])
        pieces.append(_Piece(left, r, m, lind, right_open=(r == eps)))
        left, below = r, points[r]
    if math.isinf(eps):
        pieces.append(_Piece(left, math.inf, math.fsum(w3[:below]), math.fsum(w2[below:]), True))
    return pieces


def _esseen_at(g: WeightFunction, b: float, gamma: float, pc: _Piece, t: float) -> float:
    mterm = gamma * abs(pc.m) * g.ratio_a(t, b) if pc.m != 0.0 else 0.0
    lterm = pc.lind * g.ratio_c(t, b) if pc.lind != 0.0 else 0.0
    return mterm + lterm


def _check_pieces_exact(g: WeightFunction, b: float, gamma: float, pc: _Piece):
    """Candidates (value, z, side) for a piece on which the integrand is monotone."""
    out = []
    if math.isinf(pc.right):
        # L_n vanishes here and A is nonincreasing: supremum at the left end
        if pc.m != 0.0:
            out.append((gamma * abs(pc.m) * g.ratio_a(pc.left, b), pc.left, Side.FROM_RIGHT))
        return out
    if pc.left > 0.0:
        out.append((_esseen_at(g, b, gamma, pc, pc.left), pc.left, Side.FROM_RIGHT))
    side = Side.FROM_LEFT if pc.right_open else Side.AT
    out.append((_esseen_at(g, b, gamma, pc, pc.right), pc.right, side))
    return out


def _branch_and_bound(g: WeightFunction, b: float, gamma: float, pieces: list[_Piece], best):
    """Refine non-monotone pieces until the global upper bound is within tolerance."""
    heap = []

    def push(pc: _Piece, lo: float, hi: float):
        ub = gamma * abs(pc.m) * g.ratio_a(lo, b) + pc.lind * g.ratio_c(hi, b)
        heapq.heappush(heap, (-ub, lo, hi, id(pc), pc))

    for pc in pieces:
        if pc.left > 0.0 and math.isfinite(pc.right) and pc.m != 0.0 and pc.lind != 0.0:
            push(pc, pc.left, pc.right)
    splits = 0
    while heap:
        neg_ub, lo, hi, _, pc = heap[0]
        if -neg_ub <= best[0] + BRANCH_BOUND_TOL * max(1.0, best[0]):
            return best
        heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        val = _esseen_at(g, b, gamma, pc, mid)
        if val > best[0]:
            best = (val, mid, Side.AT)
        push(pc, lo, mid)
        push(pc, mid, hi)
        splits += 1
        if splits > BRANCH_BOUND_MAX_SPLITS:
            raise FractionError("branch and bound did not converge")
    return best


def esseen_fraction(dists, g: WeightFunction, params: FractionParams) -> FractionValue:
    """Supremum over 0 < z < epsilon of A(z) (gamma |M_n(z)| + z L_n(z))."""
    params.require_finite_gamma()
    pr = _profile(dists)
    pieces = _pieces(pr, params.epsilon)
    best = (-math.inf, math.nan, Side.AT)
    for pc in pieces:
        for cand in _check_pieces_exact(g, pr.b, params.gamma, pc):
            if cand[0] > best[0]:
                best = cand
    if not g.is_canonical:
        best = _branch_and_bound(g, pr.b, params.gamma, pieces, best)
    if best[0] == -math.inf:
        best = (0.0, math.inf, Side.FROM_LEFT)
    value, t, side = best
    return FractionValue(value=value, attained_z=t * pr.b, side=side, method=Method.BRUTE_FORCE)


def rozovskii_fraction(dists, g: WeightFunction, params: FractionParams) -> FractionValue:
    """gamma A(eps) |M_n(eps)| plus the supremum over 0 < z < eps of C(z) L_n(z)."""
    params.require_finite_gamma()
    pr = _profile(dists)
    eps = params.epsilon
    if math.isinf(eps):
        a_eps = g.ratio_a_at_infinity()
        m_eps = math.fsum(pr.w3.tolist())
    else:
        a_eps = g.ratio_a(eps, pr.b)
        m_eps = math.fsum(pr.w3[pr.mags < eps * pr.b].tolist())
    first = params.gamma * a_eps * abs(m_eps) if m_eps != 0.0 else 0.0
    best = (0.0, math.inf, Side.FROM_LEFT)
    for pc in _pieces(pr, eps):
        if pc.lind == 0.0 or math.isinf(pc.right):
            continue
        val = g.ratio_c(pc.right, pr.b) * pc.lind
        if val > best[0]:
            best = (val, pc.right, Side.FROM_LEFT if pc.right_open else Side.AT)
    _, t, side = best
    return FractionValue(value=first + best[0], attained_z=t * pr.b, side=side, method=Method.BRUTE_FORCE)


def fraction(which: FractionKind, dists, g: WeightFunction, params: FractionParams) -> FractionValue:
    if which is FractionKind.ESSEEN:
        return esseen_fraction(dists, g, params)
    return rozovskii_fraction(dists, g, params)


# -- closed forms for i.i.d. two-point summands ------------------------------------

@dataclass(frozen=True)
class _TwoPoint:
    p: float
    q: float
    n: int
    eps: float
    gamma: float

    # predicates on n eps^2 and n against q/p and p/q, phrased through the atom
    # magnitudes sqrt(q/p) and sqrt(p/q) exactly as the brute force compares them
    @property
    def eps_root_n(self) -> float:
        return self.eps * math.sqrt(self.n)

    @property
    def lo(self) -> float:
        return math.sqrt(self.q / self.p)

    @property
    def hi(self) -> float:
        return math.sqrt(self.p / self.q)

    @property
    def inv_eps(self) -> float:
        return 0.0 if math.isinf(self.eps) else 1.0 / self.eps

    @property
    def root_npq(self) -> float:
        return math.sqrt(self.n * self.p * self.q)

    @property
    def small_atom(self) -> float:
        """sqrt(q / (n p)), the normalized small atom."""
        return math.sqrt(self.q / (self.n * self.p))

    @property
    def big_atom(self) -> float:
        """sqrt(p / (n q)), the normalized large atom magnitude."""
        return math.sqrt(self.p / (self.n * self.q))

    @property
    def m_mid(self) -> float:
        """|M_n| once only the small atom is below the level: sqrt(q^3 / (n p))."""
        return math.sqrt(self.q ** 3 / (self.n * self.p))

    @property
    def m_full(self) -> float:
        """|M_n| with both atoms below the level: (p - q) / sqrt(npq)."""
        return (self.p - self.q) / self.root_npq


def _esseen_gstar(c: _TwoPoint) -> float:
    p, q, g = c.p, c.q, c.gamma
    if c.eps_root_n <= c.lo:
        return c.eps
    if c.eps_root_n <= c.hi:
        return max(c.small_atom, g * c.m_mid + c.eps * p)
    skew = g * q * q + p * p if p > 0.5 else 0.0
    return max(q, skew, g * (p - q)) / c.root_npq


def _esseen_gconst(c: _TwoPoint) -> float:
    p, q, g = c.p, c.q, c.gamma
    if c.eps_root_n <= c.lo:
        return 1.0
    if c.eps_root_n <= c.hi:
        return max(1.0, g * q + p)
    return max(1.0, g * q + p if p > 0.5 else 0.0, g * (p - q) / p)


def _esseen_g0(c: _TwoPoint) -> float:
    below_one = _esseen_gstar(_TwoPoint(c.p, c.q, c.n, min(c.eps, 1.0), c.gamma))
    if c.eps <= 1.0 or c.p == 0.5:
        return below_one
    # n <= p/q < n eps^2: just past the large atom the third-moment term is
    # gamma (p - q) / p, which the level-one value does not always dominate
    if math.sqrt(c.n) <= c.hi < c.eps_root_n:
        return max(below_one, c.gamma * (c.p - c.q) / c.p)
    return below_one


def _esseen_g1(c: _TwoPoint) -> float:
    p, q, g = c.p, c.q, c.gamma
    if c.eps <= 1.0:
        return _esseen_gconst(c)
    if p == 0.5:
        return 1.0
    base = max(1.0, g * q + p)
    if c.eps_root_n <= c.hi:
        return max(base, g * c.m_mid + p * c.eps)
    if math.sqrt(c.n) <= c.hi:
        return max(base, (g * q * q + p * p) / c.root_npq, g * c.m_full)
    return max(base, g * (p - q) / p)


def _rozovskii_gstar(c: _TwoPoint) -> float:
    p, g = c.p, c.gamma
    if c.eps_root_n <= c.lo:
        return c.eps
    if c.eps_root_n <= c.hi:
        return g * c.m_mid + max(c.small_atom, c.eps * p)
    return g * c.m_full + max(c.small_atom, math.sqrt(p ** 3 / (c.n * c.q)))


def _rozovskii_gconst(c: _TwoPoint) -> float:
    g = c.gamma
    if c.eps_root_n <= c.lo:
        return 1.0
    if c.eps_root_n <= c.hi:
        return g * c.inv_eps * c.m_mid + 1.0
    return g * c.inv_eps * c.m_full + 1.0


def _rozovskii_g0(c: _TwoPoint) -> float:
    if c.eps <= 1.0:
        return _rozovskii_gstar(c)
    p, g, ie = c.p, c.gamma, c.inv_eps
    root_n = math.sqrt(c.n)
    if root_n <= c.lo:
        if c.eps_root_n <= c.hi:
            return g * ie * c.m_mid + 1.0
        return g * ie * c.m_full + 1.0
    if c.eps_root_n <= c.hi:
        return g * ie * c.m_mid + max(c.small_atom, p)
    if root_n <= c.hi:
        return g * ie * c.m_full + max(c.small_atom, p)
    return g * ie * c.m_full + max(c.small_atom, math.sqrt(p ** 3 / (c.n * c.q)))


def _rozovskii_g1(c: _TwoPoint) -> float:
    if c.eps <= 1.0:
        return _rozovskii_gconst(c)
    p, g = c.p, c.gamma
    root_n = math.sqrt(c.n)
    big = math.sqrt(p ** 3 / (c.n * c.q))
    if root_n <= c.lo:
        if c.eps_root_n <= c.hi:
            return g * c.m_mid + max(c.small_atom, c.eps * p)
        return g * c.m_full + max(c.small_atom, big)
    if c.eps_root_n <= c.hi:
        return g * c.m_mid + max(c.eps * p, 1.0)
    if root_n <= c.hi:
        return g * c.m_full + max(big, 1.0)
    return g * c.m_full + 1.0


_CLOSED_FORMS = {
    (FractionKind.ESSEEN, WeightKind.GSTAR): _esseen_gstar,
    (FractionKind.ESSEEN, WeightKind.GCONST): _esseen_gconst,
    (FractionKind.ESSEEN, WeightKind.G0): _esseen_g0,
    (FractionKind.ESSEEN, WeightKind.G1): _esseen_g1,
    (FractionKind.ROZOVSKII, WeightKind.GSTAR): _rozovskii_gstar,
    (FractionKind.ROZOVSKII, WeightKind.GCONST): _rozovskii_gconst,
    (FractionKind.ROZOVSKII, WeightKind.G0): _rozovskii_g0,
    (FractionKind.ROZOVSKII, WeightKind.G1): _rozovskii_g1,
}


def two_point_fraction_closed_form(which: FractionKind, g: WeightFunction, p: float, n: int,
                                   params: FractionParams) -> float:
    """Fraction for ``n`` i.i.d. copies of the two-point law with P(X > 0) = p, p in [1/2, 1)."""
    if not g.is_canonical:
        raise WeightFunctionError("closed forms exist only for the canonical weights g*, g_c, g0, g1")
    if not 0.5 <= p < 1.0:
        raise ValueError(f"p must lie in [1/2, 1), got {p}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    params.require_finite_gamma()
    case = _TwoPoint(p, 1.0 - p, int(n), params.epsilon, params.gamma)
    return _CLOSED_FORMS[(which, g.kind)](case)
