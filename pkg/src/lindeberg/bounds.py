"""Upper and lower bounds for exact and asymptotic constants.

Lower bounds come from the two-point family (Esseen and Rozovskii ratios
Delta_1(p) / L_1(p)) and from the symmetric three-point family. Upper bounds
for the asymptotically exact constants are closed expressions in incomplete
gamma functions. Optimisation over p is a dense grid scan followed by
golden-section refinement around the best cell.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .constants import constants, delta1_array, t_thresholds
from .fractions import FractionParams
from .specfun import (Bracket, Tolerance, bessel_i0e, find_root, golden_section_max,
                      lower_gamma, std_normal_cdf, upper_gamma)

__all__ = [
    "Target",
    "Kind",
    "KFunction",
    "ConstantBound",
    "Optimizer1D",
    "ReferenceRow",
    "resolve_gamma",
    "aex_upper_esseen",
    "aex_upper_rozovskii",
    "k_function",
    "two_point_fraction_n1",
    "sup_over_p",
    "exact_constant_lower_bounds",
    "abe_lower_esseen",
    "abe_lower_esseen_objective",
    "abe_lower_rozovskii",
    "asymptotic_lower_bounds",
    "bessel_peak",
    "gamma0",
    "aex_two_sided",
    "reference_tables",
    "lookup_reference",
    "TABLE3_ESSEEN_POINTS",
    "TABLE3_ROZOVSKII_POINTS",
    "TABLE4_GAMMAS",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)
LOW_AEX = 1.0 / (2.0 * SQRT_2PI)
COND_UP_G1_SWITCH = 1.1251
COND_UP_G1_FLOOR = 0.2344


class Target(enum.Enum):
    AE_ESSEEN_AEX_UPPER = "AE_Esseen_AEX_upper"
    AE_ROZOVSKII_AEX_UPPER = "AE_Rozovskii_AEX_upper"
    C_E_LOWER = "C_E_lower"
    C_R_LOWER = "C_R_lower"
    A_E_LOWER = "A_E_lower"
    A_R_LOWER = "A_R_lower"
    C_E_G1_LOWER = "C_E_g1_lower"
    C_R_G1_LOWER = "C_R_g1_lower"
    ABE_G0_ESSEEN = "ABE_g0_Esseen"
    ABE_G0_ROZOVSKII = "ABE_g0_Rozovskii"
    LOW_AEX = "LowAEX"
    COND_UP_AEX_G0 = "CondUpAEX_g0"
    COND_UP_AEX_G1 = "CondUpAEX_g1"
    AEX_G0_ESSEEN = "AEX_g0_Esseen"
    AEX_G0_ROZOVSKII = "AEX_g0_Rozovskii"


class Kind(enum.Enum):
    UPPER = "upper"
    LOWER = "lower"


class KFunction(enum.Enum):
    """Ratio Delta_1(p) / L_1(p) for a fraction type and weight."""

    E0 = "E0"
    R0 = "R0"
    ESTAR = "EStar"
    RSTAR = "RStar"
    E1 = "E1"
    R1 = "R1"


@dataclass(frozen=True)
class ConstantBound:
    target: Target
    kind: Kind
    params: FractionParams | None
    value: float
    witness_p: float | None = None
    formula: str = ""

    def __post_init__(self):
        if not self.value >= 0.0:
            raise ValueError(f"bound value must be non-negative, got {self.value}")
        if self.witness_p is not None and not 0.5 < self.witness_p < 1.0:
            raise ValueError(f"witness p must lie in (1/2, 1), got {self.witness_p}")

    def as_dict(self) -> dict:
        return {
            "target": self.target.value,
            "kind": self.kind.value,
            "epsilon": None if self.params is None else self.params.epsilon,
            "gamma": None if self.params is None else self.params.gamma,
            "value": self.value,
            "witness_p": self.witness_p,
            "formula": self.formula,
        }


@dataclass(frozen=True)
class Optimizer1D:
    grid_points: int = 10_000
    refine_iters: int = 80
    clamp_delta: float = 1e-9

    def __post_init__(self):
        if self.grid_points < 100:
            raise ValueError("grid_points must be >= 100")
        if self.refine_iters < 1:
            raise ValueError("refine_iters must be >= 1")
        if not 0.0 < self.clamp_delta < 0.25:
            raise ValueError("clamp_delta must lie in (0, 1/4)")


def resolve_gamma(gamma) -> float:
    """Accept a number, ``inf`` or the literal ``gstar`` for the constant gamma_*."""
    if isinstance(gamma, str):
        key = gamma.strip().lower()
        if key in ("gstar", "gamma*", "γ*", "gamma_star"):
            return constants().gamma_star
        return float(key)
    return float(gamma)


# -- upper bounds for asymptotically exact constants ----------------------------

def _esseen_aex_value(eps: float, gamma: float) -> float:
    kappa = constants().kappa
    t_gamma = t_thresholds(gamma).t_gamma
    if math.isinf(gamma):
        coef = math.sqrt(12.0 * kappa) / 6.0
    else:
        coef = math.sqrt(2.0 * (6.0 * kappa * gamma * gamma + 1.0)) / (6.0 * gamma)
    if math.isinf(eps):
        # x -> 0: both lower-gamma terms vanish faster than their prefactors grow
        bracket = coef * math.gamma(1.5)
    else:
        x = t_gamma * t_gamma / (2.0 * eps * eps)
        bracket = (kappa / eps * lower_gamma(1.0, x) + eps / 12.0 * lower_gamma(2.0, x)
                   + coef * upper_gamma(1.5, x))
    return 4.0 / SQRT_2PI + bracket / math.pi


def _rozovskii_aex_value(eps: float, gamma: float) -> float:
    if math.isinf(eps):
        # the eps/6 * Gamma(2, x) term grows without bound
        return math.inf
    kappa = constants().kappa
    th = t_thresholds(gamma)
    x1 = th.t1_gamma ** 2 / (2.0 * eps * eps)
    x2 = th.t2_gamma ** 2 / (2.0 * eps * eps)
    tail = 0.0 if math.isinf(gamma) else (
        math.sqrt(2.0) / (6.0 * gamma)
        * (math.sqrt(math.pi) / 2.0 - lower_gamma(1.5, x1) - upper_gamma(1.5, x2)))
    bracket = (kappa / eps * lower_gamma(1.0, x1) + eps / 12.0 * lower_gamma(2.0, x1)
               + eps / 6.0 * upper_gamma(2.0, x2) + tail)
    return 4.0 / SQRT_2PI + bracket / math.pi


def aex_upper_esseen(params: FractionParams) -> ConstantBound:
    """Incomplete-gamma upper bound for the Esseen-type asymptotically exact constant."""
    return ConstantBound(Target.AE_ESSEEN_AEX_UPPER, Kind.UPPER, params,
                         _esseen_aex_value(params.epsilon, params.gamma), formula="incomplete-gamma")


def aex_upper_rozovskii(params: FractionParams) -> ConstantBound:
    """Incomplete-gamma upper bound for the Rozovskii-type constant; infinite for eps = inf."""
    return ConstantBound(Target.AE_ROZOVSKII_AEX_UPPER, Kind.UPPER, params,
                         _rozovskii_aex_value(params.epsilon, params.gamma), formula="incomplete-gamma")


# -- two-point ratios (K functions) ---------------------------------------------

def two_point_fraction_n1(which: KFunction, p, params: FractionParams) -> np.ndarray:
    """L_1 for a single two-point summand, vectorised over p in (1/2, 1)."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0.5) | (p >= 1.0)):
        raise ValueError("p must lie in (1/2, 1)")
    eps, gam = params.epsilon, params.gamma
    if math.isinf(gam):
        raise ValueError("gamma must be finite")
    q = 1.0 - p
    inv_eps = 0.0 if math.isinf(eps) else 1.0 / eps
    root_pq = np.sqrt(p * q)
    small = np.sqrt(q / p)
    m_mid = np.sqrt(q ** 3 / p)
    m_full = (p - q) / root_pq
    big = np.sqrt(p ** 3 / q)
    # eps^2 <= q/p  <=>  p <= 1/(eps^2+1);  eps^2 <= p/q  <=>  p >= eps^2/(eps^2+1)
    if math.isinf(eps):
        below_small = np.zeros(p.shape, bool)
        below_big = np.zeros(p.shape, bool)
    else:
        below_small = p <= 1.0 / (eps * eps + 1.0)
        below_big = p >= eps * eps / (eps * eps + 1.0)

    with np.errstate(invalid="ignore", over="ignore"):
        eps_p = eps * p
        if which in (KFunction.ESTAR, KFunction.E0):
            e_star = np.select(
                [below_small, below_big],
                [np.full(p.shape, eps), np.maximum(small, gam * m_mid + eps_p)],
                np.maximum.reduce([q, gam * q * q + p * p, gam * (p - q)]) / root_pq)
            if which is KFunction.ESTAR or eps <= 1.0:
                return e_star
            at_one = np.maximum(small, gam * m_mid + p)
            return np.where(below_big, at_one, np.maximum(at_one, gam * (p - q) / p))
        if which in (KFunction.RSTAR, KFunction.R0):
            if which is KFunction.RSTAR or eps <= 1.0:
                return np.select(
                    [below_small, below_big],
                    [np.full(p.shape, eps), gam * m_mid + np.maximum(small, eps_p)],
                    gam * m_full + np.maximum(small, big))
            tail = np.maximum(small, p)
            return np.where(below_big, gam * inv_eps * m_mid + tail, gam * inv_eps * m_full + tail)
        if which is KFunction.E1:
            if eps <= 1.0:
                return np.where(below_small, 1.0, np.maximum(1.0, gam * q + p))
            base = np.maximum(1.0, gam * q + p)
            return np.where(below_big,
                            np.maximum(base, gam * m_mid + eps_p),
                            np.maximum.reduce([base, (gam * q * q + p * p) / root_pq, gam * m_full]))
        if which is KFunction.R1:
            if eps <= 1.0:
                return np.where(below_small, 1.0, 1.0 + gam * inv_eps * m_mid)
            return np.where(below_big,
                            gam * m_mid + np.maximum(eps_p, 1.0),
                            gam * m_full + np.maximum(big, 1.0))
    raise ValueError(f"unknown K function {which!r}")


def k_function(which: KFunction, p, params: FractionParams):
    """Delta_1(p) / L_1(p); returns a float for scalar ``p``."""
    out = delta1_array(p) / two_point_fraction_n1(which, p, params)
    return float(out) if np.ndim(out) == 0 else out


# -- optimisation over p ------------------------------------------------------------

def _evaluate(f: Callable, x: np.ndarray) -> np.ndarray:
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([float(f(float(v))) for v in x])


def sup_over_p(f: Callable, opt: Optimizer1D = Optimizer1D(),
               lo: float = 0.5, hi: float = 1.0) -> tuple[float, float]:
    """Maximise ``f`` over the open interval (lo, hi); returns ``(p*, f(p*))``.

    ``f`` may be vectorised; otherwise it is called point by point.
    """
    a, b = lo + opt.clamp_delta, hi - opt.clamp_delta
    grid = np.linspace(a, b, opt.grid_points)
    vals = _evaluate(f, grid)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        raise ValueError(f"objective is not finite at p = {grid[bad][0]!r}")
    i = int(np.argmax(vals))
    left, right = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    x, fx = golden_section_max(lambda t: float(_evaluate(f, np.array([t]))[0]), left, right,
                               iters=opt.refine_iters)
    if vals[i] > fx:
        return float(grid[i]), float(vals[i])
    return float(x), float(fx)


# -- lower bounds for exact constants ----------------------------------------------

_K_TARGETS = (
    (KFunction.E0, Target.C_E_LOWER),
    (KFunction.R0, Target.C_R_LOWER),
    (KFunction.ESTAR, Target.A_E_LOWER),
    (KFunction.RSTAR, Target.A_R_LOWER),
    (KFunction.E1, Target.C_E_G1_LOWER),
    (KFunction.R1, Target.C_R_G1_LOWER),
)


def exact_constant_lower_bounds(params: FractionParams, opt: Optimizer1D = Optimizer1D()) -> list[ConstantBound]:
    """Best of the symmetric floor and the supremum of the matching K function, per target.

    The floor uses p = 1/2, where the fraction for g0 and g* equals min(1, eps)
    and the fraction for g1 equals 1.
    """
    half = std_normal_cdf(1.0) - 0.5
    out = []
    for which, target in _K_TARGETS:
        floor = half if which in (KFunction.E1, KFunction.R1) else half / min(1.0, params.epsilon)
        p_star, value = sup_over_p(lambda p, w=which: k_function(w, p, params), opt)
        if value >= floor:
            out.append(ConstantBound(target, Kind.LOWER, params, value, p_star, f"sup K_{which.value}"))
        else:
            out.append(ConstantBound(target, Kind.LOWER, params, floor, None, "symmetric floor"))
    return out


# -- asymptotically best constants -----------------------------------------------------

def abe_lower_esseen_objective(p, gamma: float):
    p = np.asarray(p, dtype=float)
    q = 1.0 - p
    denom = np.maximum.reduce([q, gamma * q * q + p * p, gamma * (p - q)])
    return (p + 1.0) / (3.0 * SQRT_2PI * denom)


def abe_lower_esseen(gamma: float, opt: Optimizer1D = Optimizer1D()) -> ConstantBound:
    """Two-point lower bound for the Esseen-type asymptotically best constant (free of eps)."""
    gamma = resolve_gamma(gamma)
    if not (gamma > 0 and math.isfinite(gamma)):
        raise ValueError(f"gamma must be positive and finite, got {gamma}")
    p_star, value = sup_over_p(lambda p: abe_lower_esseen_objective(p, gamma), opt)
    return ConstantBound(Target.ABE_G0_ESSEEN, Kind.LOWER, FractionParams(math.inf, gamma),
                         value, p_star, "sup over two-point laws")


def abe_lower_rozovskii(params: FractionParams) -> ConstantBound:
    a = params.gamma / max(params.epsilon, 1.0)
    if a < 2.0 / 3.0:
        s5 = math.sqrt(5.0)
        value = (1.0 + s5) / (3.0 * SQRT_2PI * (2.0 * a * (s5 - 2.0) + 3.0 - s5))
        return ConstantBound(Target.ABE_G0_ROZOVSKII, Kind.LOWER, params, value,
                             (s5 - 1.0) / 2.0, "a < 2/3")
    return ConstantBound(Target.ABE_G0_ROZOVSKII, Kind.LOWER, params, 1.0 / SQRT_2PI, None, "a >= 2/3")


# -- asymptotic lower bounds from the three-point family -------------------------------

def bessel_peak() -> tuple[float, float]:
    """Maximiser and maximum of sqrt(a) e^{-a} I0(a) over a > 0."""
    return golden_section_max(lambda a: math.sqrt(a) * bessel_i0e(a), 0.05, 5.0, iters=200)


def _cond_up_g1(eps: float) -> tuple[float, str]:
    if eps <= 1.0:
        return 0.5, "eps <= 1"
    if eps <= COND_UP_G1_SWITCH:
        a = 1.0 / (eps * eps)
        return 0.5 * math.sqrt(a) * bessel_i0e(a), "sqrt(a) e^-a I0(a) / 2 at a = eps^-2"
    return COND_UP_G1_FLOOR, "peak floor"


def asymptotic_lower_bounds(params: FractionParams) -> list[ConstantBound]:
    eps = params.epsilon
    g1_value, g1_formula = _cond_up_g1(eps)
    return [
        ConstantBound(Target.LOW_AEX, Kind.LOWER, params, LOW_AEX, None, "1/(2 sqrt(2 pi))"),
        ConstantBound(Target.COND_UP_AEX_G0, Kind.LOWER, params, 0.5 / min(eps, 1.0), None,
                      "1/(2 min(eps, 1))"),
        ConstantBound(Target.COND_UP_AEX_G1, Kind.LOWER, params, g1_value, None, g1_formula),
    ]


def gamma0(opt: Optimizer1D = Optimizer1D()) -> float:
    """The gamma at which the Esseen asymptotically-best lower bound falls to 1/(2 sqrt(2 pi))."""
    return find_root(lambda g: abe_lower_esseen(g, opt).value - LOW_AEX, Bracket(1.0, 100.0),
                     Tolerance(abs_tol=1e-12, rel_tol=1e-12, max_iter=300))


def aex_two_sided(params: FractionParams) -> dict[str, tuple[ConstantBound, ConstantBound]]:
    """Lower and upper bounds of the asymptotically exact constants for g0."""
    g0 = _gamma0_cached()
    gamma = params.gamma
    if math.isinf(gamma) or gamma >= g0:
        # beyond gamma0 the two-point bound equals 1/(2 sqrt(2 pi)) by definition of gamma0
        e_low = ConstantBound(Target.AEX_G0_ESSEEN, Kind.LOWER, params, LOW_AEX, None, "gamma >= gamma0")
    else:
        abe = abe_lower_esseen(gamma)
        e_low = ConstantBound(Target.AEX_G0_ESSEEN, Kind.LOWER, params, abe.value, abe.witness_p,
                              "asymptotically best lower bound")
    if math.isinf(gamma):
        r_value, r_formula = 1.0 / SQRT_2PI, "a >= 2/3"
    else:
        r = abe_lower_rozovskii(params)
        r_value, r_formula = r.value, r.formula
    r_low = ConstantBound(Target.AEX_G0_ROZOVSKII, Kind.LOWER, params, r_value, None, r_formula)
    return {
        "esseen": (e_low, aex_upper_esseen(params)),
        "rozovskii": (r_low, aex_upper_rozovskii(params)),
    }


_GAMMA0: list[float] = []


def _gamma0_cached() -> float:
    if not _GAMMA0:
        _GAMMA0.append(gamma0())
    return _GAMMA0[0]


# -- table layouts and quoted reference data ------------------------------------------

GSTAR = "gstar"
INF = math.inf

TABLE3_ESSEEN_POINTS = (
    (0.6, 0.3), (1.21, 0.2), (2.06, 0.2), (INF, 0.2), (1.48, 0.4), (INF, 0.4),
    (1.89, GSTAR), (2.03, GSTAR), (INF, GSTAR), (1.0, GSTAR), (1.0, 0.67), (1.0, INF),
    (2.24, 1.0), (INF, 1.0), (3.07, INF), (3.2, 5.0), (3.28, 4.0), (4.0, 2.4),
    (5.0, 2.06), (5.37, 2.0), (INF, 1.83), (INF, INF),
)
TABLE3_ROZOVSKII_POINTS = (
    (1.21, 0.2), (1.89, 0.2), (2.77, 0.2), (5.39, 0.2), (1.41, 0.4), (1.76, 0.4),
    (1.99, 0.4), (2.63, 0.4), (0.5, GSTAR), (1.0, GSTAR), (1.52, GSTAR), (1.89, GSTAR),
    (1.99, GSTAR), (2.12, GSTAR), (3.0, GSTAR), (5.0, GSTAR),
)
TABLE4_GAMMAS = (0.1, 0.2, 0.4, 0.56, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0)


@dataclass(frozen=True)
class ReferenceRow:
    """A quoted upper bound; ``epsilon == 0`` with ``gamma is None`` is the eps -> 0+ row."""

    epsilon: float
    gamma: float | str | None
    value: float

    @property
    def gamma_value(self) -> float | None:
        return None if self.gamma is None else resolve_gamma(self.gamma)


_REF_ESSEEN = (
    (1.21, 0.2, 2.8904), (1.24, 0.2, 2.8900), (INF, 0.2, 2.8846), (1.76, 0.4, 2.7360),
    (5.94, 0.4, 2.7300), (INF, 0.4, 2.7299), (1.0, GSTAR, 2.7367), (1.87, GSTAR, 2.6999),
    (INF, GSTAR, 2.6919), (1.0, 0.72, 2.7298), (1.0, INF, 2.7286), (4.35, 1.0, 2.6600),
    (INF, 1.0, 2.6588), (INF, 0.97, 2.6599), (2.56, INF, 2.6500), (2.62, 5.0, 2.6500),
    (2.65, 4.0, 2.6500), (2.74, 3.0, 2.6500), (3.13, 2.0, 2.6500), (4.0, 1.62, 2.6500),
    (5.37, 1.5, 2.6500), (INF, 1.43, 2.6500), (INF, INF, 2.6409), (0.0, None, INF),
)
_REF_ROZOVSKII = (
    (1.21, 0.2, 2.8700), (5.39, 0.2, 2.8635), (1.76, 0.4, 2.6999), (2.63, 0.4, 2.6933),
    (0.5, GSTAR, 3.0396), (1.0, GSTAR, 2.7286), (1.99, GSTAR, 2.6600), (2.12, GSTAR, 2.6593),
    (3.0, GSTAR, 2.6769), (5.0, GSTAR, 2.7562), (0.0, None, INF),
)


def reference_tables() -> dict[str, tuple[ReferenceRow, ...]]:
    """Quoted (not computed) upper bounds for the absolute constants A_E and A_R."""
    return {
        "esseen": tuple(ReferenceRow(*r) for r in _REF_ESSEEN),
        "rozovskii": tuple(ReferenceRow(*r) for r in _REF_ROZOVSKII),
    }


def lookup_reference(which: str, epsilon: float, gamma) -> float | None:
    """Quoted upper bound at exactly (epsilon, gamma), or None when the cell is absent."""
    g = resolve_gamma(gamma)
    for row in reference_tables()[which]:
        if row.gamma is None:
            continue
        gv = row.gamma_value
        same_g = (math.isinf(g) and math.isinf(gv)) or (not math.isinf(g) and math.isclose(g, gv, rel_tol=1e-12))
        same_e = (math.isinf(epsilon) and math.isinf(row.epsilon)) or math.isclose(epsilon, row.epsilon, rel_tol=1e-12)
        if same_g and same_e:
            return row.value
    return None
