"""Named constants and scalar functions of the two-point extremal problem.

All constants are obtained from their defining equations (roots and
closed-form expressions), never hard-coded. ``compute_constants`` caches the
default-tolerance result.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .specfun import Bracket, Tolerance, find_root, std_normal_cdf, std_normal_cdf_array

__all__ = [
    "NamedConstants",
    "TGammaTriple",
    "compute_constants",
    "constants",
    "psi",
    "psi_tilde",
    "delta1",
    "delta1_array",
    "phi_sqrt_odds",
    "phi_sqrt_odds_derivative",
    "t_thresholds",
]

INTERIOR_DELTA = 1e-9


@dataclass(frozen=True)
class NamedConstants:
    x0: float
    kappa: float
    gamma_star: float
    x_phi: float
    c_phi: float
    p_phi: float
    p0: float

    def as_dict(self) -> dict[str, float]:
        return dict(self.__dict__)


@dataclass(frozen=True)
class TGammaTriple:
    t_gamma: float
    t1_gamma: float
    t2_gamma: float


def _x0_equation(x: float) -> float:
    s, c = math.sin(x), math.cos(x)
    return 8.0 * (c - 1.0) + 8.0 * x * s - 4.0 * x * x * c - x ** 3 * s


def _kappa_at(x: float) -> float:
    a = math.cos(x) - 1.0 + 0.5 * x * x
    b = math.sin(x) - x
    return math.hypot(a, b) / (x * x)


def _x_phi_equation(x: float) -> float:
    return x * math.exp(0.5 * x * x) / (1.0 + x * x) ** 2 - 1.0 / math.sqrt(8.0 * math.pi)


def compute_constants(tol: Tolerance = Tolerance()) -> NamedConstants:
    """Solve the defining equations for x0, kappa, gamma_*, x_Phi, C_Phi, p_Phi, p0."""
    x0 = find_root(_x0_equation, Bracket(math.pi, 2.0 * math.pi), tol)
    kappa = _kappa_at(x0)
    gamma_star = 1.0 / math.sqrt(6.0 * kappa)
    # x e^{x^2/2}(1+x^2)^{-2} has log-derivative (x^2-1)^2 / (x(1+x^2)^2) >= 0: single root
    x_phi = find_root(_x_phi_equation, Bracket(1e-12, 1.0), tol)
    c_phi = psi(x_phi)
    p_phi = 1.0 / (x_phi * x_phi + 1.0)
    p0 = find_root(lambda p: p ** 3 + p - 1.0, Bracket(0.5, 1.0), tol)
    return NamedConstants(x0=x0, kappa=kappa, gamma_star=gamma_star, x_phi=x_phi,
                          c_phi=c_phi, p_phi=p_phi, p0=p0)


@functools.lru_cache(maxsize=1)
def constants() -> NamedConstants:
    """Cached constants at the default tolerance."""
    return compute_constants()


def psi(x: float) -> float:
    """Pointwise majorant 1/(1+x^2) - Phi(-|x|) of |F(x) - Phi(x)| over unit-variance laws."""
    return 1.0 / (1.0 + x * x) - std_normal_cdf(-abs(x))


def _check_open_unit(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")


def psi_tilde(p: float) -> float:
    _check_open_unit(p)
    q = 1.0 - p
    return std_normal_cdf(math.sqrt(q / p)) - q


def delta1(p: float) -> float:
    """Uniform distance between the standardized two-point law and Phi."""
    _check_open_unit(p)
    return psi_tilde(max(p, 1.0 - p))


def delta1_array(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0.0) | (p >= 1.0)):
        raise ValueError("p must lie in (0, 1)")
    big = np.maximum(p, 1.0 - p)
    small = 1.0 - big
    return std_normal_cdf_array(np.sqrt(small / big)) - small


def phi_sqrt_odds(p: float) -> float:
    """Phi(sqrt(p/(1-p))), an increasing function of p with decreasing derivative."""
    _check_open_unit(p)
    return std_normal_cdf(math.sqrt(p / (1.0 - p)))


def phi_sqrt_odds_derivative(p: float) -> float:
    _check_open_unit(p)
    q = 1.0 - p
    return math.exp(-p / (2.0 * q)) / (2.0 * math.sqrt(2.0 * math.pi) * math.sqrt(p * q ** 3))


def t_thresholds(gamma: float) -> TGammaTriple:
    """Integration thresholds t_gamma, t_{1,gamma}, t_{2,gamma}; gamma may be ``inf``."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    gs = constants().gamma_star
    if math.isinf(gamma):
        t2 = 2.0 / gs
        return TGammaTriple(t_gamma=2.0 / gs, t1_gamma=t2, t2_gamma=t2)
    ratio = gamma / gs
    t_gamma = 2.0 / gamma * (math.sqrt(ratio * ratio + 1.0) - 1.0)
    t2 = 2.0 * max(1.0 / gamma, 1.0 / gs)
    t1 = t2 * (1.0 - math.sqrt(max(1.0 - ratio * ratio, 0.0)))
    return TGammaTriple(t_gamma=t_gamma, t1_gamma=t1, t2_gamma=t2)
