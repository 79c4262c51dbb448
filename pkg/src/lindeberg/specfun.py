"""Special functions and bracketed root finding.

Everything here is a pure function of its arguments. The incomplete gamma
functions and the Bessel function are implemented directly (series and
continued fractions); the normal law is evaluated through ``erfc``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special as _sp

__all__ = [
    "Tolerance",
    "Bracket",
    "RootError",
    "std_normal_cdf",
    "std_normal_cdf_array",
    "upper_gamma",
    "lower_gamma",
    "bessel_i0",
    "bessel_i0e",
    "find_root",
    "golden_section_max",
]

SQRT2 = math.sqrt(2.0)
_TINY = 1e-300


class RootError(ArithmeticError):
    """Raised when a bracket has no sign change or iteration does not converge."""


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-14
    rel_tol: float = 1e-14
    max_iter: int = 500

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty bracket [{self.lo}, {self.hi}]")


def std_normal_cdf(x: float) -> float:
    """Standard normal distribution function Phi(x)."""
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    return 0.5 * math.erfc(-x / SQRT2)


def std_normal_cdf_array(x) -> np.ndarray:
    """Vectorised Phi for numpy arrays (same erfc formulation)."""
    return 0.5 * _sp.erfc(-np.asarray(x, dtype=float) / SQRT2)


# -- incomplete gamma ---------------------------------------------------------

def _check_gamma_args(r: float, x: float) -> None:
    if not r > 0:
        raise ValueError(f"gamma order must be positive, got r={r}")
    if not x >= 0:
        raise ValueError(f"gamma argument must be non-negative, got x={x}")


def _lower_series(r: float, x: float, eps: float = 1e-17, max_iter: int = 10_000) -> float:
    # sum_{k>=0} x^k / (r (r+1) ... (r+k)), times x^r e^{-x}
    term = 1.0 / r
    total = term
    denom = r
    for _ in range(max_iter):
        denom += 1.0
        term *= x / denom
        total += term
        if term < total * eps:
            break
    else:
        raise RootError(f"lower gamma series did not converge (r={r}, x={x})")
    return total * math.exp(-x + r * math.log(x))


def _upper_cf(r: float, x: float, eps: float = 1e-17, max_iter: int = 10_000) -> float:
    # modified Lentz on the Legendre continued fraction
    b = x + 1.0 - r
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, max_iter + 1):
        an = -i * (i - r)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    else:
        raise RootError(f"upper gamma continued fraction did not converge (r={r}, x={x})")
    return h * math.exp(-x + r * math.log(x))


def upper_gamma(r: float, x: float) -> float:
    """Upper incomplete gamma function, the integral of t^(r-1) e^(-t) over [x, inf)."""
    _check_gamma_args(r, x)
    if x == 0.0:
        return math.gamma(r)
    if math.isinf(x):
        return 0.0
    if x < r + 1.0:
        return math.gamma(r) - _lower_series(r, x)
    return _upper_cf(r, x)


def lower_gamma(r: float, x: float) -> float:
    """Lower incomplete gamma function, the integral over [0, x]."""
    _check_gamma_args(r, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.gamma(r)
    if x < r + 1.0:
        return _lower_series(r, x)
    return math.gamma(r) - _upper_cf(r, x)


# -- Bessel I0 ----------------------------------------------------------------

_BESSEL_SERIES_MAX = 25.0


def _i0e_series(z: float) -> float:
    # e^{-z} sum (z/2)^{2k}/(k!)^2, accumulated with the exponential folded in
    # so the partial sums stay O(1) for moderate z.
    y = 0.25 * z * z
    term = math.exp(-z)
    total = term
    k = 0
    while True:
        k += 1
        term *= y / (k * k)
        total += term
        if term < total * 1e-17 and k > y ** 0.5:
            return total


def _i0e_asymptotic(z: float) -> float:
    # e^{-z} I0(z) ~ (2 pi z)^{-1/2} sum ((2k-1)!!)^2 / (k! (8z)^k)
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        nxt = term * (2 * k - 1) ** 2 / (k * 8.0 * z)
        if nxt > term:  # divergent tail reached
            break
        term = nxt
        total += term
        if term < 1e-17 * total:
            break
    return total / math.sqrt(2.0 * math.pi * z)


def bessel_i0e(z: float) -> float:
    """Exponentially scaled modified Bessel function ``exp(-z) * I0(z)``."""
    if not z >= 0:
        raise ValueError(f"bessel_i0 requires z >= 0, got {z}")
    if z <= _BESSEL_SERIES_MAX:
        return _i0e_series(z)
    return _i0e_asymptotic(z)


def bessel_i0(z: float) -> float:
    """Modified Bessel function of the first kind, order zero."""
    if not z >= 0:
        raise ValueError(f"bessel_i0 requires z >= 0, got {z}")
    if z <= _BESSEL_SERIES_MAX:
        y = 0.25 * z * z
        term = total = 1.0
        k = 0
        while True:
            k += 1
            term *= y / (k * k)
            total += term
            if term < total * 1e-17:
                return total
    return bessel_i0e(z) * math.exp(z)


# -- root finding and 1-d maximisation ----------------------------------------

def find_root(f: Callable[[float], float], bracket: Bracket, tol: Tolerance = Tolerance()) -> float:
    """Root of ``f`` inside ``bracket``.

    Secant (false-position) steps are interleaved with bisection so the
    bracket at least halves every second evaluation; the result is fully
    deterministic.
    """
    lo, hi = bracket.lo, bracket.hi
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if not (math.isfinite(flo) and math.isfinite(fhi)):
        raise RootError(f"non-finite function value at bracket ends ({flo}, {fhi})")
    if (flo > 0) == (fhi > 0):
        raise RootError(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")

    use_secant = True
    for _ in range(tol.max_iter):
        width = hi - lo
        if width <= tol.abs_tol + tol.rel_tol * max(abs(lo), abs(hi)):
            return 0.5 * (lo + hi)
        x = lo - flo * width / (fhi - flo) if use_secant else 0.5 * (lo + hi)
        if not lo < x < hi:
            x = 0.5 * (lo + hi)
        use_secant = not use_secant
        fx = f(x)
        if fx == 0.0:
            return x
        if (fx > 0) == (flo > 0):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
    raise RootError(f"find_root did not converge in {tol.max_iter} iterations; last bracket [{lo}, {hi}]")


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, iters: int = 80) -> tuple[float, float]:
    """Maximise a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``.

    The best point ever evaluated (ends included) is returned, so a maximum
    sitting at an end of the interval is not lost.
    """
    best_x, best_f = lo, f(lo)
    fhi = f(hi)
    if fhi > best_f:
        best_x, best_f = hi, fhi
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc > best_f:
            best_x, best_f = c, fc
        if fd > best_f:
            best_x, best_f = d, fd
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
        if b - a <= 1e-15 * max(1.0, abs(a)):
            break
    for x, fx in ((c, fc), (d, fd)):
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f
