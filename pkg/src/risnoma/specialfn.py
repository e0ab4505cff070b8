"""Scalar special functions used by the closed-form rate bounds.

Everything here works on Python floats and has no state, so the functions
are safe to call from any thread.  Only the real, positive-argument branches
that the rate expressions need are implemented.

Gamma and log-gamma wrap :mod:`math` and only add the domain and overflow
errors of this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    DomainError,
    GammaOverflowError,
    NonConvergenceError,
    ParameterError,
)

__all__ = [
    "SeriesControl",
    "DEFAULT_SERIES",
    "gamma",
    "lgamma",
    "digamma",
    "lower_incomplete_gamma",
    "regularized_lower_gamma",
    "hyp2f1_1_1_2",
    "hyp_pfq",
    "hyp_pfq_with_error",
]

_EPS = 2.220446049250313e-16
_GAMMA_MAX_ARG = 171.6243769563027


@dataclass(frozen=True)
class SeriesControl:
    """Stopping rules for the power-series kernels.

    ``max_abs_z`` is a hard cap on the series argument; beyond it the
    ascending series is useless in double precision for every parameter set
    this package produces.
    """

    rel_tol: float = 1e-12
    max_terms: int = 5000
    max_abs_z: float = 1e4

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1e-6):
            raise ValueError(f"rel_tol must lie in (0, 1e-6), got {self.rel_tol}")
        if self.max_terms < 100:
            raise ValueError(f"max_terms must be >= 100, got {self.max_terms}")
        if self.max_abs_z <= 0:
            raise ValueError("max_abs_z must be positive")


DEFAULT_SERIES = SeriesControl()


def gamma(x: float) -> float:
    """Gamma function for positive real ``x``."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"gamma is only defined here for x > 0, got {x}")
    if x > _GAMMA_MAX_ARG:
        raise GammaOverflowError(f"gamma({x}) overflows a double")
    return math.gamma(x)


def lgamma(x: float) -> float:
    """Natural log of the gamma function for positive real ``x``."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"lgamma is only defined here for x > 0, got {x}")
    return math.lgamma(x)


# Bernoulli-number coefficients B_2k / (2k) of the digamma asymptotic series
_DIGAMMA_ASYMP = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


def digamma(x: float) -> float:
    """Logarithmic derivative of the gamma function, ``x > 0``."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"digamma is only defined here for x > 0, got {x}")
    shift = 0.0
    while x < 10.0:
        shift -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    poly = 0.0
    for c in reversed(_DIGAMMA_ASYMP):
        poly = poly * inv2 + c
    return shift + math.log(x) - 0.5 / x - poly * inv2


def _log_gamma_prefactor(s, x):
    # log of x**s * exp(-x) / Gamma(s)
    return s * math.log(x) - x - lgamma(s)


def _lower_gamma_series(s, x, max_iter):
    # sum_n x**n / (s (s+1) ... (s+n)); converges quickly for x < s + 1
    term = 1.0 / s
    total = term
    for n in range(1, max_iter):
        term *= x / (s + n)
        total += term
        if abs(term) < abs(total) * _EPS:
            return total
    raise NonConvergenceError(f"incomplete gamma series did not converge for s={s}, x={x}")


def _upper_gamma_cf(s, x, max_iter):
    # modified Lentz evaluation of the continued fraction for Gamma(s, x)
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, max_iter):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise NonConvergenceError(f"incomplete gamma fraction did not converge for s={s}, x={x}")


def _check_incgamma_args(s, x):
    if not s > 0.0:
        raise DomainError(f"incomplete gamma requires s > 0, got {s}")
    if not x >= 0.0:
        raise DomainError(f"incomplete gamma requires x >= 0, got {x}")


def regularized_lower_gamma(s: float, x: float, max_iter: int = 100_000) -> float:
    """``P(s, x) = gamma(s, x) / Gamma(s)``; usable far beyond gamma overflow."""
    s, x = float(s), float(x)
    _check_incgamma_args(s, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    log_pref = _log_gamma_prefactor(s, x)
    if x < s + 1.0:
        return min(1.0, math.exp(log_pref) * _lower_gamma_series(s, x, max_iter))
    return max(0.0, 1.0 - math.exp(log_pref) * _upper_gamma_cf(s, x, max_iter))


def lower_incomplete_gamma(s: float, x: float, max_iter: int = 100_000) -> float:
    """Lower incomplete gamma ``int_0^x t**(s-1) e**-t dt``."""
    s, x = float(s), float(x)
    _check_incgamma_args(s, x)
    if x == 0.0:
        return 0.0
    full = gamma(s)
    if math.isinf(x):
        return full
    if x < s + 1.0:
        return math.exp(s * math.log(x) - x) * _lower_gamma_series(s, x, max_iter)
    upper = math.exp(s * math.log(x) - x) * _upper_gamma_cf(s, x, max_iter)
    return max(0.0, full - upper)


class _Neumaier:
    __slots__ = ("total", "comp")

    def __init__(self):
        self.total = 0.0
        self.comp = 0.0

    def add(self, v):
        t = self.total + v
        if abs(self.total) >= abs(v):
            self.comp += (self.total - t) + v
        else:
            self.comp += (v - t) + self.total
        self.total = t

    @property
    def value(self):
        return self.total + self.comp


def _tail_small(term, ratio, partial, rel_tol):
    # geometric bound on the remaining tail once the term ratio is below 1
    if ratio >= 1.0:
        return False
    tail = abs(term) * max(1.0, ratio / (1.0 - ratio))
    return tail <= rel_tol * abs(partial)


_HYP2F1_SERIES_RANGE = (-9.0, 0.9)


def hyp2f1_1_1_2(z: float, ctrl: SeriesControl = DEFAULT_SERIES) -> float:
    """Gauss series ``2F1(1, 1; 2; z)`` for real ``z < 1``.

    Non-positive arguments go through the Pfaff transformation
    ``2F1(1,1;2;z) = 2F1(1,1;2;w) / (1 - z)`` with ``w = z / (z - 1)`` in
    ``[0, 1)``, which turns the alternating (and for ``z <= -1`` divergent)
    series into one with positive terms.  Outside ``[-9, 0.9]`` the series
    needs ``O(1 / (1 - w))`` terms, so the closed form ``ln(1 - z) / (-z)``
    is used there.
    """
    z = float(z)
    if not z < 1.0:
        raise DomainError(f"2F1(1,1;2;z) needs z < 1, got {z}")
    if z == 0.0:
        return 1.0
    if z < _HYP2F1_SERIES_RANGE[0] or z > _HYP2F1_SERIES_RANGE[1]:
        return math.log1p(-z) / (-z)
    if z < 0.0:
        w = z / (z - 1.0)
        scale = 1.0 / (1.0 - z)
    else:
        w = z
        scale = 1.0
    acc = _Neumaier()
    power = 1.0
    small = 0
    for k in range(ctrl.max_terms):
        term = power / (k + 1.0)
        acc.add(term)
        ratio = w * (k + 1.0) / (k + 2.0)
        if _tail_small(term, ratio, acc.value, ctrl.rel_tol):
            small += 1
            if small >= 3:
                return scale * acc.value
        else:
            small = 0
        power *= w
    raise NonConvergenceError(
        f"2F1(1,1;2;{z}) not converged after {ctrl.max_terms} terms"
    )


def _is_nonpositive_int(v):
    return v <= 0.0 and v == math.floor(v)


def hyp_pfq_with_error(
    numer: Sequence[float],
    denom: Sequence[float],
    z: float,
    ctrl: SeriesControl = DEFAULT_SERIES,
) -> tuple[float, float]:
    """Generalised hypergeometric series and an absolute rounding-error estimate.

    Sums ``sum_k prod(numer)_k / prod(denom)_k * z**k / k!`` term by term with
    Neumaier compensation.  Convergence is only tested once ``k`` is past
    every negative parameter (before that the terms can still grow), and is
    declared after three consecutive terms whose geometric tail bound falls
    below ``ctrl.rel_tol`` of the partial sum.

    The returned error estimate is ``eps * sum(|term|)``: it stays tiny for
    well-conditioned evaluations and exposes catastrophic cancellation in
    alternating series with a large argument.
    """
    numer = [float(v) for v in numer]
    denom = [float(v) for v in denom]
    z = float(z)
    if len(numer) > len(denom):
        raise ParameterError("only p <= q series (entire functions) are supported")
    for b in denom:
        if _is_nonpositive_int(b):
            raise ParameterError(f"denominator parameter {b} is a non-positive integer")
    if z == 0.0:
        return 1.0, 0.0
    if abs(z) > ctrl.max_abs_z:
        raise NonConvergenceError(
            f"|z| = {abs(z):g} exceeds the series cap {ctrl.max_abs_z:g}"
        )

    params = numer + denom
    k_safe = max([0] + [int(math.ceil(-v)) + 1 for v in params if v < 0.0])
    terminating = any(_is_nonpositive_int(a) for a in numer)

    acc = _Neumaier()
    term = 1.0
    abs_sum = 0.0
    small = 0
    for k in range(ctrl.max_terms):
        acc.add(term)
        abs_sum += abs(term)
        ratio = z / (k + 1.0)
        for a in numer:
            ratio *= a + k
        for b in denom:
            ratio /= b + k
        nxt = term * ratio
        if terminating and nxt == 0.0:
            value = acc.value
            return value, _EPS * abs_sum
        if not math.isfinite(nxt):
            raise NonConvergenceError(f"pFq terms overflowed at k={k}, z={z}")
        if k >= k_safe and _tail_small(term, abs(ratio), acc.value, ctrl.rel_tol):
            small += 1
            if small >= 3:
                value = acc.value
                return value, _EPS * abs_sum + abs(nxt)
        else:
            small = 0
        term = nxt
    raise NonConvergenceError(
        f"pFq({numer}; {denom}; {z}) not converged after {ctrl.max_terms} terms"
    )


def hyp_pfq(
    numer: Sequence[float],
    denom: Sequence[float],
    z: float,
    ctrl: SeriesControl = DEFAULT_SERIES,
) -> float:
    """Generalised hypergeometric function ``pFq(numer; denom; z)``."""
    return hyp_pfq_with_error(numer, denom, z, ctrl)[0]
