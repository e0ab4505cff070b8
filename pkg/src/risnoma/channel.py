"""Nakagami-m link statistics and the RIS cascaded gain.

With ideal continuous phase alignment the effective power gain seen by a
receiver served by ``N`` reflecting elements is

    |H|^2 = (|h| + sum_i |g_bar_i| |g_i|)^2

so only amplitudes are ever sampled; phases never appear.  The cascade sum
``S = sum_i |g_bar_i| |g_i|`` is approximated by a gamma law with shape
``a + 1`` and scale ``b`` whose first two moments match those of ``S``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specialfn
from .errors import ConfigError, DegenerateConfigurationError, DomainError

__all__ = [
    "NakagamiParams",
    "LinkSet",
    "ApproxGainDist",
    "ChannelDraw",
    "sample_nakagami",
    "nakagami_abs_mean",
    "fit_approx_dist",
    "approx_pdf",
    "approx_cdf",
    "draw_effective_channel",
    "sample_gain_components",
    "expected_gain_sq",
]


@dataclass(frozen=True)
class NakagamiParams:
    """Shape ``m`` and spread ``omega = E[X^2]`` of one Nakagami-m link."""

    m: float
    omega: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m >= 0.5):
            raise ConfigError(f"Nakagami shape m must be >= 0.5, got {self.m}")
        if not (math.isfinite(self.omega) and self.omega > 0.0):
            raise ConfigError(f"Nakagami spread omega must be > 0, got {self.omega}")


@dataclass(frozen=True)
class LinkSet:
    """Fading parameters of every link in the D2D pair.

    ``dt_ris`` describes the elements of the transmitter-to-surface vector,
    ``ris_dr1``/``ris_dr2`` the surface-to-receiver vectors and
    ``direct_dr1``/``direct_dr2`` the direct transmitter-to-receiver links.
    """

    dt_ris: NakagamiParams
    ris_dr1: NakagamiParams
    ris_dr2: NakagamiParams
    direct_dr1: NakagamiParams
    direct_dr2: NakagamiParams

    def for_user(self, which_user: int) -> tuple[NakagamiParams, NakagamiParams]:
        """Return ``(surface-to-receiver, direct)`` parameters of a receiver."""
        if which_user == 1:
            return self.ris_dr1, self.direct_dr1
        if which_user == 2:
            return self.ris_dr2, self.direct_dr2
        raise ConfigError(f"which_user must be 1 or 2, got {which_user}")


@dataclass(frozen=True)
class ApproxGainDist:
    """Moment-matched law of the cascade amplitude ``S``.

    ``S ~ Gamma(shape=a + 1, scale=b)``, so ``S^2`` has density
    ``y**((a-1)/2) exp(-sqrt(y)/b) / (2 b**(a+1) Gamma(a+1))``.  The type only
    requires a proper density (``a > -1``); the rate bounds additionally need
    ``a > 1``, which :func:`fit_approx_dist` enforces.
    """

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.b) and self.b > 0.0):
            raise ConfigError(f"scale b must be > 0, got {self.b}")
        if not (math.isfinite(self.a) and self.a > -1.0):
            raise ConfigError(f"shape a must be > -1, got {self.a}")

    @property
    def mean_amplitude(self) -> float:
        return (self.a + 1.0) * self.b


@dataclass(frozen=True)
class ChannelDraw:
    h_abs: float
    cascade_sum: float
    gain_sq: float


def sample_nakagami(params: NakagamiParams, rng: np.random.Generator, size=None):
    """Draw Nakagami-m amplitudes as the square root of gamma variates.

    ``X**2 ~ Gamma(shape=m, scale=omega/m)``.  Returns a float for
    ``size=None`` and an array otherwise.
    """
    return np.sqrt(rng.gamma(params.m, params.omega / params.m, size=size))


def _half_step_ratio(m):
    # Gamma(m + 1/2) / Gamma(m), in log space so large m does not overflow
    if m + 0.5 < 150.0:
        return specialfn.gamma(m + 0.5) / specialfn.gamma(m)
    return math.exp(specialfn.lgamma(m + 0.5) - specialfn.lgamma(m))


def nakagami_abs_mean(params: NakagamiParams) -> float:
    """``E[X] = Gamma(m + 1/2) / Gamma(m) * sqrt(omega / m)``."""
    return _half_step_ratio(params.m) * math.sqrt(params.omega / params.m)


def fit_approx_dist(
    dt_ris: NakagamiParams,
    ris_dr: NakagamiParams,
    n_elements: int,
    *,
    require_bound_domain: bool = True,
) -> ApproxGainDist:
    """Closed-form gamma fit of the cascade sum over ``n_elements`` elements.

    Uses the two-moment fit ``a + 1 = E[S]^2 / Var[S]`` and
    ``b = Var[S] / E[S]``, written through the ratio
    ``r = (mu_0 mu_l)^2 / (omega_0 omega_l)`` of squared amplitude means to
    second moments, which is independent of the spreads:

        a = N / (1 - r) - N - 1
        b = omega_0 omega_l (1 - r) / (mu_0 mu_l)

    With ``require_bound_domain`` (the default) a fit with ``a <= 1`` raises
    :class:`DegenerateConfigurationError`, because the lower rate bound is
    undefined there.
    """
    if int(n_elements) != n_elements or n_elements < 1:
        raise ConfigError(f"n_elements must be a positive integer, got {n_elements}")
    n = int(n_elements)
    mu0 = nakagami_abs_mean(dt_ris)
    mul = nakagami_abs_mean(ris_dr)
    omega_prod = dt_ris.omega * ris_dr.omega
    r = (mu0 * mul) ** 2 / omega_prod
    a = n / (1.0 - r) - n - 1.0
    b = omega_prod * (1.0 - r) / (mu0 * mul)
    if require_bound_domain and a <= 1.0:
        raise DegenerateConfigurationError(
            f"fitted shape a = {a:.6g} <= 1 for N = {n}; the lower bound needs a > 1"
        )
    return ApproxGainDist(a=a, b=b)


def _log_norm(dist):
    return math.log(2.0) + (dist.a + 1.0) * math.log(dist.b) + specialfn.lgamma(dist.a + 1.0)


def approx_pdf(dist: ApproxGainDist, y):
    """Density of the fitted power gain ``S^2`` at ``y > 0``."""
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr <= 0.0):
        raise DomainError("approx_pdf is defined for y > 0 only")
    root = np.sqrt(y_arr)
    logf = 0.5 * (dist.a - 1.0) * np.log(y_arr) - root / dist.b - _log_norm(dist)
    out = np.exp(logf)
    return float(out) if out.ndim == 0 else out


def approx_cdf(dist: ApproxGainDist, y):
    """``P(S^2 <= y) = P(a + 1, sqrt(y) / b)`` (regularised lower gamma)."""
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr <= 0.0):
        raise DomainError("approx_cdf is defined for y > 0 only")
    s = dist.a + 1.0
    flat = [specialfn.regularized_lower_gamma(s, math.sqrt(v) / dist.b) for v in y_arr.ravel()]
    out = np.asarray(flat, dtype=float).reshape(y_arr.shape)
    return float(out) if out.ndim == 0 else out


def _check_elements(n_elements):
    if int(n_elements) != n_elements or n_elements < 0:
        raise ConfigError(f"n_elements must be a non-negative integer, got {n_elements}")
    return int(n_elements)


def sample_gain_components(
    links: LinkSet,
    n_elements: int,
    which_user: int,
    rng: np.random.Generator,
    size: int,
    dt_ris_amps: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised draws of ``(|h|, S)`` for ``size`` independent trials.

    ``dt_ris_amps`` lets a caller reuse transmitter-to-surface amplitudes of
    shape ``(size, n_elements)``, e.g. when the same physical elements serve
    both receivers in different time slots.
    """
    n = _check_elements(n_elements)
    ris_dr, direct = links.for_user(which_user)
    h_abs = sample_nakagami(direct, rng, size)
    if n == 0:
        return h_abs, np.zeros(size)
    if dt_ris_amps is None:
        dt_ris_amps = sample_nakagami(links.dt_ris, rng, (size, n))
    dr_amps = sample_nakagami(ris_dr, rng, (size, n))
    return h_abs, np.einsum("ij,ij->i", dt_ris_amps, dr_amps)


def draw_effective_channel(
    links: LinkSet, n_elements: int, which_user: int, rng: np.random.Generator
) -> ChannelDraw:
    """One phase-aligned channel realisation for receiver ``which_user``."""
    h_abs, cascade = sample_gain_components(links, n_elements, which_user, rng, 1)
    h, s = float(h_abs[0]), float(cascade[0])
    return ChannelDraw(h_abs=h, cascade_sum=s, gain_sq=(h + s) ** 2)


def expected_gain_sq(links: LinkSet, n_elements: int, which_user: int) -> float:
    """``E[|H|^2]`` by expanding the square of direct plus cascade terms.

    ``omega_h + N omega_0 omega_l + N (N - 1) (mu_0 mu_l)^2 + 2 N mu_h mu_0 mu_l``
    """
    n = _check_elements(n_elements)
    ris_dr, direct = links.for_user(which_user)
    mu_h = nakagami_abs_mean(direct)
    mu0 = nakagami_abs_mean(links.dt_ris)
    mul = nakagami_abs_mean(ris_dr)
    direct_power = direct.omega
    per_element = n * links.dt_ris.omega * ris_dr.omega
    cross_elements = n * (n - 1) * (mu0 * mul) ** 2
    cross_direct = 2.0 * n * mu_h * mu0 * mul
    return direct_power + per_element + cross_elements + cross_direct
