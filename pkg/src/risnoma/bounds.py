"""Closed-form ergodic-rate bounds.

Lower bounds integrate the rate against the moment-matched gain law (which
ignores the direct link).  With ``S ~ Gamma(a + 1, b)`` and
``lam = k b^2`` the integral ``E[ln(1 + k S^2)]`` has the exact expansion

    2 psi(a+1) + ln(lam)
      + F3 / (a (a-1) lam)
      + pi csc(a pi/2) F1 / ((a+2) lam^(a/2+1) Gamma(a+1))
      + pi sec(a pi/2) F2 / ((a+1) lam^((a+1)/2) Gamma(a+1))

where, with ``z = -1 / (4 lam)``,

    F1 = 1F2(1 + a/2; 3/2, 2 + a/2; z)
    F2 = 1F2((a+1)/2; 1/2, (a+3)/2; z)
    F3 = 2F3(1, 1; 2, 1 - a/2, (3-a)/2; z)

DR1 uses ``k = beta1^2 rho``; DR2 is the difference of the expansions at
``k = c1 rho`` and ``k = c2 rho``, where the digamma terms cancel and the
logarithms collapse to ``ln(c1 / c2)``.  The csc/sec poles at integer ``a``
are removable; such shapes are nudged off the pole by ``1e-6``.  Close to a
pole the individual terms grow like ``1/|a - n|`` and cancel, so within
``STABLE_GAP`` of an integer the expansion is evaluated by quintic
interpolation in ``a`` from six nodes outside that band.

Upper bounds move the expectation inside the (concave) rate function, so
they only need ``E[|H|^2]`` from :func:`risnoma.channel.expected_gain_sq`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from . import specialfn
from .channel import ApproxGainDist, LinkSet, expected_gain_sq, fit_approx_dist
from .errors import DomainError, NonConvergenceError, SingularParameterError
from .noma import PowerSplit, RatePair, ScenarioConfig
from .specialfn import DEFAULT_SERIES, SeriesControl

__all__ = [
    "BoundInputs",
    "RateBounds",
    "NudgedShapeWarning",
    "SINGULAR_GUARD",
    "STABLE_GAP",
    "regularize_shape",
    "log_rate_expectation",
    "lower_rate_dr1",
    "lower_rate_dr2",
    "upper_rate_dr1",
    "upper_rate_dr2",
    "bound_inputs",
    "rate_bounds",
]

SINGULAR_GUARD = 1e-6
# direct evaluation closer than this to an integer shape loses digits
STABLE_GAP = 0.02
_LN2 = math.log(2.0)
_EPS = 2.220446049250313e-16
# contributions whose magnitude bound is below this are dropped (nats)
_NEGLIGIBLE = 1e-30
# evaluations whose rounding-error estimate exceeds this relative level fail
_MAX_REL_ERR = 1e-8


class NudgedShapeWarning(UserWarning):
    """The fitted shape sat on a removable pole and was moved off it."""


@dataclass(frozen=True)
class BoundInputs:
    """Everything the four bounds of one receiver depend on."""

    dist: ApproxGainDist
    xi1: float
    xi2: float
    xi3: float
    c1: float
    c2: float
    expected_gain: float


@dataclass(frozen=True)
class RateBounds:
    lower: RatePair
    upper: RatePair
    diagnostics: tuple[str, ...] = ()


def regularize_shape(a: float, nudge: bool = True) -> tuple[float, str | None]:
    """Move ``a`` off the integer poles of the lower-bound expression.

    Returns ``(a_used, note)``; ``note`` is ``None`` when ``a`` was left alone.
    """
    if not a > 1.0:
        raise DomainError(f"the lower bound needs a > 1, got a = {a}")
    nearest = round(a)
    gap = a - nearest
    if abs(gap) >= SINGULAR_GUARD:
        return a, None
    if not nudge:
        raise SingularParameterError(
            f"a = {a!r} is within {SINGULAR_GUARD:g} of the pole at {nearest}"
        )
    direction = 1.0 if gap >= 0.0 else -1.0
    a_used = nearest + direction * SINGULAR_GUARD
    return a_used, f"shape a={a!r} nudged to {a_used!r} (pole at {nearest})"


def _pole_term(log_pref, sign, numer, denom, z, ctrl):
    """``sign * exp(log_pref) * pFq(numer; denom; z)`` plus an error bound."""
    # |1F2| with numerator <= its paired denominator is bounded by 0F1 at |z|,
    # itself below exp(2 sqrt|z|)
    log_bound = log_pref + 2.0 * math.sqrt(abs(z))
    if log_bound < math.log(_NEGLIGIBLE):
        return 0.0, math.exp(log_bound)
    if log_pref > 700.0:
        raise NonConvergenceError("pole-term prefactor overflows; SNR too low for the closed form")
    value, err = specialfn.hyp_pfq_with_error(numer, denom, z, ctrl)
    pref = math.exp(log_pref)
    return sign * pref * value, pref * err


def _sin_cos_half_pi(a):
    """``sin(pi a / 2)`` and ``cos(pi a / 2)`` with exact argument reduction."""
    t = 0.5 * a
    n = round(t)
    f = t - n  # exact
    sign = -1.0 if n % 2 else 1.0
    return sign * math.sin(math.pi * f), sign * math.cos(math.pi * f)


def _expansion_parts(a, b, k, ctrl):
    """Pieces of ``E[ln(1 + k S^2)]`` that depend on ``k`` (apart from ln lam).

    Returns ``(value, abs_err, ln_lam)`` with ``value`` the sum of the two pole
    terms and the 2F3 term.
    """
    lam = k * b * b
    ln_lam = math.log(lam)
    z = -0.25 / lam
    lg = specialfn.lgamma(a + 1.0)

    s, c = _sin_cos_half_pi(a)
    log_csc = math.log(math.pi) - math.log(abs(s)) - math.log(a + 2.0) - (0.5 * a + 1.0) * ln_lam - lg
    log_sec = math.log(math.pi) - math.log(abs(c)) - math.log(a + 1.0) - 0.5 * (a + 1.0) * ln_lam - lg
    t_csc, e_csc = _pole_term(
        log_csc, math.copysign(1.0, s), [1.0 + 0.5 * a], [1.5, 2.0 + 0.5 * a], z, ctrl
    )
    t_sec, e_sec = _pole_term(
        log_sec, math.copysign(1.0, c), [0.5 * (a + 1.0)], [0.5, 0.5 * (a + 3.0)], z, ctrl
    )
    f3, e_f3 = specialfn.hyp_pfq_with_error(
        [1.0, 1.0], [2.0, 1.0 - 0.5 * a, 0.5 * (3.0 - a)], z, ctrl
    )
    scale = 1.0 / (a * (a - 1.0) * lam)
    value = t_csc + t_sec + scale * f3
    err = e_csc + e_sec + scale * e_f3
    # rounding of a-dependent parameters is amplified by 1/|a - n| near a pole
    gap = max(abs(a - round(a)), _EPS)
    err += _EPS * (abs(t_csc) + abs(t_sec) + abs(scale * f3)) / gap
    return value, err, ln_lam


def _lagrange_weights(nodes, x):
    w = []
    for i, xi in enumerate(nodes):
        wi = 1.0
        for j, xj in enumerate(nodes):
            if j != i:
                wi *= (x - xj) / (xi - xj)
        w.append(wi)
    return w


def _smooth_parts(a, b, k, ctrl):
    """:func:`_expansion_parts` with removable poles bridged by interpolation."""
    n = round(a)
    gap = a - n
    if abs(gap) >= STABLE_GAP:
        return _expansion_parts(a, b, k, ctrl)
    h = STABLE_GAP
    if n - 3.0 * h > 1.0:
        offsets = (-3.0 * h, -2.0 * h, -h, h, 2.0 * h, 3.0 * h)
    else:
        # next to the a = 1 boundary: one-sided nodes
        offsets = tuple(j * h for j in range(1, 7))
    parts = [_expansion_parts(n + o, b, k, ctrl) for o in offsets]
    vals = [p[0] for p in parts]
    w = _lagrange_weights(offsets, gap)
    value = sum(wi * v for wi, v in zip(w, vals))
    err = sum(abs(wi) * p[1] for wi, p in zip(w, parts))
    # truncation estimate: change when the outermost pair of nodes is dropped
    inner = offsets[1:-1]
    w4 = _lagrange_weights(inner, gap)
    err += abs(value - sum(wi * v for wi, v in zip(w4, vals[1:-1])))
    return value, err, parts[0][2]


def _check_precision(value, err, what):
    if err > _MAX_REL_ERR * max(abs(value), 1e-300):
        raise NonConvergenceError(
            f"{what}: closed form lost precision (error estimate {err:.3g} "
            f"for value {value:.6g}); the argument is outside the usable range"
        )


def _shape(dist, nudge):
    a, note = regularize_shape(dist.a, nudge)
    if note is not None:
        warnings.warn(note, NudgedShapeWarning, stacklevel=3)
    return a


def log_rate_expectation(
    dist: ApproxGainDist,
    k: float,
    *,
    nudge: bool = True,
    ctrl: SeriesControl = DEFAULT_SERIES,
) -> float:
    """``E[ln(1 + k Y)]`` in nats for ``Y`` following the fitted gain law."""
    if k < 0.0:
        raise DomainError(f"k must be non-negative, got {k}")
    if k == 0.0:
        return 0.0
    a = _shape(dist, nudge)
    parts, err, ln_lam = _smooth_parts(a, dist.b, k, ctrl)
    psi = 2.0 * specialfn.digamma(a + 1.0)
    value = psi + ln_lam + parts
    err += 4.0 * _EPS * (abs(psi) + abs(ln_lam))
    _check_precision(value, err, "log_rate_expectation")
    return value


def lower_rate_dr1(
    dist: ApproxGainDist,
    beta1_sq: float,
    rho_r: float,
    *,
    nudge: bool = True,
    ctrl: SeriesControl = DEFAULT_SERIES,
) -> float:
    """Lower bound on DR1's ergodic rate (bits/s/Hz)."""
    return log_rate_expectation(dist, beta1_sq * rho_r, nudge=nudge, ctrl=ctrl) / _LN2


def lower_rate_dr2(
    dist: ApproxGainDist,
    c1: float,
    c2: float,
    rho_r: float,
    *,
    nudge: bool = True,
    ctrl: SeriesControl = DEFAULT_SERIES,
) -> float:
    """Lower bound on DR2's ergodic rate (bits/s/Hz).

    ``c1 = beta1^2 + beta2^2`` and ``c2 = beta1^2``.
    """
    if not (c1 >= c2 > 0.0):
        raise DomainError(f"need c1 >= c2 > 0, got c1={c1}, c2={c2}")
    if rho_r < 0.0:
        raise DomainError(f"rho_r must be non-negative, got {rho_r}")
    if rho_r == 0.0 or c1 == c2:
        return 0.0
    a = _shape(dist, nudge)
    p1, e1, _ = _smooth_parts(a, dist.b, c1 * rho_r, ctrl)
    p2, e2, _ = _smooth_parts(a, dist.b, c2 * rho_r, ctrl)
    value = math.log(c1 / c2) + (p1 - p2)
    err = e1 + e2 + 4.0 * _EPS * (abs(p1) + abs(p2))
    _check_precision(value, err, "lower_rate_dr2")
    return value / _LN2


def upper_rate_dr1(links: LinkSet, m1: int, beta1_sq: float, rho_r: float) -> float:
    """Jensen upper bound on DR1's ergodic rate (bits/s/Hz)."""
    xi1 = beta1_sq * rho_r
    return math.log1p(xi1 * expected_gain_sq(links, m1, 1)) / _LN2


def upper_rate_dr2(links: LinkSet, m2: int, power: PowerSplit, rho_r: float) -> float:
    """Jensen upper bound on DR2's ergodic rate (bits/s/Hz)."""
    gain = expected_gain_sq(links, m2, 2)
    xi2 = (power.beta1_sq + power.beta2_sq) * rho_r
    xi3 = power.beta1_sq * rho_r
    return (math.log1p(xi2 * gain) - math.log1p(xi3 * gain)) / _LN2


def bound_inputs(cfg: ScenarioConfig, which_user: int) -> BoundInputs:
    """Fit the gain law of one receiver's sub-surface and collect constants."""
    n = cfg.partition.m1 if which_user == 1 else cfg.partition.m2
    ris_dr, _ = cfg.links.for_user(which_user)
    c1 = cfg.power.beta1_sq + cfg.power.beta2_sq
    c2 = cfg.power.beta1_sq
    return BoundInputs(
        dist=fit_approx_dist(cfg.links.dt_ris, ris_dr, n),
        xi1=cfg.power.beta1_sq * cfg.rho_r,
        xi2=c1 * cfg.rho_r,
        xi3=c2 * cfg.rho_r,
        c1=c1,
        c2=c2,
        expected_gain=expected_gain_sq(cfg.links, n, which_user),
    )


def rate_bounds(
    cfg: ScenarioConfig, *, nudge: bool = True, ctrl: SeriesControl = DEFAULT_SERIES
) -> RateBounds:
    """All four bounds for a scenario."""
    in1 = bound_inputs(cfg, 1)
    in2 = bound_inputs(cfg, 2)
    notes = []
    for user, inp in ((1, in1), (2, in2)):
        _, note = regularize_shape(inp.dist.a, nudge)
        if note is not None:
            notes.append(f"DR{user}: {note}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NudgedShapeWarning)
        lo1 = lower_rate_dr1(in1.dist, cfg.power.beta1_sq, cfg.rho_r, nudge=nudge, ctrl=ctrl)
        lo2 = lower_rate_dr2(in2.dist, in2.c1, in2.c2, cfg.rho_r, nudge=nudge, ctrl=ctrl)
    up1 = upper_rate_dr1(cfg.links, cfg.partition.m1, cfg.power.beta1_sq, cfg.rho_r)
    up2 = upper_rate_dr2(cfg.links, cfg.partition.m2, cfg.power, cfg.rho_r)
    return RateBounds(
        lower=RatePair(lo1, lo2, kind="lower"),
        upper=RatePair(up1, up2, kind="upper"),
        diagnostics=tuple(notes),
    )
