import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special, stats

from risnoma.channel import (
    ApproxGainDist,
    ChannelDraw,
    LinkSet,
    NakagamiParams,
    approx_cdf,
    approx_pdf,
    draw_effective_channel,
    expected_gain_sq,
    fit_approx_dist,
    nakagami_abs_mean,
    sample_gain_components,
    sample_nakagami,
)
from risnoma.errors import ConfigError, DegenerateConfigurationError, DomainError
from risnoma.noma import default_links

# E[X] = Gamma(m + 1/2) / Gamma(m) for omega = 1, evaluated with mpmath at 40 digits
MU_1 = 0.88622692545275801
MU_2 = 0.93998560298662519
MU_5 = 0.97535007714522927


def rayleigh_links():
    r = NakagamiParams(1.0, 1.0)
    return LinkSet(r, r, r, r, r)


def moment_fit(dt_ris, ris_dr, n):
    """Independent two-moment gamma fit of the cascade sum (scipy kernels)."""
    def mu(p):
        return math.exp(special.gammaln(p.m + 0.5) - special.gammaln(p.m)) * math.sqrt(p.omega / p.m)

    mean = n * mu(dt_ris) * mu(ris_dr)
    var = n * (dt_ris.omega * ris_dr.omega - (mu(dt_ris) * mu(ris_dr)) ** 2)
    return mean**2 / var - 1.0, var / mean


# --- parameter types ---------------------------------------------------------

@pytest.mark.parametrize("m, omega", [(0.49, 1.0), (1.0, 0.0), (1.0, -2.0), (float("nan"), 1.0)])
def test_nakagami_params_invariants(m, omega):
    with pytest.raises(ConfigError):
        NakagamiParams(m, omega)


def test_link_set_rejects_unknown_user():
    with pytest.raises(ConfigError):
        default_links().for_user(3)


@pytest.mark.parametrize("a, b", [(1.0, 0.0), (-1.0, 1.0), (2.0, -0.1)])
def test_approx_gain_dist_invariants(a, b):
    with pytest.raises(ConfigError):
        ApproxGainDist(a, b)


# --- sampling ----------------------------------------------------------------

@pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 5.0, 30.0])
def test_sample_nakagami_mean_square(m):
    rng = np.random.default_rng(11)
    x = sample_nakagami(NakagamiParams(m, 4.0), rng, 1_000_000)
    assert np.mean(x**2) == pytest.approx(4.0, rel=5e-3)


@pytest.mark.parametrize("m, expected", [(1.0, MU_1), (5.0, MU_5)])
def test_sample_nakagami_abs_mean(m, expected):
    rng = np.random.default_rng(12)
    x = sample_nakagami(NakagamiParams(m, 1.0), rng, 1_000_000)
    assert abs(np.mean(x) - expected) < 4.0 * np.std(x) / 1000.0


def test_sampler_moment_check_default_scenario():
    links = default_links()
    rng = np.random.default_rng(13)
    n = 1_000_000
    for p in (links.dt_ris, links.ris_dr1, links.ris_dr2, links.direct_dr1, links.direct_dr2):
        x = sample_nakagami(p, rng, n)
        assert abs(np.mean(x) - nakagami_abs_mean(p)) < 4.0 * np.std(x) / math.sqrt(n)


def test_sample_nakagami_scalar():
    v = sample_nakagami(NakagamiParams(2.0), np.random.default_rng(0))
    assert np.ndim(v) == 0 and v >= 0


# --- amplitude mean ------------------------------------------------------------

@pytest.mark.parametrize("m, expected", [(1.0, MU_1), (2.0, MU_2), (5.0, MU_5)])
def test_nakagami_abs_mean_examples(m, expected):
    assert nakagami_abs_mean(NakagamiParams(m, 1.0)) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("m, omega", [(0.5, 1.0), (2.0, 3.0), (5.0, 0.2), (400.0, 1.0)])
def test_nakagami_abs_mean_vs_quadrature(m, omega):
    pdf = stats.nakagami(m, scale=math.sqrt(omega)).pdf
    ref, _ = integrate.quad(lambda x: x * pdf(x), 0, np.inf, epsabs=0, epsrel=1e-12, limit=200)
    assert nakagami_abs_mean(NakagamiParams(m, omega)) == pytest.approx(ref, rel=1e-9)


# --- moment-matched fit ----------------------------------------------------------

@pytest.mark.parametrize(
    "m0, ml, om0, oml, n",
    [
        (1.0, 1.0, 1.0, 1.0, 16),
        (5.0, 5.0, 1.0, 1.0, 10),
        (5.0, 5.0, 1.0, 1.0, 50),
        (2.0, 3.5, 0.3, 2.0, 7),
        (0.5, 8.0, 1.0, 1.0, 100),
    ],
)
def test_fit_matches_moment_matching(m0, ml, om0, oml, n):
    p0, pl = NakagamiParams(m0, om0), NakagamiParams(ml, oml)
    a_ref, b_ref = moment_fit(p0, pl, n)
    d = fit_approx_dist(p0, pl, n)
    assert d.a == pytest.approx(a_ref, rel=1e-9)
    assert d.b == pytest.approx(b_ref, rel=1e-9)


def test_fit_rayleigh_sixteen_elements():
    d = fit_approx_dist(NakagamiParams(1.0), NakagamiParams(1.0), 16)
    # mpmath evaluation of the moment fit
    assert d.a == pytest.approx(24.759132158696361, rel=1e-12)
    assert d.b == pytest.approx(0.48784138133771438, rel=1e-12)
    # the rounded example values (24.75, 0.48798) agree to three digits
    assert d.a == pytest.approx(24.75, rel=1e-3)
    assert d.b == pytest.approx(0.48798, rel=1e-3)


def test_fit_single_rayleigh_element_is_degenerate():
    p = NakagamiParams(1.0)
    with pytest.raises(DegenerateConfigurationError):
        fit_approx_dist(p, p, 1)
    d = fit_approx_dist(p, p, 1, require_bound_domain=False)
    # a + 1 = (pi/4)^2 / (1 - pi^2/16)
    assert d.a + 1.0 == pytest.approx((math.pi / 4) ** 2 / (1 - math.pi**2 / 16), rel=1e-12)


def test_fit_rejects_zero_elements():
    with pytest.raises(ConfigError):
        fit_approx_dist(NakagamiParams(5.0), NakagamiParams(5.0), 0)


@given(st.integers(min_value=2, max_value=500), st.floats(min_value=0.5, max_value=50.0))
def test_fit_scale_is_element_independent(n, m):
    p = NakagamiParams(m)
    d1 = fit_approx_dist(p, p, n, require_bound_domain=False)
    d2 = fit_approx_dist(p, p, n + 1, require_bound_domain=False)
    assert d1.b == d2.b
    assert d2.a > d1.a


# --- fitted density and CDF -------------------------------------------------------

def test_approx_pdf_example():
    assert approx_pdf(ApproxGainDist(1.0, 1.0), 1.0) == pytest.approx(
        1.0 / (2.0 * math.e), rel=1e-14
    )


def _pdf_integral(d, lo=0.0, hi=np.inf):
    # substitute y = s^2 so the integrand is a smooth gamma density in s
    f = lambda s: 2.0 * s * approx_pdf(d, s * s) if s > 0 else 0.0
    mode = max(d.a * d.b, d.b)
    pts = [p for p in (0.5 * mode, mode, 2 * mode) if lo < p < hi]
    if hi == np.inf:
        head, _ = integrate.quad(f, lo, 4 * mode, points=pts, epsabs=0, epsrel=1e-12, limit=400)
        tail, _ = integrate.quad(f, 4 * mode, np.inf, epsabs=0, epsrel=1e-12, limit=400)
        return head + tail
    val, _ = integrate.quad(f, lo, hi, points=pts or None, epsabs=0, epsrel=1e-12, limit=400)
    return val


@pytest.mark.parametrize("m_total", [16, 36, 64, 100])
def test_approx_pdf_normalized_on_default_grid(m_total):
    links = default_links()
    d = fit_approx_dist(links.dt_ris, links.ris_dr1, m_total // 2)
    assert _pdf_integral(d) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("a, b", [(1.0, 1.0), (24.75, 0.48798), (0.5, 3.0)])
def test_approx_pdf_normalized(a, b):
    assert _pdf_integral(ApproxGainDist(a, b)) == pytest.approx(1.0, abs=1e-8)


def test_approx_pdf_mode_matches_cascade_histogram():
    p = NakagamiParams(1.0)
    d = fit_approx_dist(p, p, 16)
    mode = ((d.a - 1.0) * d.b) ** 2
    rng = np.random.default_rng(21)
    links = rayleigh_links()
    _, s = sample_gain_components(links, 16, 1, rng, 1_000_000)
    y = s * s
    counts, edges = np.histogram(y, bins=400, range=(0.0, np.quantile(y, 0.999)))
    centres = 0.5 * (edges[1:] + edges[:-1])
    # parabola through the top of the histogram smooths bin noise
    top = counts >= 0.85 * counts.max()
    c2, c1, _ = np.polyfit(centres[top], counts[top], 2)
    peak = -c1 / (2 * c2)
    assert peak == pytest.approx(mode, rel=0.03)


@pytest.mark.parametrize("y", [0.0, -1.0])
def test_approx_pdf_cdf_domain(y):
    d = ApproxGainDist(2.0, 1.0)
    with pytest.raises(DomainError):
        approx_pdf(d, y)
    with pytest.raises(DomainError):
        approx_cdf(d, y)


def test_approx_cdf_examples():
    d = ApproxGainDist(1.0, 1.0)
    assert approx_cdf(d, 4.0) == pytest.approx(1.0 - 3.0 * math.exp(-2.0), rel=1e-13)
    assert approx_cdf(d, 1e-300) == pytest.approx(0.0, abs=1e-300)
    d2 = ApproxGainDist(24.75, 0.48798)
    assert approx_cdf(d2, (50 * d2.b * (d2.a + 1)) ** 2) >= 1.0 - 1e-9


@pytest.mark.parametrize("a, b", [(1.0, 1.0), (24.75, 0.48798), (94.25, 0.0999)])
@pytest.mark.parametrize("q", [0.3, 1.0, 1.6])
def test_approx_cdf_vs_pdf_quadrature(a, b, q):
    d = ApproxGainDist(a, b)
    y = (q * d.mean_amplitude) ** 2
    assert approx_cdf(d, y) == pytest.approx(_pdf_integral(d, 0.0, math.sqrt(y)), abs=1e-8)


@given(st.floats(min_value=1e-6, max_value=1e4), st.floats(min_value=0.0, max_value=100.0))
def test_approx_cdf_monotone(y, dy):
    d = ApproxGainDist(24.75, 0.48798)
    assert approx_cdf(d, y) <= approx_cdf(d, y + dy)


def test_approx_pdf_vectorised():
    d = ApproxGainDist(3.0, 0.5)
    ys = np.array([0.5, 1.0, 2.0])
    assert np.allclose(approx_pdf(d, ys), [approx_pdf(d, y) for y in ys], rtol=1e-15)
    assert np.allclose(approx_cdf(d, ys), [approx_cdf(d, y) for y in ys], rtol=1e-15)


# --- KS distance between the fitted and exact laws --------------------------------

def _exact_cascade_cdf_gap(m, n, h=5e-4, xmax=5.0, n_nodes=400):
    """sup |F_S - F_fit| for S = sum of n products of Nakagami(m, 1) amplitudes.

    The product CDF is F_X(x) = int f_A(t) P(m, m x^2 / t^2) dt (Gauss-Legendre),
    discretised on cells centred at i*h; the n-fold sum is an FFT convolution
    and the comparison is made at the cell edges.
    """
    nodes, w = np.polynomial.legendre.leggauss(n_nodes)
    lo, hi = 1e-3, 3.0
    t = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
    w = w * 0.5 * (hi - lo)
    f_a = 2 * m**m / special.gamma(m) * t ** (2 * m - 1) * np.exp(-m * t * t)
    cells = int(round(xmax / h))
    edges = (np.arange(cells + 1) + 0.5) * h
    cdf_x = np.array([np.sum(w * f_a * special.gammainc(m, m * (x / t) ** 2)) for x in edges])
    pmf = np.diff(np.concatenate([[0.0], cdf_x]))
    size = cells * n + 1
    nfft = 1 << int(np.ceil(np.log2(size + cells)))
    pmf_sum = np.fft.irfft(np.fft.rfft(pmf, nfft) ** n, nfft)[:size]
    cdf_s = np.cumsum(pmf_sum)
    pts = (np.arange(size) + 0.5) * h
    d = fit_approx_dist(NakagamiParams(m), NakagamiParams(m), n)
    # S <= s  <=>  S^2 <= s^2, so compare on the amplitude scale
    fit = approx_cdf(d, pts[::50] ** 2)
    exact = cdf_s[::50]
    return float(np.max(np.abs(exact - fit)))


def test_ks_distance_decreases_with_elements():
    gaps = [_exact_cascade_cdf_gap(5.0, n) for n in (4, 16, 64)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[0] < 1e-3


def test_ks_oracle_agrees_with_empirical_cdf():
    # the exact-law gap is far below sampling noise, so only consistency is checked
    rng = np.random.default_rng(5)
    n_draws = 200_000
    _, s = sample_gain_components(default_links(), 16, 1, rng, n_draws)
    d = fit_approx_dist(NakagamiParams(5.0), NakagamiParams(5.0), 16)
    s.sort()
    fit = approx_cdf(d, s[::97] ** 2)
    emp = (np.arange(n_draws)[::97] + 1) / n_draws
    ks = np.max(np.abs(emp - fit))
    # 1.63 / sqrt(n) is the 1% critical value of the KS statistic
    assert ks < 1.63 / math.sqrt(n_draws)


# --- channel draws ---------------------------------------------------------------

def test_draw_without_surface():
    draw = draw_effective_channel(default_links(), 0, 1, np.random.default_rng(1))
    assert draw.cascade_sum == 0.0
    assert draw.gain_sq == pytest.approx(draw.h_abs**2, rel=1e-15)


@pytest.mark.parametrize("user", [1, 2])
def test_draw_consistency(user):
    rng = np.random.default_rng(2)
    for n in (1, 5, 40):
        d = draw_effective_channel(default_links(), n, user, rng)
        assert isinstance(d, ChannelDraw)
        assert d.h_abs >= 0 and d.cascade_sum >= 0
        assert d.gain_sq == pytest.approx((d.h_abs + d.cascade_sum) ** 2, rel=1e-15)


def test_draw_deterministic_limit():
    hard = NakagamiParams(500.0, 1.0)
    links = LinkSet(hard, hard, hard, hard, hard)
    rng = np.random.default_rng(3)
    gains = [draw_effective_channel(links, 10, 1, rng).gain_sq for _ in range(200)]
    assert np.mean(gains) == pytest.approx(121.0, rel=0.02)


def test_draw_rejects_negative_elements():
    with pytest.raises(ConfigError):
        draw_effective_channel(default_links(), -1, 1, np.random.default_rng(0))


# --- second moment -----------------------------------------------------------------

def test_expected_gain_without_surface():
    links = default_links()
    assert expected_gain_sq(links, 0, 1) == links.direct_dr1.omega


def test_expected_gain_examples():
    # mpmath term-by-term expansion
    assert expected_gain_sq(default_links(), 10, 1) == pytest.approx(110.33309531747357, rel=1e-13)
    assert expected_gain_sq(rayleigh_links(), 1, 1) == pytest.approx(3.392081999207927, rel=1e-13)


def test_expected_gain_terms_brute_force():
    # independent expansion of E[(h + sum x_i y_i)^2] from the first two moments
    links = LinkSet(
        NakagamiParams(2.0, 0.5), NakagamiParams(3.0, 2.0), NakagamiParams(1.0),
        NakagamiParams(1.5, 0.7), NakagamiParams(1.0),
    )
    n = 7

    def mu(p):
        return math.exp(special.gammaln(p.m + 0.5) - special.gammaln(p.m)) * math.sqrt(p.omega / p.m)

    ex = mu(links.dt_ris) * mu(links.ris_dr1)
    ex2 = links.dt_ris.omega * links.ris_dr1.omega
    var_s = n * (ex2 - ex**2)
    mean_s = n * ex
    want = links.direct_dr1.omega + var_s + mean_s**2 + 2 * mu(links.direct_dr1) * mean_s
    assert expected_gain_sq(links, n, 1) == pytest.approx(want, rel=1e-13)


@pytest.mark.parametrize("n", [4, 16, 64])
def test_expected_gain_matches_monte_carlo(n):
    rng = np.random.default_rng(100 + n)
    h, s = sample_gain_components(default_links(), n, 1, rng, 200_000)
    g = (h + s) ** 2
    stderr = np.std(g, ddof=1) / math.sqrt(g.size)
    assert abs(np.mean(g) - expected_gain_sq(default_links(), n, 1)) < 3 * stderr
