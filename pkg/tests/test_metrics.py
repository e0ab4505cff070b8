import dataclasses

import pytest
from hypothesis import given, strategies as st

from risnoma.errors import ConfigError
from risnoma.metrics import EnergyModel, energy_efficiency, energy_model_for, spectral_efficiency
from risnoma.noma import EnergyTerms, default_scenario


@pytest.mark.parametrize(
    "r1, r2, expected",
    [(2.0, 1.4594, 3.4594), (0.0, 0.0, 0.0), (11.693, 1.7366, 13.4296)],
)
def test_spectral_efficiency_examples(r1, r2, expected):
    assert spectral_efficiency(r1, r2) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("r1, r2", [(-0.1, 1.0), (1.0, -1e-9)])
def test_spectral_efficiency_rejects_negative(r1, r2):
    with pytest.raises(ValueError):
        spectral_efficiency(r1, r2)


def test_energy_efficiency_example():
    em = EnergyModel(alpha=1.0, p_r=1.0, p_re=0.001, p_u=0.1, m_total=100)
    assert em.total_power == pytest.approx(2.3, rel=1e-15)
    assert energy_efficiency(10.0, em) == pytest.approx(10.0 / 2.3, rel=1e-15)
    assert energy_efficiency(0.0, em) == 0.0


def test_doubling_elements_lowers_ee():
    em = EnergyModel(alpha=1.0, p_r=1.0, p_re=0.001, p_u=0.1, m_total=100)
    doubled = dataclasses.replace(em, m_total=200)
    assert energy_efficiency(10.0, doubled) < energy_efficiency(10.0, em)


def test_zero_power_model_raises():
    em = EnergyModel(alpha=0.0, p_r=0.0, p_re=0.0, p_u=0.0, m_total=10)
    with pytest.raises(ConfigError):
        energy_efficiency(1.0, em)


@pytest.mark.parametrize(
    "kwargs",
    [dict(alpha=-0.1), dict(p_r=-1.0), dict(p_re=float("nan")), dict(p_u=float("inf")), dict(m_total=-1)],
)
def test_energy_model_invariants(kwargs):
    base = dict(alpha=0.25, p_r=0.1, p_re=1e-4, p_u=1e-2, m_total=64)
    with pytest.raises(ConfigError):
        EnergyModel(**{**base, **kwargs})


powers = st.floats(min_value=1e-6, max_value=10.0)


@given(
    st.floats(min_value=0.1, max_value=50.0),
    powers, powers, powers, powers,
    st.integers(min_value=1, max_value=1000),
    st.sampled_from(["alpha", "p_r", "p_re", "p_u"]),
    st.floats(min_value=1e-3, max_value=5.0),
)
def test_ee_strictly_decreasing_in_each_power_term(se, alpha, p_r, p_re, p_u, m, name, bump):
    em = EnergyModel(alpha=alpha, p_r=p_r, p_re=p_re, p_u=p_u, m_total=m)
    bigger = dataclasses.replace(em, **{name: getattr(em, name) + bump})
    assert energy_efficiency(se, bigger) < energy_efficiency(se, em)


def test_energy_model_for_scenario():
    cfg = default_scenario()
    em = energy_model_for(cfg)
    # 20 dB over a 1 mW noise floor is 0.1 W
    assert em.p_r == pytest.approx(0.1, rel=1e-12)
    assert (em.alpha, em.p_re, em.p_u, em.m_total) == (0.25, 1e-4, 1e-2, 64)
    assert em.total_power == pytest.approx(1.25 * 0.1 + 64e-4 + 2e-2, rel=1e-12)


def test_energy_terms_scale_transmit_power():
    terms = EnergyTerms(noise_power_w=2e-3)
    assert terms.transmit_power_w(50.0) == pytest.approx(0.1, rel=1e-15)
