"""Two-user power-domain NOMA over a partitioned surface, plus an OMA baseline.

DR1 is the near receiver: it decodes and cancels DR2's signal before
decoding its own, so its post-SIC link is interference free.  DR2 treats
DR1's signal as noise.  Noise is normalised to one, so every SINR is a
function of the power gain and the transmit SNR ``rho_r = P_r / N_0`` only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .channel import ChannelDraw, LinkSet, NakagamiParams
from .errors import ConfigError, InvalidPartitionError

__all__ = [
    "PowerSplit",
    "RisPartition",
    "EnergyTerms",
    "ScenarioConfig",
    "RatePair",
    "default_links",
    "default_scenario",
    "partition_elements",
    "sinr_dr2",
    "sinr_dr1_decode_dr2",
    "sinr_dr1",
    "instantaneous_rates",
    "oma_instantaneous_rates",
    "db_to_linear",
]

_SUM_TOL = 1e-9


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class PowerSplit:
    """NOMA power fractions; DR2 (the far user) must get the larger share."""

    beta1_sq: float = 0.3
    beta2_sq: float = 0.7

    def __post_init__(self):
        for name in ("beta1_sq", "beta2_sq"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ConfigError(f"{name} must lie in (0, 1), got {v}")
        if abs(self.beta1_sq + self.beta2_sq - 1.0) > _SUM_TOL:
            raise ConfigError(
                f"beta1_sq + beta2_sq must equal 1, got {self.beta1_sq + self.beta2_sq}"
            )
        if not self.beta2_sq > self.beta1_sq:
            raise ConfigError(
                "beta2_sq must exceed beta1_sq: the SIC receiver DR1 may not be "
                f"over-allocated (got beta1_sq={self.beta1_sq}, beta2_sq={self.beta2_sq})"
            )

    @classmethod
    def from_beta1_sq(cls, beta1_sq: float) -> "PowerSplit":
        return cls(beta1_sq, 1.0 - beta1_sq)


@dataclass(frozen=True)
class RisPartition:
    m_total: int
    eta: float
    m1: int
    m2: int

    def __post_init__(self):
        if self.m1 + self.m2 != self.m_total:
            raise InvalidPartitionError(
                f"m1 + m2 = {self.m1 + self.m2} differs from m_total = {self.m_total}"
            )
        if self.m1 < 1 or self.m2 < 1:
            raise InvalidPartitionError(
                f"both sub-surfaces need at least one element, got ({self.m1}, {self.m2})"
            )


def partition_elements(m_total: int, eta: float) -> RisPartition:
    """Split ``m_total`` elements, giving DR1 ``floor(eta * M + 0.5)`` of them."""
    if int(m_total) != m_total or m_total < 2:
        raise InvalidPartitionError(f"m_total must be an integer >= 2, got {m_total}")
    if not (0.0 < eta < 1.0):
        raise InvalidPartitionError(f"eta must lie in (0, 1), got {eta}")
    m_total = int(m_total)
    m1 = int(math.floor(eta * m_total + 0.5))
    m2 = m_total - m1
    if m1 < 1 or m2 < 1:
        raise InvalidPartitionError(
            f"eta = {eta} leaves a sub-surface empty for M = {m_total} ({m1}, {m2})"
        )
    return RisPartition(m_total=m_total, eta=float(eta), m1=m1, m2=m2)


@dataclass(frozen=True)
class EnergyTerms:
    """Power-consumption constants for energy efficiency.

    The transmit power is tied to the SNR through the noise power:
    ``P_r = rho_r * noise_power_w``.  The default noise power makes
    ``rho_r = 1`` correspond to 1 mW.
    """

    alpha: float = 0.25
    noise_power_w: float = 1e-3
    p_re_w: float = 1e-4
    p_u_w: float = 1e-2

    def __post_init__(self):
        for name in ("alpha", "noise_power_w", "p_re_w", "p_u_w"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ConfigError(f"energy term {name} must be >= 0, got {v}")

    def transmit_power_w(self, rho_r: float) -> float:
        return rho_r * self.noise_power_w


def default_links() -> LinkSet:
    """Direct links with m = 2, reflected links with m = 5, all spreads 1."""
    reflected = NakagamiParams(5.0, 1.0)
    direct = NakagamiParams(2.0, 1.0)
    return LinkSet(
        dt_ris=reflected,
        ris_dr1=reflected,
        ris_dr2=reflected,
        direct_dr1=direct,
        direct_dr2=direct,
    )


@dataclass(frozen=True)
class ScenarioConfig:
    links: LinkSet = field(default_factory=default_links)
    partition: RisPartition = field(default_factory=lambda: partition_elements(64, 0.5))
    power: PowerSplit = field(default_factory=PowerSplit)
    rho_r: float = 100.0
    energy: EnergyTerms = field(default_factory=EnergyTerms)

    def __post_init__(self):
        if not (math.isfinite(self.rho_r) and self.rho_r >= 0.0):
            raise ConfigError(f"rho_r must be a finite non-negative number, got {self.rho_r}")

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.rho_r) if self.rho_r > 0 else -math.inf

    def with_snr_db(self, snr_db: float) -> "ScenarioConfig":
        return replace(self, rho_r=db_to_linear(snr_db))

    def with_elements(self, m_total: int, eta: Optional[float] = None) -> "ScenarioConfig":
        eta = self.partition.eta if eta is None else eta
        return replace(self, partition=partition_elements(m_total, eta))

    def with_beta1_sq(self, beta1_sq: float) -> "ScenarioConfig":
        return replace(self, power=PowerSplit.from_beta1_sq(beta1_sq))


def default_scenario() -> ScenarioConfig:
    """Default scenario: M = 64, eta = 0.5, beta1^2 = 0.3, 20 dB."""
    return ScenarioConfig()


@dataclass(frozen=True)
class RatePair:
    """Per-user rates in bits/s/Hz.

    ``kind`` is one of ``"mc"``, ``"lower"``, ``"upper"`` or
    ``"instantaneous"``; Monte-Carlo pairs also carry standard errors.
    """

    r1: float
    r2: float
    kind: str = "instantaneous"
    stderr1: Optional[float] = None
    stderr2: Optional[float] = None

    @property
    def total(self) -> float:
        return self.r1 + self.r2


def sinr_dr2(gain_sq_2, power: PowerSplit, rho_r: float):
    """DR2 decodes its own signal with DR1's share as interference."""
    g = np.asarray(gain_sq_2, dtype=float) * rho_r
    return g * power.beta2_sq / (g * power.beta1_sq + 1.0)


def sinr_dr1_decode_dr2(gain_sq_1, power: PowerSplit, rho_r: float):
    """SINR at DR1 for the first SIC stage (decoding DR2's signal)."""
    g = np.asarray(gain_sq_1, dtype=float) * rho_r
    return g * power.beta2_sq / (g * power.beta1_sq + 1.0)


def sinr_dr1(gain_sq_1, power: PowerSplit, rho_r: float):
    """DR1's own SNR after ideal cancellation of DR2's signal."""
    return power.beta1_sq * np.asarray(gain_sq_1, dtype=float) * rho_r


def instantaneous_rates(draw1: ChannelDraw, draw2: ChannelDraw, cfg: ScenarioConfig) -> RatePair:
    """Rates for one channel realisation under ideal SIC."""
    r1 = math.log2(1.0 + float(sinr_dr1(draw1.gain_sq, cfg.power, cfg.rho_r)))
    r2 = math.log2(1.0 + float(sinr_dr2(draw2.gain_sq, cfg.power, cfg.rho_r)))
    return RatePair(r1, r2)


def oma_instantaneous_rates(
    draw1_full: ChannelDraw, draw2_full: ChannelDraw, rho_r: float
) -> RatePair:
    """Equal-slot TDMA baseline: full power and the whole surface per slot.

    Both draws must have been produced with all ``M`` elements.
    """
    r1 = 0.5 * math.log2(1.0 + draw1_full.gain_sq * rho_r)
    r2 = 0.5 * math.log2(1.0 + draw2_full.gain_sq * rho_r)
    return RatePair(r1, r2)
