"""Spectral and energy efficiency."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError
from .noma import ScenarioConfig

__all__ = ["EnergyModel", "energy_model_for", "spectral_efficiency", "energy_efficiency"]


@dataclass(frozen=True)
class EnergyModel:
    """Consumed power ``(1 + alpha) p_r + m_total p_re + 2 p_u`` (watts)."""

    alpha: float
    p_r: float
    p_re: float
    p_u: float
    m_total: int

    def __post_init__(self):
        for name in ("alpha", "p_r", "p_re", "p_u"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ConfigError(f"{name} must be a finite non-negative number, got {v}")
        if self.m_total < 0:
            raise ConfigError(f"m_total must be non-negative, got {self.m_total}")

    @property
    def total_power(self) -> float:
        return (1.0 + self.alpha) * self.p_r + self.m_total * self.p_re + 2.0 * self.p_u


def energy_model_for(cfg: ScenarioConfig) -> EnergyModel:
    e = cfg.energy
    return EnergyModel(
        alpha=e.alpha,
        p_r=e.transmit_power_w(cfg.rho_r),
        p_re=e.p_re_w,
        p_u=e.p_u_w,
        m_total=cfg.partition.m_total,
    )


def spectral_efficiency(r1: float, r2: float) -> float:
    if r1 < 0 or r2 < 0:
        raise ValueError(f"rates must be non-negative, got ({r1}, {r2})")
    return r1 + r2


def energy_efficiency(se: float, em: EnergyModel) -> float:
    """SE divided by the total consumed power, in bits/Joule/Hz."""
    p_tot = em.total_power
    if p_tot <= 0.0:
        raise ConfigError("energy model consumes no power; EE is undefined")
    return se / p_tot
