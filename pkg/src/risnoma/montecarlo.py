"""Seeded Monte-Carlo estimates of ergodic rates.

Trials are grouped into fixed-size blocks.  Block ``j`` of a run draws from
its own PCG64 stream seeded by ``SeedSequence(seed, spawn_key=(scheme, j))``,
and writes its per-trial rates into rows ``[j*B, (j+1)*B)`` of one buffer.
Workers claim disjoint contiguous runs of blocks, and all reductions are taken
over the full buffer afterwards, so the output is bit-identical for a given
seed whatever the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import sample_gain_components, sample_nakagami
from .errors import ConfigError
from .noma import ScenarioConfig, sinr_dr1, sinr_dr2

__all__ = [
    "BLOCK_SIZE",
    "McSettings",
    "ErgodicEstimate",
    "simulate_rates",
    "summarize",
    "estimate_noma",
    "estimate_oma",
]

BLOCK_SIZE = 4096
_SCHEME_KEYS = {"noma": 0, "oma": 1}


@dataclass(frozen=True)
class McSettings:
    n_trials: int = 100_000
    seed: int = 0
    n_workers: int = 1

    def __post_init__(self):
        if int(self.n_trials) != self.n_trials or self.n_trials < 1000:
            raise ConfigError(f"n_trials must be an integer >= 1000, got {self.n_trials}")
        if int(self.n_workers) != self.n_workers or self.n_workers < 1:
            raise ConfigError(f"n_workers must be a positive integer, got {self.n_workers}")
        if not (0 <= int(self.seed) < 2**64):
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


@dataclass(frozen=True)
class ErgodicEstimate:
    mean: float
    stderr: float
    n_trials: int


def summarize(samples: np.ndarray) -> ErgodicEstimate:
    """Sample mean and standard error of one column of per-trial rates."""
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    return ErgodicEstimate(
        mean=float(np.mean(samples)),
        stderr=float(np.std(samples, ddof=1) / math.sqrt(n)),
        n_trials=n,
    )


def _block_rng(seed, scheme, block):
    ss = np.random.SeedSequence(int(seed), spawn_key=(_SCHEME_KEYS[scheme], block))
    return np.random.Generator(np.random.PCG64(ss))


def _noma_block(cfg, rng, size):
    part = cfg.partition
    h1, s1 = sample_gain_components(cfg.links, part.m1, 1, rng, size)
    h2, s2 = sample_gain_components(cfg.links, part.m2, 2, rng, size)
    g1 = (h1 + s1) ** 2
    g2 = (h2 + s2) ** 2
    out = np.empty((size, 2))
    out[:, 0] = np.log2(1.0 + sinr_dr1(g1, cfg.power, cfg.rho_r))
    out[:, 1] = np.log2(1.0 + sinr_dr2(g2, cfg.power, cfg.rho_r))
    return out


def _oma_block(cfg, rng, size):
    m = cfg.partition.m_total
    # one physical surface: both slots see the same transmitter-to-surface links
    dt_amps = sample_nakagami(cfg.links.dt_ris, rng, (size, m))
    h1, s1 = sample_gain_components(cfg.links, m, 1, rng, size, dt_ris_amps=dt_amps)
    h2, s2 = sample_gain_components(cfg.links, m, 2, rng, size, dt_ris_amps=dt_amps)
    out = np.empty((size, 2))
    out[:, 0] = 0.5 * np.log2(1.0 + (h1 + s1) ** 2 * cfg.rho_r)
    out[:, 1] = 0.5 * np.log2(1.0 + (h2 + s2) ** 2 * cfg.rho_r)
    return out


_BLOCK_FUNCS = {"noma": _noma_block, "oma": _oma_block}


def simulate_rates(cfg: ScenarioConfig, mc: McSettings, scheme: str = "noma") -> np.ndarray:
    """Per-trial instantaneous rates, shape ``(n_trials, 2)`` (DR1, DR2)."""
    if scheme not in _BLOCK_FUNCS:
        raise ConfigError(f"unknown scheme {scheme!r}; expected 'noma' or 'oma'")
    block_fn = _BLOCK_FUNCS[scheme]
    n = int(mc.n_trials)
    n_blocks = -(-n // BLOCK_SIZE)
    out = np.empty((n, 2))

    def run(block_ids):
        for j in block_ids:
            lo = j * BLOCK_SIZE
            hi = min(n, lo + BLOCK_SIZE)
            out[lo:hi] = block_fn(cfg, _block_rng(mc.seed, scheme, j), hi - lo)

    chunks = [c for c in np.array_split(np.arange(n_blocks), mc.n_workers) if c.size]
    if len(chunks) == 1:
        run(chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            for fut in [pool.submit(run, c) for c in chunks]:
                fut.result()
    return out


def estimate_noma(cfg: ScenarioConfig, mc: McSettings) -> tuple[ErgodicEstimate, ErgodicEstimate]:
    """Ergodic NOMA rates of (DR1, DR2) with ideal SIC."""
    rates = simulate_rates(cfg, mc, "noma")
    return summarize(rates[:, 0]), summarize(rates[:, 1])


def estimate_oma(cfg: ScenarioConfig, mc: McSettings) -> tuple[ErgodicEstimate, ErgodicEstimate]:
    """Ergodic rates of the equal-slot TDMA baseline."""
    rates = simulate_rates(cfg, mc, "oma")
    return summarize(rates[:, 0]), summarize(rates[:, 1])
