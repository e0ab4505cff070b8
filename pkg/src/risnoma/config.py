"""Scenario files: a flat ``key = value`` format with dotted section names.

Grammar, one statement per line::

    # full-line comment
    key = value            # trailing comment
    list.key = 1, 2, 3     # comma-separated list
    range.key = 0:30:5     # start:stop:step, stop included

Recognised keys (everything is optional; missing values take the defaults
of :class:`risnoma.noma.ScenarioConfig`):

==========================  =================================================
``snr_db``                  transmit SNR in dB (default 20)
``ris.m_total``             number of reflecting elements M (default 64)
``ris.eta``                 fraction of elements given to DR1 (default 0.5)
``power.beta1_sq``          DR1 power fraction (default 0.3)
``power.beta2_sq``          DR2 power fraction (default ``1 - beta1_sq``)
``links.<link>.m``          Nakagami shape; ``<link>`` is one of ``dt_ris``,
                            ``ris_dr1``, ``ris_dr2``, ``direct_dr1``,
                            ``direct_dr2`` (defaults 5 reflected, 2 direct)
``links.<link>.omega``      Nakagami spread (default 1)
``energy.alpha``            amplifier overhead factor (default 0.25)
``energy.noise_power_w``    W per unit of linear SNR (default 1e-3)
``energy.p_re_w``           power per reflecting element (default 1e-4 W)
``energy.p_u_w``            power per receiver (default 1e-2 W)
``sweep.variable``          ``snr_db``, ``m_total``, ``eta`` or ``beta1_sq``
``sweep.grid``              values of the sweep variable (list or range)
``sweep.outputs``           subset of ``mc_noma, mc_oma, lower, upper, se, ee``
``sweep.series_variable``   optional second variable, one curve per value
``sweep.series``            values of the series variable
==========================  =================================================

``m_total``, ``eta``, ``beta1_sq`` and ``beta2_sq`` may also be written
without their section prefix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .channel import LinkSet, NakagamiParams
from .errors import ConfigError
from .noma import (
    EnergyTerms,
    PowerSplit,
    ScenarioConfig,
    db_to_linear,
    default_links,
    partition_elements,
)

__all__ = [
    "SWEEP_VARIABLES",
    "SWEEP_OUTPUTS",
    "SweepSpec",
    "apply_variable",
    "parse_config",
    "load_config",
]

SWEEP_VARIABLES = ("snr_db", "m_total", "eta", "beta1_sq")
SWEEP_OUTPUTS = ("mc_noma", "mc_oma", "lower", "upper", "se", "ee")
_LINK_NAMES = ("dt_ris", "ris_dr1", "ris_dr2", "direct_dr1", "direct_dr2")
# bare names accepted for the sweepable scalars
_ALIASES = {
    "m_total": "ris.m_total",
    "eta": "ris.eta",
    "beta1_sq": "power.beta1_sq",
    "beta2_sq": "power.beta2_sq",
}


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep and which quantities to report at every point."""

    variable: str
    grid: tuple
    outputs: tuple
    series_variable: Optional[str] = None
    series: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(
                f"sweep.variable must be one of {', '.join(SWEEP_VARIABLES)}, got {self.variable!r}"
            )
        grid = tuple(self.grid)
        if not grid:
            raise ConfigError("sweep.grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("sweep.grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        outputs = tuple(self.outputs)
        if not outputs:
            raise ConfigError("sweep.outputs is empty; nothing to compute")
        unknown = [o for o in outputs if o not in SWEEP_OUTPUTS]
        if unknown:
            raise ConfigError(
                f"unknown sweep.outputs {unknown}; choose from {', '.join(SWEEP_OUTPUTS)}"
            )
        if len(set(outputs)) != len(outputs):
            raise ConfigError("sweep.outputs lists an output twice")
        object.__setattr__(self, "outputs", outputs)
        series = tuple(self.series)
        object.__setattr__(self, "series", series)
        if self.series_variable is None:
            if series:
                raise ConfigError("sweep.series given without sweep.series_variable")
        else:
            if self.series_variable not in SWEEP_VARIABLES:
                raise ConfigError(
                    f"sweep.series_variable must be one of {', '.join(SWEEP_VARIABLES)}"
                )
            if self.series_variable == self.variable:
                raise ConfigError("sweep.series_variable must differ from sweep.variable")
            if not series:
                raise ConfigError("sweep.series_variable given without sweep.series values")

    def series_values(self) -> tuple:
        return self.series if self.series_variable else (None,)


def apply_variable(cfg: ScenarioConfig, variable: str, value) -> ScenarioConfig:
    """Return ``cfg`` with one sweep variable set to ``value``."""
    if variable == "snr_db":
        return replace(cfg, rho_r=db_to_linear(float(value)))
    if variable == "m_total":
        if float(value) != int(value):
            raise ConfigError(f"m_total must be an integer, got {value}")
        return cfg.with_elements(int(value))
    if variable == "eta":
        return cfg.with_elements(cfg.partition.m_total, float(value))
    if variable == "beta1_sq":
        return cfg.with_beta1_sq(float(value))
    raise ConfigError(f"unknown sweep variable {variable!r}")


def _parse_number(text, where):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{where}: expected a number, got {text!r}") from None


def _parse_int(text, where):
    v = _parse_number(text, where)
    if v != int(v):
        raise ConfigError(f"{where}: expected an integer, got {text!r}")
    return int(v)


def _parse_grid(text, where, integer=False):
    text = text.strip()
    if ":" in text:
        parts = [p.strip() for p in text.split(":")]
        if len(parts) != 3:
            raise ConfigError(f"{where}: a range is written start:stop:step, got {text!r}")
        start, stop, step = (_parse_number(p, where) for p in parts)
        if step <= 0:
            raise ConfigError(f"{where}: range step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [start + i * step for i in range(max(count, 0))]
    else:
        values = [_parse_number(p, where) for p in text.split(",") if p.strip()]
    if integer:
        if any(v != int(v) for v in values):
            raise ConfigError(f"{where}: values must be integers")
        return tuple(int(v) for v in values)
    return tuple(values)


def _grid_is_integer(variable):
    return variable == "m_total"


def _split_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: missing key")
        if not value:
            raise ConfigError(f"line {lineno}: {key}: missing value")
        yield lineno, key, value


def _known_key(key):
    if key in ("snr_db", "ris.m_total", "ris.eta", "power.beta1_sq", "power.beta2_sq"):
        return True
    if key.startswith("energy."):
        return key[len("energy."):] in ("alpha", "noise_power_w", "p_re_w", "p_u_w")
    if key.startswith("links."):
        parts = key.split(".")
        return len(parts) == 3 and parts[1] in _LINK_NAMES and parts[2] in ("m", "omega")
    if key.startswith("sweep."):
        return key[len("sweep."):] in ("variable", "grid", "outputs", "series_variable", "series")
    return False


def parse_config(text: str) -> tuple[ScenarioConfig, Optional[SweepSpec]]:
    """Parse scenario text; see the module docstring for the grammar."""
    entries = {}
    where = {}
    for lineno, key, value in _split_lines(text):
        key = _ALIASES.get(key, key)
        if not _known_key(key):
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: {key} set twice (first on line {where[key]})")
        entries[key] = value
        where[key] = lineno

    def loc(key):
        return f"line {where[key]}: {key}"

    def num(key, default):
        return _parse_number(entries[key], loc(key)) if key in entries else default

    base = default_links()
    links = {}
    for name in _LINK_NAMES:
        dflt = getattr(base, name)
        m = num(f"links.{name}.m", dflt.m)
        omega = num(f"links.{name}.omega", dflt.omega)
        try:
            links[name] = NakagamiParams(m, omega)
        except ConfigError as exc:
            raise ConfigError(f"links.{name}: {exc}") from None
    link_set = LinkSet(**links)

    m_total = _parse_int(entries["ris.m_total"], loc("ris.m_total")) if "ris.m_total" in entries else 64
    eta = num("ris.eta", 0.5)
    partition = partition_elements(m_total, eta)

    if "power.beta1_sq" in entries and "power.beta2_sq" in entries:
        b1, b2 = num("power.beta1_sq", None), num("power.beta2_sq", None)
    elif "power.beta2_sq" in entries:
        b2 = num("power.beta2_sq", None)
        b1 = 1.0 - b2
    else:
        b1 = num("power.beta1_sq", 0.3)
        b2 = 1.0 - b1
    power = PowerSplit(b1, b2)

    energy_kwargs = {
        k: num(f"energy.{k}", getattr(EnergyTerms(), k))
        for k in ("alpha", "noise_power_w", "p_re_w", "p_u_w")
    }
    energy = EnergyTerms(**energy_kwargs)

    snr_db = num("snr_db", 20.0)
    scenario = ScenarioConfig(
        links=link_set,
        partition=partition,
        power=power,
        rho_r=db_to_linear(snr_db),
        energy=energy,
    )

    sweep_keys = [k for k in entries if k.startswith("sweep.")]
    if not sweep_keys:
        return scenario, None
    for required in ("sweep.variable", "sweep.grid", "sweep.outputs"):
        if required not in entries:
            raise ConfigError(f"{required} is required once any sweep.* key is given")
    variable = entries["sweep.variable"]
    grid = _parse_grid(entries["sweep.grid"], loc("sweep.grid"), _grid_is_integer(variable))
    outputs = tuple(o.strip() for o in entries["sweep.outputs"].split(",") if o.strip())
    series_variable = entries.get("sweep.series_variable")
    series = ()
    if "sweep.series" in entries:
        series = _parse_grid(
            entries["sweep.series"], loc("sweep.series"), _grid_is_integer(series_variable)
        )
    spec = SweepSpec(variable, grid, outputs, series_variable, series)
    return scenario, spec


def load_config(path) -> tuple[ScenarioConfig, Optional[SweepSpec]]:
    """Read and validate a scenario file."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_config(text)
