"""Parameter sweeps, named presets, and CSV/SVG emitters.

A sweep evaluates the requested outputs at every grid point of one scenario
variable, optionally once per value of a second (series) variable.  Rows are
emitted series-major, grid-minor.

Output columns (all rates in bits/s/Hz, EE in bits/Joule/Hz):

``mc_noma`` / ``mc_oma``
    ``<out>_r1_bps_hz``, ``<out>_r2_bps_hz`` and ``<out>_se_bps_hz``, each
    followed by a ``_stderr`` column.
``lower`` / ``upper``
    ``<out>_r1_bps_hz``, ``<out>_r2_bps_hz``, ``<out>_se_bps_hz``.  Closed
    forms carry no sampling error, so there are no ``_stderr`` columns.
``se``
    NOMA spectral efficiency from Monte Carlo, ``se_bps_hz`` plus stderr.
``ee``
    NOMA energy efficiency ``ee_bits_per_joule_hz`` plus stderr; when
    ``mc_oma`` is also requested, ``ee_oma_bits_per_joule_hz`` plus stderr.

Monte-Carlo estimates at point ``(series i, grid j)`` use the seed
``SeedSequence([seed, i, j])``, so every point owns an independent stream and
the results do not depend on evaluation order.
"""

from __future__ import annotations

import csv
import io
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import bounds as _bounds
from .config import SweepSpec, apply_variable
from .errors import ConfigError, RisNomaError
from .metrics import energy_efficiency, energy_model_for
from .montecarlo import McSettings, simulate_rates, summarize
from .noma import ScenarioConfig

__all__ = [
    "PRESET_VERSION",
    "PRESETS",
    "SweepResult",
    "preset",
    "output_columns",
    "run_sweep",
    "csv_text",
    "emit_csv",
    "plot_curves",
    "emit_plot",
    "read_plot_data",
]

PRESET_VERSION = 1

# bump PRESET_VERSION whenever a grid changes
PRESETS = {
    "fig2": SweepSpec(
        variable="snr_db",
        grid=(0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0),
        outputs=("mc_noma", "lower", "upper"),
        series_variable="m_total",
        series=(16, 36, 64, 100),
    ),
    "fig3": SweepSpec(
        variable="m_total",
        grid=tuple(range(10, 101, 10)),
        outputs=("mc_noma", "mc_oma"),
        series_variable="snr_db",
        series=(10.0, 20.0),
    ),
    "fig4": SweepSpec(
        variable="snr_db",
        grid=(10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0),
        outputs=("mc_noma", "mc_oma", "ee"),
        series_variable="m_total",
        series=(50, 100, 150, 200),
    ),
}

_RATE_SUFFIXES = ("r1_bps_hz", "r2_bps_hz", "se_bps_hz")


def preset(name: str) -> SweepSpec:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None


def output_columns(spec: SweepSpec) -> list[str]:
    """Value columns of a sweep, in emission order (stderr columns included)."""
    cols = []
    for out in spec.outputs:
        if out in ("mc_noma", "mc_oma"):
            for s in _RATE_SUFFIXES:
                cols += [f"{out}_{s}", f"{out}_{s}_stderr"]
        elif out in ("lower", "upper"):
            cols += [f"{out}_{s}" for s in _RATE_SUFFIXES]
        elif out == "se":
            cols += ["se_bps_hz", "se_bps_hz_stderr"]
        elif out == "ee":
            cols += ["ee_bits_per_joule_hz", "ee_bits_per_joule_hz_stderr"]
            if "mc_oma" in spec.outputs:
                cols += ["ee_oma_bits_per_joule_hz", "ee_oma_bits_per_joule_hz_stderr"]
    return cols


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    columns: tuple
    rows: tuple

    def column(self, name: str) -> np.ndarray:
        return np.array([r[self.columns.index(name)] for r in self.rows], dtype=float)

    def select(self, series_value) -> "SweepResult":
        """Rows belonging to one series value."""
        if self.spec.series_variable is None:
            return self
        k = self.columns.index(self.spec.series_variable)
        rows = tuple(r for r in self.rows if r[k] == series_value)
        return replace(self, rows=rows)


def _point_seed(seed, i, j):
    state = np.random.SeedSequence([int(seed), i, j]).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def _mc_columns(prefix, rates):
    e1 = summarize(rates[:, 0])
    e2 = summarize(rates[:, 1])
    se = summarize(rates[:, 0] + rates[:, 1])
    return {
        f"{prefix}_r1_bps_hz": e1.mean,
        f"{prefix}_r1_bps_hz_stderr": e1.stderr,
        f"{prefix}_r2_bps_hz": e2.mean,
        f"{prefix}_r2_bps_hz_stderr": e2.stderr,
        f"{prefix}_se_bps_hz": se.mean,
        f"{prefix}_se_bps_hz_stderr": se.stderr,
    }


def _evaluate_point(cfg: ScenarioConfig, spec: SweepSpec, mc: McSettings) -> dict:
    need_noma = any(o in spec.outputs for o in ("mc_noma", "se", "ee"))
    need_oma = "mc_oma" in spec.outputs
    vals = {}
    noma = _mc_columns("mc_noma", simulate_rates(cfg, mc, "noma")) if need_noma else None
    oma = _mc_columns("mc_oma", simulate_rates(cfg, mc, "oma")) if need_oma else None
    if noma:
        vals.update(noma)
        vals["se_bps_hz"] = noma["mc_noma_se_bps_hz"]
        vals["se_bps_hz_stderr"] = noma["mc_noma_se_bps_hz_stderr"]
    if oma:
        vals.update(oma)
    if "lower" in spec.outputs or "upper" in spec.outputs:
        rb = _bounds.rate_bounds(cfg)
        for name, pair in (("lower", rb.lower), ("upper", rb.upper)):
            vals[f"{name}_r1_bps_hz"] = pair.r1
            vals[f"{name}_r2_bps_hz"] = pair.r2
            vals[f"{name}_se_bps_hz"] = pair.total
    if "ee" in spec.outputs:
        em = energy_model_for(cfg)
        vals["ee_bits_per_joule_hz"] = energy_efficiency(noma["mc_noma_se_bps_hz"], em)
        vals["ee_bits_per_joule_hz_stderr"] = energy_efficiency(
            noma["mc_noma_se_bps_hz_stderr"], em
        )
        if oma:
            vals["ee_oma_bits_per_joule_hz"] = energy_efficiency(oma["mc_oma_se_bps_hz"], em)
            vals["ee_oma_bits_per_joule_hz_stderr"] = energy_efficiency(
                oma["mc_oma_se_bps_hz_stderr"], em
            )
    return vals


def _label(spec, series_value, grid_value):
    label = f"{spec.variable}={grid_value}"
    if spec.series_variable is not None:
        label = f"{spec.series_variable}={series_value}, {label}"
    return label


def run_sweep(cfg: ScenarioConfig, spec: SweepSpec, mc: McSettings) -> SweepResult:
    """Evaluate ``spec.outputs`` at every grid point.

    Every point's scenario is built and validated before any computation
    starts.  Module errors are re-raised with the grid point in the message.
    """
    points = []
    for i, sv in enumerate(spec.series_values()):
        for j, gv in enumerate(spec.grid):
            try:
                point_cfg = cfg
                if spec.series_variable is not None:
                    point_cfg = apply_variable(point_cfg, spec.series_variable, sv)
                point_cfg = apply_variable(point_cfg, spec.variable, gv)
            except RisNomaError as exc:
                raise type(exc)(f"at {_label(spec, sv, gv)}: {exc}") from exc
            points.append((i, j, sv, gv, point_cfg))

    value_cols = output_columns(spec)
    key_cols = [spec.variable]
    if spec.series_variable is not None:
        key_cols.append(spec.series_variable)
    rows = []
    for i, j, sv, gv, point_cfg in points:
        point_mc = replace(mc, seed=_point_seed(mc.seed, i, j))
        try:
            vals = _evaluate_point(point_cfg, spec, point_mc)
        except RisNomaError as exc:
            raise type(exc)(f"at {_label(spec, sv, gv)}: {exc}") from exc
        keys = [gv] if spec.series_variable is None else [gv, sv]
        rows.append(tuple(keys) + tuple(vals[c] for c in value_cols))
    return SweepResult(spec=spec, columns=tuple(key_cols + value_cols), rows=tuple(rows))


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def csv_text(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(result.columns)
    for row in result.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def emit_csv(result: SweepResult, path) -> Path:
    path = Path(path)
    path.write_text(csv_text(result), encoding="utf-8", newline="")
    return path


_SE_UNIT = "bits/s/Hz"
_EE_UNIT = "bits/Joule/Hz"
_AXIS_LABELS = {
    "snr_db": "transmit SNR (dB)",
    "m_total": "reflecting elements M",
    "eta": "element fraction for DR1",
    "beta1_sq": "DR1 power fraction",
}


def _plot_series(spec):
    """``(value column, stderr column or None, panel)`` for every plotted curve."""
    out = []
    for o in spec.outputs:
        if o in ("mc_noma", "mc_oma"):
            out.append((f"{o}_se_bps_hz", f"{o}_se_bps_hz_stderr", "se"))
        elif o in ("lower", "upper"):
            out.append((f"{o}_se_bps_hz", None, "se"))
        elif o == "se":
            out.append(("se_bps_hz", "se_bps_hz_stderr", "se"))
        elif o == "ee":
            out.append(("ee_bits_per_joule_hz", "ee_bits_per_joule_hz_stderr", "ee"))
            if "mc_oma" in spec.outputs:
                out.append(("ee_oma_bits_per_joule_hz", "ee_oma_bits_per_joule_hz_stderr", "ee"))
    return out


def plot_curves(result: SweepResult) -> list[tuple]:
    """Curves drawn by :func:`emit_plot` as ``(label, panel, x, y, yerr)``.

    ``yerr`` is the 95 % half-width for Monte-Carlo curves and ``None`` for
    closed-form ones.
    """
    spec = result.spec
    curves = []
    for sv in spec.series_values():
        sub = result.select(sv)
        x = sub.column(spec.variable)
        for col, err_col, panel in _plot_series(spec):
            label = col
            if spec.series_variable is not None:
                label = f"{col}, {spec.series_variable}={_fmt(sv)}"
            yerr = None if err_col is None else 1.96 * sub.column(err_col)
            curves.append((label, panel, x, sub.column(col), yerr))
    return curves


def emit_plot(result: SweepResult, path) -> Path:
    """Render the sweep as SVG with the CSV text embedded as metadata.

    Each curve is the SE (or EE) column of one output at one series value.
    Monte-Carlo curves carry 95 % error bars.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    spec = result.spec
    if len(spec.grid) < 2:
        raise ConfigError("a plot needs at least two grid points")
    curves = plot_curves(result)
    panels = [p for p in ("se", "ee") if any(c[1] == p for c in curves)]
    path = Path(path)
    with matplotlib.rc_context({"svg.hashsalt": "risnoma", "svg.fonttype": "none"}):
        fig, axes = plt.subplots(
            len(panels), 1, figsize=(6.4, 4.2 * len(panels)), squeeze=False
        )
        axes = {p: axes[k, 0] for k, p in enumerate(panels)}
        for label, panel, x, y, yerr in curves:
            ax = axes[panel]
            if yerr is not None:
                ax.errorbar(x, y, yerr=yerr, marker="o", ms=3, capsize=2, label=label)
            else:
                ax.plot(x, y, ls="--", marker="s", ms=3, label=label)
        for p, ax in axes.items():
            ax.set_xlabel(_AXIS_LABELS[spec.variable])
            ax.set_ylabel(f"SE ({_SE_UNIT})" if p == "se" else f"EE ({_EE_UNIT})")
            ax.grid(True, alpha=0.3)
            ax.legend(fontsize="x-small")
        fig.tight_layout()
        fig.savefig(
            path,
            format="svg",
            metadata={"Date": None, "Description": csv_text(result), "Title": "risnoma sweep"},
        )
        plt.close(fig)
    return path


def read_plot_data(path) -> str:
    """The CSV text embedded in an SVG written by :func:`emit_plot`."""
    root = ET.parse(path).getroot()
    for el in root.iter():
        if el.tag.endswith("}description") and el.text:
            return el.text
    raise ValueError(f"{path} carries no embedded sweep data")
