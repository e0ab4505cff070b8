"""Command-line entry point.

::

    risnoma bounds    [--config F]
    risnoma mc        [--config F] [--seed S] [--trials N] [--workers W]
    risnoma sweep     --config F [--seed S] [--trials N] [--workers W] [--out DIR] [--csv] [--plot]
    risnoma reproduce {fig2,fig3,fig4} [same flags as sweep]

``bounds`` and ``mc`` print a one-row CSV for the configured scenario.  Sweeps
write ``<name>.csv`` and/or ``<name>.svg`` into ``--out`` (both when neither
``--csv`` nor ``--plot`` is given).

Exit codes: 0 success, 2 configuration error, 3 numeric error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .bounds import rate_bounds
from .config import load_config
from .errors import ConfigError, NumericError
from .montecarlo import McSettings, simulate_rates, summarize
from .noma import ScenarioConfig
from .sweep import emit_csv, emit_plot, preset, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _u64(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return v


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="scenario file (key = value)")

    mc_flags = argparse.ArgumentParser(add_help=False)
    mc_flags.add_argument("--seed", type=_u64, default=0)
    mc_flags.add_argument("--trials", type=int, default=100_000)
    mc_flags.add_argument("--workers", type=int, default=1)

    out_flags = argparse.ArgumentParser(add_help=False)
    out_flags.add_argument("--out", type=Path, default=Path("."), help="output directory")
    out_flags.add_argument("--csv", action="store_true", help="write the CSV table")
    out_flags.add_argument("--plot", action="store_true", help="write the SVG plot")

    p = argparse.ArgumentParser(prog="risnoma", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("bounds", parents=[common], help="closed-form rate bounds")
    sub.add_parser("mc", parents=[common, mc_flags], help="Monte-Carlo ergodic rates")
    sub.add_parser("sweep", parents=[common, mc_flags, out_flags], help="run a configured sweep")
    rp = sub.add_parser(
        "reproduce", parents=[common, mc_flags, out_flags], help="run a figure preset"
    )
    rp.add_argument("figure", choices=["fig2", "fig3", "fig4"])
    return p


def _scenario(args):
    if args.config is None:
        return ScenarioConfig(), None
    return load_config(args.config)


def _print_row(header, values):
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    w.writerow([repr(float(v)) for v in values])


def _cmd_bounds(args):
    cfg, _ = _scenario(args)
    rb = rate_bounds(cfg)
    for note in rb.diagnostics:
        print(f"note: {note}", file=sys.stderr)
    _print_row(
        ["snr_db", "lower_r1_bps_hz", "lower_r2_bps_hz", "lower_se_bps_hz",
         "upper_r1_bps_hz", "upper_r2_bps_hz", "upper_se_bps_hz"],
        [cfg.snr_db, rb.lower.r1, rb.lower.r2, rb.lower.total,
         rb.upper.r1, rb.upper.r2, rb.upper.total],
    )


def _mc_settings(args):
    return McSettings(n_trials=args.trials, seed=args.seed, n_workers=args.workers)


def _cmd_mc(args):
    cfg, _ = _scenario(args)
    mc = _mc_settings(args)
    header = ["snr_db"]
    values = [cfg.snr_db]
    for scheme in ("noma", "oma"):
        rates = simulate_rates(cfg, mc, scheme)
        for name, col in (("r1", rates[:, 0]), ("r2", rates[:, 1]), ("se", rates.sum(axis=1))):
            est = summarize(col)
            header += [f"mc_{scheme}_{name}_bps_hz", f"mc_{scheme}_{name}_bps_hz_stderr"]
            values += [est.mean, est.stderr]
    _print_row(header, values)


def _write_outputs(result, args, stem):
    args.out.mkdir(parents=True, exist_ok=True)
    want_csv = args.csv or not args.plot
    want_plot = args.plot or not args.csv
    if want_csv:
        print(emit_csv(result, args.out / f"{stem}.csv"))
    if want_plot:
        print(emit_plot(result, args.out / f"{stem}.svg"))


def _cmd_sweep(args):
    if args.config is None:
        raise ConfigError("sweep needs --config with sweep.* keys")
    cfg, spec = load_config(args.config)
    if spec is None:
        raise ConfigError(f"{args.config} defines no sweep (sweep.variable, sweep.grid, sweep.outputs)")
    result = run_sweep(cfg, spec, _mc_settings(args))
    _write_outputs(result, args, args.config.stem)


def _cmd_reproduce(args):
    cfg, _ = _scenario(args)
    result = run_sweep(cfg, preset(args.figure), _mc_settings(args))
    _write_outputs(result, args, args.figure)


_COMMANDS = {
    "bounds": _cmd_bounds,
    "mc": _cmd_mc,
    "sweep": _cmd_sweep,
    "reproduce": _cmd_reproduce,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
