"""Command-line front end.

Subcommands mirror the library workflow: run a reference, run a tracking
experiment against it, match field strengths between atoms, compute a
spectrum, and compare two recorded runs.  Exit codes: 0 success, 2
invalid input or configuration, 3 numerical failure (non-convergence or
failed detection), 4 a requested residual gate was exceeded.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, pulses, spectral, storage
from .config import build_system, parse_config
from .exceptions import (
    AmptrackError,
    CalibrationError,
    ConfigError,
    ConvergenceError,
    DetectionError,
    GridMismatchError,
    InfeasibleTargetError,
    SectorMismatchError,
    StepSizeError,
)
from .feedback import run_open_loop, run_tracking

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_GATE = 4

_INVALID = (ConfigError, GridMismatchError, SectorMismatchError,
            InfeasibleTargetError, ValueError)
_NUMERICAL = (ConvergenceError, StepSizeError, DetectionError, CalibrationError)


def _out_dir(arg: str) -> Path:
    path = Path(arg)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _metadata(cfg, command: str, seed, summary: dict, columns) -> dict:
    return {
        "command": command,
        "version": __version__,
        "config": cfg.as_dict(),
        "seed": seed,
        "columns": list(columns),
        "summary": summary,
    }


def _reference_summary(system, record, platform: str) -> dict:
    summary = {
        "n_steps": len(record) - 1,
        "dt": record.dt,
        "ground_energy": system.ground_energy,
        "y_rms": float(np.sqrt(np.mean(record.channels["y"] ** 2))),
    }
    if platform == "atom":
        summary["softening_alpha"] = system.atom.alpha
    return summary


def cmd_run_reference(args) -> int:
    cfg = parse_config(args.config)
    seed = args.seed if args.seed is not None else cfg.seed
    out = _out_dir(args.out)
    system = build_system(cfg, "reference")
    record = run_open_loop(system)
    stride = cfg.feedback.output_stride
    storage.write_reference_csv(out / "reference.csv", record, cfg.platform, stride)
    meta = _metadata(
        cfg, "run-reference", seed,
        _reference_summary(system, record, cfg.platform),
        storage.REFERENCE_COLUMNS[cfg.platform],
    )
    storage.write_metadata(out / "metadata.json", meta)
    print(f"reference run: {len(record) - 1} steps, wrote {out / 'reference.csv'}")
    return EXIT_OK


def cmd_run_tracking(args) -> int:
    cfg = parse_config(args.config)
    seed = args.seed if args.seed is not None else cfg.seed
    gate = args.gate if args.gate is not None else cfg.gate
    out = _out_dir(args.out)
    if args.reference is not None:
        table = storage.read_table(args.reference)
        reference = table.series("y")
    else:
        ref_system = build_system(cfg, "reference")
        ref_record = run_open_loop(ref_system)
        storage.write_reference_csv(
            out / "reference.csv", ref_record, cfg.platform,
            cfg.feedback.output_stride,
        )
        reference = ref_record.series("y")
    system = build_system(cfg, "driven")
    result = run_tracking(system, reference, cfg.feedback)
    storage.write_tracking_csv(
        out / "tracking.csv", result, cfg.platform, cfg.feedback.output_stride
    )
    residual_kind = "absolute" if result.absolute_rms else "relative"
    summary = {
        "rms_residual": result.rms_relative,
        "residual_kind": residual_kind,
        "guard_trip_count": int(result.guard_trips.size),
        "k_p": result.k_p,
        "gate": gate,
        "ground_energy": system.ground_energy,
    }
    meta = _metadata(cfg, "run-tracking", seed, summary,
                     storage.TRACKING_COLUMNS[cfg.platform])
    storage.write_metadata(out / "metadata.json", meta)
    print(f"{residual_kind} rms residual: {result.rms_relative!r}")
    if result.guard_trips.size:
        print(f"guard held the control on {result.guard_trips.size} steps")
    if gate is not None and result.rms_relative > gate:
        print(f"gate failed: residual {result.rms_relative!r} exceeds {gate!r}")
        return EXIT_GATE
    return EXIT_OK


def cmd_match_intensity(args) -> int:
    if args.mode == "hhg":
        if args.cutoff is not None:
            cutoff = args.cutoff
        else:
            cutoff = pulses.hhg_cutoff(args.field, args.omega, args.ip)
        matched = pulses.hhg_matched_field(args.omega, cutoff, args.ip_new)
        print(f"target cutoff: {cutoff!r}")
    else:
        if args.field is None:
            raise ConfigError("ati mode needs --field (no cutoff form exists)")
        matched = pulses.ati_matched_field(
            args.omega, args.field, args.ip, args.ip_new
        )
        budget = pulses.ponderomotive_energy(args.field, args.omega) + args.ip
        print(f"conserved Up + Ip: {budget!r}")
    print(f"matched field: {matched!r}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    table = storage.read_table(args.input)
    series = table.series(args.column)
    spectrum = spectral.power_spectrum(series, window=args.window)
    out = _out_dir(args.out)
    storage.write_spectrum_csv(out / "spectrum.csv", spectrum, args.omega0)
    order = spectral.detect_cutoff_order(spectrum, args.omega0,
                                         drop_db=args.drop_db)
    meta = {
        "command": "spectrum",
        "version": __version__,
        "input": str(args.input),
        "column": args.column,
        "window": args.window,
        "omega0": args.omega0,
        "drop_db": args.drop_db,
        "cutoff_order": order,
        "cutoff_frequency": order * args.omega0,
        "columns": list(storage.SPECTRUM_COLUMNS),
    }
    storage.write_metadata(out / "metadata.json", meta)
    print(f"cutoff order: {order}")
    return EXIT_OK


def cmd_compare(args) -> int:
    table_a = storage.read_table(args.a)
    table_b = storage.read_table(args.b)
    series_a = table_a.series(args.column)
    series_b = table_b.series(args.column)
    if not series_a.same_grid(series_b):
        raise GridMismatchError("the two runs are not on the same time grid")
    diff = series_a.values - series_b.values
    scale = float(np.sqrt(np.mean(series_b.values**2)))
    rms = float(np.sqrt(np.mean(diff**2)))
    rel = rms / scale if scale > 0 else rms
    payload = {
        "column": args.column,
        "rms_difference": rms,
        "relative_rms": rel,
        "max_abs_difference": float(np.max(np.abs(diff))),
        "reference_rms": scale,
    }
    if args.omega0 is not None:
        comparison = spectral.compare_spectra(
            spectral.power_spectrum(series_a, window=args.window),
            spectral.power_spectrum(series_b, window=args.window),
            args.omega0, drop_db=args.drop_db,
        )
        payload["spectra"] = comparison.as_dict()
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"relative rms difference: {rel!r}")
        print(f"max abs difference: {payload['max_abs_difference']!r}")
        if "spectra" in payload:
            spectra = payload["spectra"]
            print(f"cutoffs: {spectra['cutoff_a']!r} vs {spectra['cutoff_b']!r} "
                  f"(delta {spectra['delta_orders']} orders)")
    if args.gate is not None and rel > args.gate:
        print(f"gate failed: residual {rel!r} exceeds {args.gate!r}")
        return EXIT_GATE
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amptrack",
        description="Feedback tracking experiments on grid and lattice systems.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    ref = sub.add_parser("run-reference", help="record an open-loop reference run")
    ref.add_argument("--config", required=True)
    ref.add_argument("--out", required=True)
    ref.add_argument("--seed", type=int, default=None)
    ref.set_defaults(func=cmd_run_reference)

    trk = sub.add_parser("run-tracking", help="track a reference with feedback")
    trk.add_argument("--config", required=True)
    trk.add_argument("--out", required=True)
    trk.add_argument("--reference", default=None,
                     help="reference.csv to track; omitted: run it in-process")
    trk.add_argument("--gate", type=float, default=None,
                     help="fail (exit 4) if the rms residual exceeds this")
    trk.add_argument("--seed", type=int, default=None)
    trk.set_defaults(func=cmd_run_tracking)

    mat = sub.add_parser("match-intensity",
                         help="field strength reproducing a spectral observable")
    mat.add_argument("--mode", required=True, choices=("hhg", "ati"))
    mat.add_argument("--omega", required=True, type=float)
    mat.add_argument("--ip", required=True, type=float)
    mat.add_argument("--ip-new", required=True, type=float, dest="ip_new")
    group = mat.add_mutually_exclusive_group(required=True)
    group.add_argument("--field", type=float, default=None)
    group.add_argument("--cutoff", type=float, default=None,
                       help="hhg mode: target cutoff instead of a field")
    mat.set_defaults(func=cmd_match_intensity)

    spe = sub.add_parser("spectrum", help="power spectrum and cutoff of a run")
    spe.add_argument("--in", required=True, dest="input")
    spe.add_argument("--out", required=True)
    spe.add_argument("--omega0", required=True, type=float)
    spe.add_argument("--column", default="y")
    spe.add_argument("--window", default="hann", choices=("hann", "none"))
    spe.add_argument("--drop-db", type=float, default=20.0, dest="drop_db")
    spe.set_defaults(func=cmd_spectrum)

    cmp_ = sub.add_parser("compare", help="residual and spectral comparison")
    cmp_.add_argument("--a", required=True)
    cmp_.add_argument("--b", required=True)
    cmp_.add_argument("--column", default="y")
    cmp_.add_argument("--omega0", type=float, default=None,
                      help="carrier frequency; enables the spectral comparison")
    cmp_.add_argument("--window", default="hann", choices=("hann", "none"))
    cmp_.add_argument("--drop-db", type=float, default=20.0, dest="drop_db")
    cmp_.add_argument("--gate", type=float, default=None)
    cmp_.add_argument("--json", action="store_true")
    cmp_.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _INVALID as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except _NUMERICAL as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except AmptrackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
