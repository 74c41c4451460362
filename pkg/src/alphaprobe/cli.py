"""Command-line interface.

Exit codes: 0 success, 2 malformed config or input, 3 reproduction run
disagreed with the published values, 4 a bound was demanded but the data
carried no width information.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from .bounds import (
    DegenerateControlError,
    NoInformationError,
    ProbingRecord,
    bound_summary,
    tightest_bound,
    write_bound_curve_csv,
)
from .fidelity import alpha_fidelity_curve
from .linalg import DensityMatrix, matrix_from_json, save_matrix
from .scenario import (
    SCHEMA_VERSION,
    ConfigError,
    GoldenCheckError,
    _provenance,
    _write_summary,
    load_scenario,
    reproduce_fig4,
    run_scenario,
    sweep_thickness,
)
from .tomography import TomographySettings, reconstruct, rng_stream, simulate_counts

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GOLDEN = 3
EXIT_NO_INFORMATION = 4


def _load_json(path, what: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {what} {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} {path} is not valid JSON: {exc}") from exc


def _load_state(path) -> DensityMatrix:
    try:
        return DensityMatrix(matrix_from_json(_load_json(path, "state")))
    except ValueError as exc:
        raise ConfigError(f"state {path}: {exc}") from exc


def _alpha_grid(args) -> np.ndarray:
    if getattr(args, "alpha", None) is not None:
        if not 0.0 < args.alpha < 1.0:
            raise ConfigError(f"--alpha must lie in (0, 1), got {args.alpha}")
        return np.array([args.alpha])
    if not 0.0 < args.alpha_start < args.alpha_stop < 1.0:
        raise ConfigError(
            f"alpha grid must satisfy 0 < start < stop < 1, got "
            f"[{args.alpha_start}, {args.alpha_stop}]"
        )
    if args.alpha_count < 1:
        raise ConfigError(f"--alpha-count must be positive, got {args.alpha_count}")
    return np.linspace(args.alpha_start, args.alpha_stop, args.alpha_count)


def _add_alpha_args(parser: argparse.ArgumentParser, single: bool = False) -> None:
    if single:
        parser.add_argument(
            "--alpha", type=float, default=None, help="single order parameter"
        )
    parser.add_argument("--alpha-start", type=float, default=0.5)
    parser.add_argument("--alpha-stop", type=float, default=0.9999)
    parser.add_argument("--alpha-count", type=int, default=500)


def cmd_afid(args) -> int:
    rho1 = _load_state(args.rho1)
    rho2 = _load_state(args.rho2)
    grid = _alpha_grid(args)
    values = alpha_fidelity_curve(rho1, rho2, grid)
    rows = [["alpha", "fidelity"]] + [
        [f"{a:.12e}", f"{f:.12e}"] for a, f in zip(grid, values)
    ]
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            csv.writer(fh).writerows(rows)
        print(f"wrote {args.csv}")
    else:
        writer = csv.writer(sys.stdout)
        writer.writerows(rows)
    return EXIT_OK


def _load_record(path) -> ProbingRecord:
    payload = _load_json(path, "record")
    try:
        return ProbingRecord(
            rho1=DensityMatrix(matrix_from_json(payload["rho1"])),
            rho2=DensityMatrix(matrix_from_json(payload["rho2"])),
            phi1_rho1=DensityMatrix(matrix_from_json(payload["phi1_rho1"])),
            phi2_rho2=DensityMatrix(matrix_from_json(payload["phi2_rho2"])),
            delta_mu=float(payload["delta_mu_hz"]),
        )
    except KeyError as exc:
        raise ConfigError(f"record {path} is missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"record {path}: {exc}") from exc


def cmd_bound(args) -> int:
    record = _load_record(args.record)
    grid = _alpha_grid(args)
    if grid.min() < 0.5:
        raise ConfigError(f"bound grid must start at or above 0.5, got {grid.min()}")
    curve = tightest_bound(record, grid)
    os.makedirs(args.out, exist_ok=True)
    curve_path = os.path.join(args.out, "bound_curve.csv")
    write_bound_curve_csv(curve, curve_path)
    results = bound_summary(curve)
    summary = {
        "schema": SCHEMA_VERSION,
        "config": {"record": os.path.abspath(args.record)},
        "resolved": {"delta_mu_hz": record.delta_mu},
        "results": results,
        "provenance": _provenance(None),
        "files": ["bound_curve.csv", "summary.json"],
    }
    _write_summary(summary, os.path.join(args.out, "summary.json"))
    if curve.optimum is None:
        print("no_information: every grid point has fidelity fraction >= 1")
        if args.require_bound:
            raise NoInformationError("bound demanded but the record is uninformative")
    else:
        print(
            f"b_inf = {curve.optimum.value:.12e} Hz at alpha = "
            f"{curve.optimum.alpha:.6f} ({curve.optimum.family})"
        )
    print(f"wrote {curve_path}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = load_scenario(args.config)
    report = run_scenario(config, out_dir=args.out)
    results = report.summary["results"]
    if results.get("no_information"):
        print("no_information: true")
    else:
        print(f"b_inf = {results['b_inf_hz']:.12e} Hz")
    for path in report.files:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_tomography(args) -> int:
    state = _load_state(args.state)
    try:
        settings = TomographySettings(
            integration_time=args.time, count_rate=args.rate, seed=args.seed
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    stream = rng_stream(settings.seed, (0, 0))
    counts = simulate_counts(state, settings, stream)
    estimate = reconstruct(counts, settings.bases)
    os.makedirs(args.out, exist_ok=True)
    counts_path = os.path.join(args.out, "counts.json")
    with open(counts_path, "w", encoding="utf-8") as fh:
        json.dump(counts.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    state_path = os.path.join(args.out, "reconstructed.json")
    save_matrix(state_path, estimate.matrix)
    print(f"wrote {counts_path}")
    print(f"wrote {state_path}")
    return EXIT_OK


def cmd_reproduce_fig4(args) -> int:
    report = reproduce_fig4(out_dir=args.out)
    results = report.summary["results"]
    print(
        f"b2 at alpha 0.5: {results['b2_half_over_sigma']:.4f} sigma "
        f"(published {results['published_b2_half_over_sigma']})"
    )
    print(
        f"b2 at alpha 0.9999: {results['b2_top_over_sigma']:.4f} sigma "
        f"(published {results['published_b2_top_over_sigma']})"
    )
    print(f"b_inf = {results['b_inf_hz']:.12e} Hz")
    for path in report.files:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = load_scenario(args.config)
    report = sweep_thickness(config, out_dir=args.out)
    for path in report.files:
        print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alphaprobe",
        description="Width bounds on an unknown Gaussian line from qubit probes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("afid", help="alpha-fidelity curve of two states")
    p.add_argument("--rho1", required=True, help="first state (matrix JSON)")
    p.add_argument("--rho2", required=True, help="second state (matrix JSON)")
    _add_alpha_args(p, single=True)
    p.add_argument("--csv", default=None, help="write the curve here instead of stdout")
    p.set_defaults(func=cmd_afid)

    p = sub.add_parser("bound", help="width bound curve from a probing record")
    p.add_argument("--record", required=True, help="probing record JSON")
    _add_alpha_args(p)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument(
        "--require-bound",
        action="store_true",
        help="fail (exit 4) when the record is uninformative",
    )
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", help="run a scenario config end to end")
    p.add_argument("--config", required=True, help="scenario JSON")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tomography", help="simulate counts and reconstruct a state")
    p.add_argument("--state", required=True, help="true state (matrix JSON)")
    p.add_argument("--time", type=float, required=True, help="integration time (s)")
    p.add_argument("--rate", type=float, required=True, help="pair rate (1/s)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_tomography)

    p = sub.add_parser(
        "reproduce-fig4",
        help="rebuild the demonstration bound curves and check published values",
    )
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_reproduce_fig4)

    p = sub.add_parser("sweep", help="bound optimum per plate thickness")
    p.add_argument("--config", required=True, help="scenario JSON with a sweep section")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DegenerateControlError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GoldenCheckError as exc:
        print(f"golden check failed: {exc}", file=sys.stderr)
        return EXIT_GOLDEN
    except NoInformationError as exc:
        print(f"no information: {exc}", file=sys.stderr)
        return EXIT_NO_INFORMATION


if __name__ == "__main__":
    raise SystemExit(main())
