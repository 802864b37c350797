"""Command-line surface.

Subcommands: validate, report, compare, embodied, simulate. Report documents
go to stdout; diagnostics go to stderr. Exit codes: 0 success, 1 validation
violations, 2 trace parse errors, 3 platform/profile/grid specification
errors, 4 computation errors. The FUEL_CI environment variable overrides the
built-in default carbon intensity; --ci overrides both.
"""

from __future__ import annotations

import argparse
import dataclasses
import glob
import json
import os
import sys

from . import carbon, compare, funit, simulate, trace
from .errors import (EmptyTraceError, FuelError, GridError, MissingPowerError, NoLatencyError,
                     OutOfWindowError, PlatformSpecError, TraceParseError,
                     TraceValidationError, UndefinedSavingsError, UnknownDeviceError)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_PARSE = 2
EXIT_SPEC = 3
EXIT_COMPUTE = 4

_PARSE_ERRORS = (TraceParseError,)
_SPEC_ERRORS = (PlatformSpecError, GridError)
_COMPUTE_ERRORS = (MissingPowerError, EmptyTraceError, OutOfWindowError,
                   UnknownDeviceError, NoLatencyError, UndefinedSavingsError, ValueError)


def _default_ci() -> float:
    raw = os.environ.get("FUEL_CI")
    if raw is None:
        return carbon.DEFAULT_CI_G_PER_KWH
    try:
        return float(raw)
    except ValueError:
        raise PlatformSpecError(f"FUEL_CI is not a number: {raw!r}") from None


def _load_trace(path: str, validate: bool = True) -> trace.RunTrace:
    try:
        return trace.parse_trace(path, validate=validate)
    except OSError as exc:
        raise TraceParseError(f"cannot read trace {path}: {exc.strerror or exc}") from exc


def _load_platform(path: str, lifetime: float | None) -> carbon.PlatformSpec:
    try:
        platform = carbon.load_platform(path)
    except OSError as exc:
        raise PlatformSpecError(f"cannot read platform {path}: {exc.strerror or exc}") from exc
    if lifetime is not None:
        platform = dataclasses.replace(platform, lifetime_s=lifetime)
    return platform


def cmd_validate(args: argparse.Namespace) -> int:
    parsed = _load_trace(args.trace, validate=False)
    violations = trace.validate_trace(parsed)
    for v in violations:
        line = f"{v.rule}\t{v.record_id}"
        if v.detail:
            line += f"\t{v.detail}"
        print(line)
    return EXIT_VIOLATIONS if violations else EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    parsed = _load_trace(args.trace)
    platform = _load_platform(args.platform, args.lifetime)
    spec = funit.FunctionalUnitSpec(qps=parsed.metadata.target_qps, alpha=args.alpha,
                                    beta=args.ttft, gamma=args.tpot)
    report = funit.build_report(parsed, platform, ci=args.ci, spec=spec)
    print(funit.report_to_json(report))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    paths: list[str] = []
    for pattern in args.traces:
        paths.extend(glob.glob(pattern))
    paths = sorted(set(paths))
    if not paths:
        raise GridError("no trace files matched --traces")

    platforms: dict[str, carbon.PlatformSpec] = {}
    reports = []
    for path in paths:
        parsed = _load_trace(path)
        pid = parsed.metadata.platform_id
        if pid not in platforms:
            platforms[pid] = _load_platform(
                os.path.join(args.platforms, pid + ".json"), args.lifetime)
        for alpha in args.alphas:
            spec = funit.FunctionalUnitSpec(qps=parsed.metadata.target_qps, alpha=alpha,
                                            beta=args.ttft, gamma=args.tpot)
            reports.append(funit.build_report(parsed, platforms[pid], ci=args.ci, spec=spec))

    grid = compare.build_grid(reports, list(args.alphas), args.ttft, args.tpot)
    sys.stdout.write(compare.emit_grid(grid, args.out))
    return EXIT_OK


def cmd_embodied(args: argparse.Namespace) -> int:
    platform = _load_platform(args.platform, args.lifetime)
    devices = []
    for dev in platform.devices:
        entry: dict = {
            "device_id": dev.device_id,
            "kind": dev.kind,
            "count": dev.count,
            "embodied_mode": dev.embodied_mode,
            "total_g": carbon.device_embodied(dev),
        }
        if dev.embodied_mode == "act":
            entry["manufacturing_g"] = (carbon.manufacturing_carbon(dev)
                                        if dev.kind in ("gpu", "cpu") else 0.0)
            entry["packaging_g"] = carbon.packaging_carbon(dev)
            entry["dram_g"] = carbon.dram_carbon(dev)
        devices.append(entry)
    doc = {
        "platform_id": platform.platform_id,
        "lifetime_s": platform.lifetime_s,
        "devices": devices,
        "platform_total_g": carbon.platform_embodied_total(platform),
    }
    print(json.dumps(doc, indent=2))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        profile = simulate.load_profile(args.profile)
    except OSError as exc:
        raise PlatformSpecError(f"cannot read profile {args.profile}: "
                                f"{exc.strerror or exc}") from exc
    except ValueError as exc:
        raise PlatformSpecError(str(exc)) from exc
    run, manifest = simulate.simulate_run(profile, args.qps, args.duration, args.seed,
                                          arrival_process=args.arrivals)
    trace.write_trace(run, args.out)
    simulate.write_manifest(manifest, args.out + ".manifest.json")
    print(f"wrote {args.out} ({len(run.requests)} requests, {len(run.power)} power samples) "
          f"and {args.out}.manifest.json", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuel",
        description="Carbon accounting for LLM serving traces, in grams per functional unit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a trace file against the data-model invariants")
    p.add_argument("trace", help="trace file path")
    p.set_defaults(func=cmd_validate)

    def add_fu_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--ci", type=float, default=None,
                       help="carbon intensity, gCO2eq/kWh (default 518 or FUEL_CI)")
        p.add_argument("--ttft", type=float, default=funit.DEFAULT_BETA_S,
                       help="max time to first token, seconds (default 1.0)")
        p.add_argument("--tpot", type=float, default=funit.DEFAULT_GAMMA_S_PER_TOKEN,
                       help="max time per output token, seconds (default 0.2)")
        p.add_argument("--lifetime", type=float, default=None,
                       help="override platform lifetime, seconds")

    p = sub.add_parser("report", help="carbon-per-functional-unit report for one trace")
    p.add_argument("--trace", required=True, help="trace file path")
    p.add_argument("--platform", required=True, help="platform spec JSON path")
    p.add_argument("--alpha", type=float, default=float("-inf"),
                   help="min Qscore for a token to count (default -inf: no quality floor)")
    add_fu_flags(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("compare", help="cross-configuration comparison grid")
    p.add_argument("--traces", required=True, nargs="+",
                   help="trace file glob pattern(s)")
    p.add_argument("--platforms", required=True,
                   help="directory of <platform_id>.json platform specs")
    p.add_argument("--alphas", required=True, nargs="+", type=float,
                   help="Qscore floors forming the grid's quality axis")
    p.add_argument("--out", choices=("csv", "json", "svg"), default="csv",
                   help="output document format (default csv)")
    add_fu_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("embodied", help="embodied-carbon breakdown of a platform spec")
    p.add_argument("--platform", required=True, help="platform spec JSON path")
    p.add_argument("--lifetime", type=float, default=None,
                   help="override platform lifetime, seconds")
    p.set_defaults(func=cmd_embodied)

    p = sub.add_parser("simulate", help="generate a synthetic trace plus ground-truth manifest")
    p.add_argument("--profile", required=True, help="simulation profile JSON path")
    p.add_argument("--qps", type=float, required=True, help="request rate")
    p.add_argument("--duration", type=float, required=True, help="arrival window, seconds")
    p.add_argument("--seed", type=int, required=True, help="RNG seed")
    p.add_argument("-o", "--out", required=True, help="output trace path")
    p.add_argument("--arrivals", choices=simulate.ARRIVAL_PROCESSES, default="poisson",
                   help="arrival process (default poisson)")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "ci", None) is None and hasattr(args, "ci"):
            args.ci = _default_ci()
        return args.func(args)
    except TraceValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATIONS
    except _PARSE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _SPEC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except _COMPUTE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except FuelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    raise SystemExit(main())
