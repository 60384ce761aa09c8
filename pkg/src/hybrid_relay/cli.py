"""Command-line entry point: ``hybrid-relay {sweep,preset,verify-claims}``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments
from .experiments import ClaimSet, ConfigError, SweepSpec


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, help="CSV destination (default: stdout)")
    p.add_argument("--mc-trials", type=int, help="Monte Carlo trials per point; 0 disables")
    p.add_argument("--seed", type=int, help="master seed (64-bit unsigned)")
    p.add_argument("--self-check", action="store_true", help="re-derive BER rows by quadrature before writing")
    p.add_argument("--workers", type=int, default=1, help="worker processes (output is identical for any value)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybrid-relay", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a sweep described by a config file")
    sweep.add_argument("--config", type=Path, required=True)
    _add_run_options(sweep)

    preset = sub.add_parser("preset", help="run one of the built-in figure sweeps")
    preset.add_argument("name", choices=experiments.PRESETS)
    _add_run_options(preset)

    claims = sub.add_parser("verify-claims", help="check the reported dB gaps")
    claims.add_argument("--config", type=Path, help="claim-set file (default: all claims)")
    claims.add_argument("--tolerance-db", type=float, help="tolerance for claims without their own")
    return parser


def _run(spec: SweepSpec, args) -> int:
    try:
        spec = experiments.with_overrides(spec, mc_trials=args.mc_trials, seed=args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rows = experiments.run_sweep(spec, workers=args.workers)
    if args.self_check:
        failures = experiments.self_check(spec, rows)
        if failures:
            for msg in failures:
                print(f"self-check failed: {msg}", file=sys.stderr)
            return 1
    if args.out is None:
        experiments.write_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            experiments.write_csv(rows, fh)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            spec = experiments.load_config(args.config)
            if not isinstance(spec, SweepSpec):
                print("error: config describes a claim set, not a sweep", file=sys.stderr)
                return 2
            return _run(spec, args)
        if args.command == "preset":
            return _run(experiments.load_preset(args.name), args)

        claim_set = ClaimSet()
        if args.config is not None:
            claim_set = experiments.load_config(args.config)
            if not isinstance(claim_set, ClaimSet):
                print("error: config describes a sweep, not a claim set", file=sys.stderr)
                return 2
        if args.tolerance_db is not None:
            claim_set = ClaimSet(claim_set.claims, args.tolerance_db)
        report = experiments.verify_claims(claim_set)
        print(report.text())
        return 0 if report.passed else 1
    except (ConfigError, experiments.SweepError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
