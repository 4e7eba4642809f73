"""Command-line drivers for single runs, parameter sweeps, and traffic traces."""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import replace

from . import experiments, metrics
from .engine import (
    arrival_histogram,
    build_packet_table,
    load_scenario,
    run_ensemble,
    scenario_to_dict,
)
from .errors import ConfigError, SimulationError


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError as exc:
        raise ConfigError(f"{flag} expects comma-separated integers: {text!r}") from exc


def _add_budget_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seeds", type=int, default=100,
                        help="independent seeds per point (default 100)")
    parser.add_argument("--duration", type=float, default=10.0,
                        help="simulated seconds per run (default 10)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlosim",
        description="Discrete-event simulator of VR traffic over single- and "
                    "multi-link Wi-Fi, judged against recommended delay bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario file over a seed ensemble")
    run_p.add_argument("--config", required=True, help="scenario JSON file")
    run_p.add_argument("--seeds", type=int, default=None,
                       help="override the scenario's seed count")
    run_p.add_argument("--duration", type=float, default=None,
                       help="override the scenario's duration (seconds)")
    run_p.add_argument("--out", required=True, help="output directory")

    sweep_p = sub.add_parser("sweep", help="parameter sweeps")
    sweep_sub = sweep_p.add_subparsers(dest="sweep_kind", required=True)

    mcs_p = sweep_sub.add_parser("min-mcs", help="minimum passing MCS per bandwidth")
    mcs_p.add_argument("--mode", choices=["slo", "mlo"], required=True)
    mcs_p.add_argument("--bandwidths", default="20,40,80,160,320",
                       help="comma-separated MHz values")
    mcs_p.add_argument("--direction", choices=["dl", "ul"], required=True)
    mcs_p.add_argument("--out", required=True)
    _add_budget_flags(mcs_p)

    cap_p = sweep_sub.add_parser("capacity", help="max stations meeting all bounds")
    cap_p.add_argument("--mode", choices=["slo", "mlo"], required=True)
    cap_p.add_argument("--links", default="2x80", help="link layout, e.g. 2x80")
    cap_p.add_argument("--mcs", type=int, default=11)
    cap_p.add_argument("--max-users", type=int, default=16)
    cap_p.add_argument("--out", required=True)
    _add_budget_flags(cap_p)

    split_p = sweep_sub.add_parser("link-split", help="same band, different link counts")
    split_p.add_argument("--total-bw", type=int, default=160)
    split_p.add_argument("--splits", default="2x80,4x40,8x20",
                         help="comma-separated layouts")
    split_p.add_argument("--mcs", type=int, default=11)
    split_p.add_argument("--max-users", type=int, default=16)
    split_p.add_argument("--out", required=True)
    _add_budget_flags(split_p)

    trace_p = sub.add_parser("trace", help="offered-traffic histogram, no MAC")
    trace_p.add_argument("--config", required=True, help="scenario JSON file")
    trace_p.add_argument("--bin-ms", type=float, default=1.0)
    trace_p.add_argument("--out", required=True, help="output CSV file")

    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    config = load_scenario(args.config)
    if args.seeds is not None:
        config = replace(config, seeds=args.seeds)
    if args.duration is not None:
        config = replace(config, duration_s=args.duration)
    ensemble = run_ensemble(config)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "metrics.csv")
    metrics.write_summary_csv(
        csv_path, metrics.summary_rows(experiments.scenario_id(config), ensemble)
    )
    experiments.write_manifest(
        os.path.join(args.out, "manifest.json"),
        experiments.run_manifest(config, config.seeds, [csv_path]),
    )
    print(f"wrote {csv_path}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    mode = experiments.MODE_FLAGS[args.mode] if hasattr(args, "mode") else None
    if args.sweep_kind == "min-mcs":
        result = experiments.min_mcs_map(
            mode,
            _parse_int_list(args.bandwidths, "--bandwidths"),
            args.direction.upper(),
            seeds=args.seeds,
            duration_s=args.duration,
            out_dir=args.out,
        )
        for bw, mcs in result.items():
            print(f"{bw} MHz: {'none' if mcs is None else f'MCS {mcs}'}")
    elif args.sweep_kind == "capacity":
        result = experiments.capacity_sweep(
            mode, args.links, args.mcs, args.max_users,
            seeds=args.seeds, duration_s=args.duration, out_dir=args.out,
        )
        print(f"capacity {args.links}: {result.capacity} users")
    else:
        result = experiments.link_split_compare(
            args.total_bw,
            [s for s in args.splits.split(",") if s],
            args.mcs, args.max_users,
            seeds=args.seeds, duration_s=args.duration, out_dir=args.out,
        )
        for spec, cap in result.capacities.items():
            print(f"{spec}: {cap} users")
    return 0


def _cmd_trace(args: argparse.Namespace) -> int:
    if args.bin_ms <= 0:
        raise ConfigError("--bin-ms must be positive")
    config = load_scenario(args.config)
    table = build_packet_table(config, seed=0)
    hist = arrival_histogram(table, args.bin_ms * 1e-3)
    out_dir = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(out_dir, exist_ok=True)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bin_start_s", "kind", "bytes"])
        for kind in sorted(hist):
            for i, total in enumerate(hist[kind].tolist()):
                writer.writerow([f"{i * args.bin_ms * 1e-3:.6f}", kind, str(total)])
    experiments.write_manifest(
        args.out + ".manifest.json",
        {"config": scenario_to_dict(config), "bin_ms": args.bin_ms,
         "seed": 0, "outputs": [args.out]},
    )
    print(f"wrote {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_trace(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (SimulationError, AssertionError) as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
