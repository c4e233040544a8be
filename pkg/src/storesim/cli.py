"""Command-line front end: seed, gen, simulate, sweep, report.

All inputs and outputs are files (structured text and CSV); exit codes
are 0 on success, 1 for workload/simulation failures, 2 for bad input
files or arguments.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .calibrate import ci_check, derive_profile, parse_measurements
from .errors import InputError, StoresimError
from .profiles import StorageConfig, format_config, format_profile, parse_config, parse_profile
from .report import compare, format_ops_csv, format_ranking, format_report, parse_report
from .run import simulate, sweep
from .synth import PatternSpec, generate, sweep_configs

_SUFFIXES = {
    "k": 10**3, "kb": 10**3, "m": 10**6, "mb": 10**6, "g": 10**9, "gb": 10**9,
    "kib": 2**10, "mib": 2**20, "gib": 2**30,
}


def parse_size(text: str) -> int:
    """Integer byte count, allowing 100MB / 64KiB / 1.7GB style suffixes."""
    raw = text.strip().lower().replace("_", "")
    for suffix in sorted(_SUFFIXES, key=len, reverse=True):
        if raw.endswith(suffix):
            number = raw[: -len(suffix)].strip()
            try:
                return round(float(number) * _SUFFIXES[suffix])
            except ValueError:
                raise InputError(f"bad size {text!r}") from None
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"bad size {text!r}") from None


def parse_int_list(text: str) -> list[int]:
    try:
        values = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise InputError(f"bad integer list {text!r}") from None
    if not values:
        raise InputError(f"empty integer list {text!r}")
    return values


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_seed(args) -> int:
    m = parse_measurements(Path(args.measurements).read_text())
    for name, samples in (("full_op_ns", m.full_op_ns), ("zero_size_ns", m.zero_size_ns)):
        ci = ci_check(samples, confidence=args.confidence, target_rel=args.target_rel)
        if not ci.sufficient:
            rel = "inf" if ci.relative_half_width == float("inf") else f"{ci.relative_half_width:.1%}"
            print(
                f"warning: {name}: {ci.n} samples give relative half-width {rel} "
                f"(> {args.target_rel:.0%} at {args.confidence:.0%} confidence); "
                "profile emitted anyway",
                file=sys.stderr,
            )
    profile = derive_profile(
        m, frame_size=args.frame_size,
        control_message_size=args.control_size, core_latency=args.core_latency,
    )
    _write(args.out, format_profile(profile))
    return 0


def cmd_gen(args) -> int:
    spec = PatternSpec(
        pattern=args.pattern, width=args.width, stages=args.stages, reps=args.reps,
        mode=args.mode, scale=args.scale, input_size=args.input_size,
        inter_size=args.inter_size, output_size=args.output_size,
        replication=args.replication, first_host=args.first_host,
        co_locate_host=args.co_locate_host, db_size=args.db_size,
        query_size=args.query_size, read_size=args.read_size,
    )
    _write(args.out, generate(spec))
    if args.emit_configs:
        if not args.config:
            raise InputError("--emit-configs needs --config for the base configuration")
        base = parse_config(Path(args.config).read_text())
        out_dir = Path(args.emit_configs)
        out_dir.mkdir(parents=True, exist_ok=True)
        n = 0
        for label, params in sweep_configs(base, args.stripes or [base.stripe_width],
                                           args.repls or [base.replication_level]):
            (out_dir / f"{label}.cfg").write_text(format_config(StorageConfig(**params)))
            n += 1
        print(f"wrote {n} config files to {out_dir}", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    profile = parse_profile(Path(args.profile).read_text())
    config = parse_config(Path(args.config).read_text())
    workload_text = Path(args.workload).read_text()
    label = args.label or Path(args.workload).stem
    rep = simulate(profile, config, workload_text, seed=args.seed, label=label,
                   stagger_ns=args.stagger_ns, event_budget=args.budget)
    report_path = Path(f"{args.out}.report")
    report_path.write_text(format_report(rep))
    if args.ops:
        ops_path = Path(f"{args.out}.ops.csv")
        ops_path.write_text(format_ops_csv(rep.records))
    print(f"{rep.label}: makespan {rep.makespan_ns} ns, {rep.events} events, "
          f"wall {rep.wall_s:.3f} s")
    print(f"report: {report_path}" + (f", ops: {ops_path}" if args.ops else ""))
    return 0


def cmd_sweep(args) -> int:
    profile = parse_profile(Path(args.profile).read_text())
    base = parse_config(Path(args.config).read_text())
    workload_text = Path(args.workload).read_text()
    reports, skipped = sweep(
        profile, base, workload_text,
        stripes=args.stripes, repls=args.repls,
        chunks=args.chunks, placements=args.placements,
        seed=args.seed, stagger_ns=args.stagger_ns, jobs=args.jobs,
        event_budget=args.budget,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for rep in reports:
        (out_dir / f"{rep.label}.report").write_text(format_report(rep))
    ranking = format_ranking(compare(reports, band=args.band), skipped)
    (out_dir / "ranking.csv").write_text(ranking)
    sys.stdout.write(ranking)
    for label, reason in skipped:
        print(f"note: skipped {label}: {reason}", file=sys.stderr)
    return 0


def cmd_report(args) -> int:
    reports = [parse_report(Path(p).read_text()) for p in args.files]
    if len(reports) == 1:
        rep = reports[0]
        print(f"label: {rep.label}")
        print(f"makespan: {rep.makespan_ns} ns")
        print(f"ops: {rep.ops} (reads {rep.reads}, writes {rep.writes}, "
              f"opens {rep.opens}, closes {rep.closes})")
        print(f"events: {rep.events}")
        print(f"remote bytes: {rep.remote_data_bytes} data + {rep.remote_ctrl_bytes} control")
        print(f"loopback bytes: {rep.loopback_data_bytes} data + {rep.loopback_ctrl_bytes} control")
        print(f"storage footprint: {rep.storage_final_bytes} final, "
              f"{rep.storage_peak_bytes} peak")
        for st in rep.stages:
            print(f"stage {st.level}: {st.tasks} tasks, {st.ops} ops, "
                  f"window [{st.start_ns}, {st.end_ns}] ns")
        return 0
    ranking = format_ranking(compare(reports, band=args.band))
    if args.out:
        Path(args.out).write_text(ranking)
    sys.stdout.write(ranking)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="storesim",
        description="Predict workflow I/O turnaround on configurable "
                    "object-based storage, and rank candidate configurations.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("seed", help="derive a platform profile from measurements")
    p.add_argument("measurements", help="measurement file")
    p.add_argument("-o", "--out", default=None, help="profile output path (default stdout)")
    p.add_argument("--frame-size", type=parse_size, default=65536)
    p.add_argument("--control-size", type=parse_size, default=1024)
    p.add_argument("--core-latency", type=int, default=0, help="ns per frame")
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--target-rel", type=float, default=0.05)
    p.set_defaults(fn=cmd_seed)

    p = sub.add_parser("gen", help="generate a benchmark workload file")
    p.add_argument("pattern", choices=["micro_write", "micro_read", "pipeline",
                                       "reduce", "broadcast", "blast"])
    p.add_argument("-o", "--out", default=None, help="workload output path (default stdout)")
    p.add_argument("--width", type=int, default=19)
    p.add_argument("--stages", type=int, default=3)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--mode", choices=["dss", "wass"], default="dss")
    p.add_argument("--scale", type=int, default=1, help="10 = the large workload")
    p.add_argument("--input-size", type=parse_size, default=100_000_000)
    p.add_argument("--inter-size", type=parse_size, default=None)
    p.add_argument("--output-size", type=parse_size, default=None)
    p.add_argument("--replication", type=int, default=None,
                   help="replication override for broadcast/database files")
    p.add_argument("--first-host", type=int, default=1)
    p.add_argument("--co-locate-host", type=int, default=1)
    p.add_argument("--db-size", type=parse_size, default=1_700_000_000)
    p.add_argument("--query-size", type=parse_size, default=5_600)
    p.add_argument("--read-size", type=parse_size, default=57_344)
    p.add_argument("--emit-configs", default=None, metavar="DIR",
                   help="also write one config file per stripe/repl combination")
    p.add_argument("--config", default=None, help="base config for --emit-configs")
    p.add_argument("--stripes", type=parse_int_list, default=None)
    p.add_argument("--repls", type=parse_int_list, default=None)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("simulate", help="simulate one workload under one configuration")
    p.add_argument("--profile", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--workload", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--label", default=None)
    p.add_argument("--stagger-ns", type=int, default=0)
    p.add_argument("--budget", type=int, default=10**9, help="event budget")
    p.add_argument("-o", "--out", default="run", help="output prefix")
    p.add_argument("--no-ops", dest="ops", action="store_false",
                   help="skip the per-op CSV")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("sweep", help="simulate a config space and rank the results")
    p.add_argument("--profile", required=True)
    p.add_argument("--config", required=True, help="base configuration")
    p.add_argument("--workload", required=True)
    p.add_argument("--stripes", type=parse_int_list, required=True)
    p.add_argument("--repls", type=parse_int_list, required=True)
    p.add_argument("--chunks", type=parse_int_list, default=None)
    p.add_argument("--placements", type=lambda s: s.split(","), default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stagger-ns", type=int, default=0)
    p.add_argument("--budget", type=int, default=10**9)
    p.add_argument("--jobs", type=int, default=1, help="parallel simulations")
    p.add_argument("--band", type=float, default=0.02, help="equivalence band")
    p.add_argument("-d", "--out-dir", default="sweep_out")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("report", help="summarize one report or rank several")
    p.add_argument("files", nargs="+")
    p.add_argument("--band", type=float, default=0.02)
    p.add_argument("-o", "--out", default=None, help="ranking CSV output path")
    p.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InputError as exc:  # covers config and calibration errors
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StoresimError as exc:  # workload/simulation failures
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
