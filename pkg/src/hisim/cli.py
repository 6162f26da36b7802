"""Command-line front end.

Subcommands:
    simulate     run one or more policies over a trace at a fixed beta
    sweep-theta  cost of every candidate threshold plus a confidence histogram
    compare      every policy x beta cell, plot-ready
    fault        windowed vibration detector decisions and bandwidth summary
    partition    latency of every DNN split point from a layer profile

Examples:
    hisim simulate --trace cifar10_trace.jsonl --beta 0.5 --policy hi
    hisim simulate --trace dog_trace.jsonl --beta 0.5 --policy filter
    hisim sweep-theta --trace cifar10_trace.jsonl --beta 0.5 --out sweep.csv
    hisim compare --trace cifar10_trace.jsonl --out compare.csv
    hisim fault --series vibro.csv --rate 48000 --out decisions.csv
    hisim partition --out plan.csv

Output is CSV by default (JSON mirrors the same fields); --out writes a file,
otherwise stdout. Auxiliary tables (sweep histogram, fault summary) go to a
sibling file named <out stem>_hist/<out stem>_summary, or follow the main
table on stdout. Runs are deterministic for a fixed seed: identical inputs
produce byte-identical outputs.

Exit codes: 0 success, 1 input error (unreadable or malformed files),
2 configuration error (bad flags or values).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import latency, schedulers
from .data import LAYER_PROFILE, fixture_path
from .fault import (
    DetectorConfig,
    classify_windows,
    offload_fraction,
    raw_bandwidth_bps,
    read_series_csv,
    read_series_i16,
    windowed_averages,
)
from .latency import HI_SERIAL, BandwidthStats, TimingParams, makespan
from .policy import (
    CostParams,
    evaluate_filter,
    filter_full_offload,
    optimal_threshold,
    threshold_sweep,
)
from .traces import BINARY, MULTICLASS, TraceError, parse_trace


class ConfigError(ValueError):
    """Bad flag combination or value; maps to exit code 2."""


SIMULATE_POLICIES = [
    "hi",
    "no-offload",
    "full-offload",
    "omd",
    "oma-random",
    "oma-worst",
    "filter",
]

DEFAULT_BETA_GRID = [round(0.1 * i, 1) for i in range(10)]


@dataclass
class RunConfig:
    """Everything one subcommand invocation needs, resolved from flags."""

    subcommand: str
    trace: Optional[str] = None
    trace_format: str = "jsonl"
    series: Optional[str] = None
    series_format: str = "csv"
    profile: Optional[str] = None
    policies: list = field(default_factory=lambda: ["hi"])
    beta: float = 0.5
    beta_grid: list = field(default_factory=lambda: list(DEFAULT_BETA_GRID))
    theta: Optional[float] = None
    budget_ms: Optional[float] = None
    window: int = 4096
    threshold: float = 0.07
    rate_hz: float = 48_000.0
    sensors: int = 1
    bytes_per_sample: int = 2
    input_mb: float = 0.003
    remote_only_ms: float = 74.34
    bin_width: float = 0.05
    seed: int = 0
    out: Optional[str] = None
    format: str = "csv"
    timing: TimingParams = field(default_factory=TimingParams)
    bandwidth: BandwidthStats = field(default_factory=BandwidthStats)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def _emit(columns: list[str], rows: list[dict], cfg: RunConfig, suffix: str = "") -> None:
    """Write one table as CSV or JSON to the configured destination."""
    if cfg.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
        payload = buf.getvalue()
    else:
        payload = json.dumps([{c: row[c] for c in columns} for row in rows], indent=2) + "\n"
    if cfg.out is None:
        if suffix:
            sys.stdout.write("\n")
        sys.stdout.write(payload)
        return
    path = Path(cfg.out)
    if suffix:
        ext = ".json" if cfg.format == "json" else ".csv"
        path = path.with_name(path.stem + "_" + suffix + ext)
    path.write_text(payload, encoding="utf-8")


def _report_row(r: schedulers.SimulationReport) -> dict:
    return {
        "policy": r.policy_name,
        "beta": r.beta,
        "theta": r.theta,
        "offloaded": r.offloaded_count,
        "errors": r.errors_total,
        "accuracy": r.accuracy,
        "cost_beta_coefficient": r.cost_beta_coefficient,
        "cost_constant": r.cost_constant,
        "cost": r.total_cost,
        "makespan_ms": r.makespan_ms,
        "throughput_jps": r.throughput_jps,
        "note": r.note,
    }


REPORT_COLUMNS = [
    "policy",
    "beta",
    "theta",
    "offloaded",
    "errors",
    "accuracy",
    "cost_beta_coefficient",
    "cost_constant",
    "cost",
    "makespan_ms",
    "throughput_jps",
    "note",
]


def _load_trace(cfg: RunConfig):
    if cfg.trace is None:
        raise ConfigError("--trace is required for this subcommand")
    return parse_trace(cfg.trace, cfg.trace_format)


def _filter_report(trace, cfg: RunConfig, costs: CostParams, full: bool) -> dict:
    outcome = filter_full_offload(trace) if full else evaluate_filter(trace, costs)
    name = "filter_full_offload" if full else "filter"
    if full:
        ms = len(trace) * cfg.timing.t_offload_ms
    else:
        ms = makespan(len(trace), outcome.offloaded_count, cfg.timing, HI_SERIAL)
    return {
        "policy": name,
        "beta": costs.beta,
        "theta": None,
        "offloaded": outcome.offloaded_count,
        "errors": outcome.false_negatives,
        "accuracy": outcome.accuracy,
        "cost_beta_coefficient": outcome.cost_beta_coefficient,
        "cost_constant": outcome.cost_constant,
        "cost": outcome.total_cost(costs.beta),
        "makespan_ms": ms,
        "throughput_jps": len(trace) / (ms / 1000.0),
        "note": "zero relevant samples" if outcome.zero_relevant else "",
    }


def cmd_simulate(cfg: RunConfig) -> None:
    trace = _load_trace(cfg)
    costs = CostParams(cfg.beta)
    rows = []
    for policy in cfg.policies:
        if trace.kind == BINARY:
            if policy == "filter":
                rows.append(_filter_report(trace, cfg, costs, full=False))
            elif policy == "full-offload":
                rows.append(_filter_report(trace, cfg, costs, full=True))
            else:
                raise ConfigError(f"policy {policy!r} needs a multiclass trace")
            continue
        if policy == "filter":
            raise ConfigError("policy 'filter' needs a binary trace")
        if policy == "hi":
            rows.append(
                _report_row(schedulers.hi_report(trace, costs, cfg.timing, theta=cfg.theta))
            )
        elif policy == "no-offload":
            rows.append(_report_row(schedulers.no_offload(trace, costs, cfg.timing)))
        elif policy == "full-offload":
            rows.append(_report_row(schedulers.full_offload(trace, costs, cfg.timing)))
        elif policy == "omd":
            rows.append(_report_row(schedulers.omd(trace, cfg.timing, costs)))
        elif policy in ("oma-random", "oma-worst"):
            budget = cfg.budget_ms
            if budget is None:
                budget = schedulers.hi_report(trace, costs, cfg.timing, theta=cfg.theta).makespan_ms
            variant = "random" if policy == "oma-random" else "worst_case"
            rows.append(
                _report_row(
                    schedulers.oma(trace, costs, cfg.timing, budget, variant, seed=cfg.seed)
                )
            )
        else:
            raise ConfigError(f"unknown policy {policy!r}")
    _emit(REPORT_COLUMNS, rows, cfg)


def cmd_sweep_theta(cfg: RunConfig) -> None:
    trace = _load_trace(cfg)
    costs = CostParams(cfg.beta)
    cells = threshold_sweep(trace, costs)
    best_policy, _ = optimal_threshold(trace, costs)
    rows = [
        {
            "theta": c.theta,
            "offloaded": c.offloaded_count,
            "local_errors": c.local_errors,
            "remote_errors": c.remote_errors,
            "cost": c.cost,
            "is_optimal": int(c.theta == best_policy.theta),
        }
        for c in cells
    ]
    _emit(
        ["theta", "offloaded", "local_errors", "remote_errors", "cost", "is_optimal"], rows, cfg
    )

    if cfg.bin_width <= 0 or cfg.bin_width > 1:
        raise ConfigError(f"--bin-width must be in (0, 1], got {cfg.bin_width}")
    n_bins = max(1, round(1.0 / cfg.bin_width))
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    conf = np.array([s.confidence for s in trace.samples])
    ok = np.array([s.local_correct for s in trace.samples], dtype=bool)
    correct, _ = np.histogram(conf[ok], bins=edges)  # last bin includes 1.0
    incorrect, _ = np.histogram(conf[~ok], bins=edges)
    hist = [
        {
            "bin_lo": float(edges[i]),
            "bin_hi": float(edges[i + 1]),
            "correct": int(correct[i]),
            "incorrect": int(incorrect[i]),
        }
        for i in range(n_bins)
    ]
    _emit(["bin_lo", "bin_hi", "correct", "incorrect"], hist, cfg, suffix="hist")


def cmd_compare(cfg: RunConfig) -> None:
    trace = _load_trace(cfg)
    reports = schedulers.compare_all(trace, cfg.timing, cfg.beta_grid, seed=cfg.seed)
    _emit(REPORT_COLUMNS, [_report_row(r) for r in reports], cfg)


def cmd_fault(cfg: RunConfig) -> None:
    if cfg.series is None:
        raise ConfigError("--series is required for the fault subcommand")
    if cfg.series_format == "csv":
        series = read_series_csv(cfg.series, cfg.rate_hz)
    elif cfg.series_format == "i16":
        series = read_series_i16(cfg.series, cfg.rate_hz)
    else:
        raise ConfigError(f"unknown series format {cfg.series_format!r}")
    detector = DetectorConfig(window=cfg.window, threshold=cfg.threshold)
    averages = windowed_averages(series, detector)
    decisions = classify_windows(averages, detector)
    rows = [
        {"window": i, "average": avg, "decision": dec}
        for i, (avg, dec) in enumerate(zip(averages, decisions))
    ]
    _emit(["window", "average", "decision"], rows, cfg)

    fraction = offload_fraction(decisions)
    raw = raw_bandwidth_bps(cfg.sensors, cfg.rate_hz, cfg.bytes_per_sample)
    summary = [
        {
            "n_windows": len(decisions),
            "offload_fraction": fraction,
            "raw_bandwidth_bps": raw,
            "bandwidth_saved_bps": raw * (1.0 - fraction),
        }
    ]
    _emit(
        ["n_windows", "offload_fraction", "raw_bandwidth_bps", "bandwidth_saved_bps"],
        summary,
        cfg,
        suffix="summary",
    )


def cmd_partition(cfg: RunConfig) -> None:
    profile = cfg.profile if cfg.profile is not None else fixture_path(LAYER_PROFILE)
    layers = schedulers.load_layer_profile(profile)
    splits = schedulers.partition_latencies(
        layers, cfg.input_mb, cfg.bandwidth, cfg.remote_only_ms
    )
    plan = schedulers.dnn_partition_plan(layers, cfg.input_mb, cfg.bandwidth, cfg.remote_only_ms)
    rows = []
    for s in splits:
        rows.append(
            {
                "split_after_layer": s.split_after_layer,
                "latency_lo_ms": s.interval.lo_ms,
                "latency_hi_ms": s.interval.hi_ms,
                "midpoint_ms": s.interval.midpoint_ms,
                "is_argmin": int(s.split_after_layer == plan.split_after_layer),
                "computed_lo_ms": s.computed_interval.lo_ms if s.computed_interval else None,
                "computed_hi_ms": s.computed_interval.hi_ms if s.computed_interval else None,
            }
        )
    _emit(
        [
            "split_after_layer",
            "latency_lo_ms",
            "latency_hi_ms",
            "midpoint_ms",
            "is_argmin",
            "computed_lo_ms",
            "computed_hi_ms",
        ],
        rows,
        cfg,
    )


def _parse_beta_grid(text: str) -> list[float]:
    try:
        grid = [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ConfigError(f"bad --beta-grid: {text!r}") from None
    if not grid:
        raise ConfigError("--beta-grid must name at least one beta value")
    for b in grid:
        if not 0.0 <= b < 1.0:
            raise ConfigError(f"beta values must be in [0, 1), got {b}")
    return grid


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hisim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, trace=False):
        p.add_argument("--config", help="flat TOML-style timing/bandwidth config file")
        p.add_argument("--t-local-ms", type=float, help="per-sample local inference time")
        p.add_argument("--t-offload-ms", type=float, help="per-sample offload constant")
        p.add_argument("--bw-mean", type=float, help="bandwidth mean, MB/s")
        p.add_argument("--bw-sd", type=float, help="bandwidth standard deviation, MB/s")
        p.add_argument("--bw-n", type=int, help="bandwidth measurement count")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        if trace:
            p.add_argument("--trace", required=True, help="trace file")
            p.add_argument("--trace-format", choices=["jsonl", "csv"], default="jsonl")

    p = sub.add_parser("simulate", help="run policies over a trace at one beta")
    common(p, trace=True)
    p.add_argument("--policy", default="hi", help=f"comma list of {SIMULATE_POLICIES}")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--theta", type=float, help="threshold override (default: searched)")
    p.add_argument("--budget-ms", type=float, help="time budget for oma (default: hi makespan)")

    p = sub.add_parser("sweep-theta", help="cost at every candidate threshold")
    common(p, trace=True)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--bin-width", type=float, default=0.05, help="confidence histogram bin")

    p = sub.add_parser("compare", help="all policies over a beta grid")
    common(p, trace=True)
    p.add_argument(
        "--beta-grid",
        default=",".join(str(b) for b in DEFAULT_BETA_GRID),
        help="comma-separated beta values",
    )

    p = sub.add_parser("fault", help="windowed vibration detector")
    common(p)
    p.add_argument("--series", required=True, help="amplitude series file")
    p.add_argument("--series-format", choices=["csv", "i16"], default="csv")
    p.add_argument("--rate", type=float, default=48_000.0, help="sample rate, Hz")
    p.add_argument("--window", type=int, default=4096)
    p.add_argument("--threshold", type=float, default=0.07)
    p.add_argument("--sensors", type=int, default=1)
    p.add_argument("--bytes-per-sample", type=int, default=2)

    p = sub.add_parser("partition", help="DNN split-point latencies")
    common(p)
    p.add_argument("--profile", help="layer profile CSV (default: bundled)")
    p.add_argument("--input-mb", type=float, default=0.003)
    p.add_argument("--remote-only-ms", type=float, default=74.34)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    timing, bw = TimingParams(), BandwidthStats()
    if args.config:
        timing, bw = latency.load_config(args.config)
    t_local = args.t_local_ms if args.t_local_ms is not None else timing.t_local_ms
    t_off = args.t_offload_ms if args.t_offload_ms is not None else timing.t_offload_ms
    bw_mean = args.bw_mean if args.bw_mean is not None else bw.mean_mb_per_s
    bw_sd = args.bw_sd if args.bw_sd is not None else bw.sd_mb_per_s
    bw_n = args.bw_n if args.bw_n is not None else bw.n_experiments
    try:
        timing = TimingParams(t_local_ms=t_local, t_offload_ms=t_off)
        bw = BandwidthStats(mean_mb_per_s=bw_mean, sd_mb_per_s=bw_sd, n_experiments=bw_n)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    cfg = RunConfig(subcommand=args.subcommand, seed=args.seed, out=args.out, format=args.format)
    cfg.timing, cfg.bandwidth = timing, bw
    for name in (
        "trace",
        "trace_format",
        "series",
        "series_format",
        "profile",
        "theta",
        "budget_ms",
        "window",
        "threshold",
        "sensors",
        "bytes_per_sample",
        "input_mb",
        "remote_only_ms",
        "bin_width",
    ):
        if hasattr(args, name) and getattr(args, name) is not None:
            setattr(cfg, name, getattr(args, name))
    if hasattr(args, "rate"):
        cfg.rate_hz = args.rate
    if hasattr(args, "beta"):
        try:
            cfg.beta = CostParams(args.beta).beta
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if hasattr(args, "beta_grid"):
        cfg.beta_grid = _parse_beta_grid(args.beta_grid)
    if hasattr(args, "policy"):
        cfg.policies = [p.strip() for p in args.policy.split(",") if p.strip()]
        for pol in cfg.policies:
            if pol not in SIMULATE_POLICIES:
                raise ConfigError(f"unknown policy {pol!r}; choose from {SIMULATE_POLICIES}")
    if hasattr(args, "theta") and args.theta is not None and not 0.0 <= args.theta < 1.0:
        raise ConfigError(f"--theta must be in [0, 1), got {args.theta}")
    return cfg


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep-theta": cmd_sweep_theta,
    "compare": cmd_compare,
    "fault": cmd_fault,
    "partition": cmd_partition,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        COMMANDS[args.subcommand](cfg)
    except ConfigError as exc:
        print(f"hisim: config error: {exc}", file=sys.stderr)
        return 2
    except (TraceError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"hisim: input error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"hisim: input error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
