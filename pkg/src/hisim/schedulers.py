"""Comparison baselines and the DNN split-point evaluator.

Baselines against the threshold policy: accept everything locally
(no_offload), send everything to the server (full_offload), balance the two
machines so they finish together (omd), and offload as many jobs as a time
budget allows (oma, random or worst-case subset). All return the same report
shape so a sweep over beta can be emitted as one table. The split-point
evaluator prices running a profiled network's front layers on the device,
shipping the intermediate tensor, and finishing on the server.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .latency import (
    HI_SERIAL,
    PURE_PARTITION_PARALLEL,
    BandwidthStats,
    TimeInterval,
    TimingParams,
    comm_interval,
    makespan,
)
from .policy import (
    CostParams,
    HiOutcome,
    ThresholdPolicy,
    evaluate_policy,
    optimal_threshold,
    trace_arrays,
    _require_kind,
)
from .traces import MULTICLASS, Trace

POLICY_HI = "hi"
POLICY_NO_OFFLOAD = "no_offload"
POLICY_FULL_OFFLOAD = "full_offload"
POLICY_OMD = "omd"
POLICY_OMA_RANDOM = "oma_random"
POLICY_OMA_WORST = "oma_worst_case"
POLICY_DNN_PARTITION = "dnn_partitioning"

COMPARE_POLICIES = [
    POLICY_HI,
    POLICY_NO_OFFLOAD,
    POLICY_FULL_OFFLOAD,
    POLICY_OMD,
    POLICY_OMA_RANDOM,
    POLICY_OMA_WORST,
    POLICY_DNN_PARTITION,
]


@dataclass(frozen=True)
class SimulationReport:
    """One policy's aggregate over a trace at one beta."""

    policy_name: str
    n_samples: int
    beta: float
    offloaded_count: int
    errors_total: int
    accuracy: float
    cost_beta_coefficient: int
    cost_constant: int
    makespan_ms: float
    theta: Optional[float] = None
    note: str = ""

    @property
    def total_cost(self) -> float:
        return self.cost_beta_coefficient * self.beta + self.cost_constant

    @property
    def throughput_jps(self) -> float:
        return self.n_samples / (self.makespan_ms / 1000.0)


def _ids_and_correctness(trace: Trace):
    ids, _, local_ok, remote_ok = trace_arrays(trace)
    return ids, local_ok, remote_ok


def _subset_report(
    name: str,
    trace: Trace,
    offload_positions: np.ndarray,
    beta: float,
    makespan_ms: float,
    note: str = "",
) -> SimulationReport:
    """Report for an explicit offload subset: offloaded jobs err when the
    remote model errs, kept jobs err when the local model errs."""
    _, local_ok, remote_ok = _ids_and_correctness(trace)
    n = len(trace)
    off_mask = np.zeros(n, dtype=bool)
    off_mask[offload_positions] = True
    errors = int((off_mask & ~remote_ok).sum() + (~off_mask & ~local_ok).sum())
    return SimulationReport(
        policy_name=name,
        n_samples=n,
        beta=beta,
        offloaded_count=int(off_mask.sum()),
        errors_total=errors,
        accuracy=1.0 - errors / n,
        cost_beta_coefficient=int(off_mask.sum()),
        cost_constant=errors,
        makespan_ms=makespan_ms,
        note=note,
    )


def _report_from_outcome(
    name: str, outcome: HiOutcome, beta: float, makespan_ms: float, theta: Optional[float] = None
) -> SimulationReport:
    return SimulationReport(
        policy_name=name,
        n_samples=outcome.n_samples,
        beta=beta,
        offloaded_count=outcome.offloaded_count,
        errors_total=outcome.errors_total,
        accuracy=outcome.accuracy,
        cost_beta_coefficient=outcome.cost_beta_coefficient,
        cost_constant=outcome.cost_constant,
        makespan_ms=makespan_ms,
        theta=theta,
    )


def hi_report(
    trace: Trace, costs: CostParams, timing: TimingParams, theta: Optional[float] = None
) -> SimulationReport:
    """Threshold-policy report; searches the optimal theta when none is given."""
    if theta is None:
        policy, _ = optimal_threshold(trace, costs)
    else:
        policy = ThresholdPolicy(theta)
    outcome = evaluate_policy(trace, policy, costs)
    ms = makespan(len(trace), outcome.offloaded_count, timing, HI_SERIAL)
    return _report_from_outcome(POLICY_HI, outcome, costs.beta, ms, theta=policy.theta)


def no_offload(trace: Trace, costs: CostParams, timing: TimingParams) -> SimulationReport:
    """Accept every local inference; theta = 0 aggregate, N * t_local makespan."""
    outcome = evaluate_policy(trace, ThresholdPolicy(0.0), costs)
    ms = makespan(len(trace), 0, timing, HI_SERIAL)
    return _report_from_outcome(POLICY_NO_OFFLOAD, outcome, costs.beta, ms, theta=0.0)


def full_offload(trace: Trace, costs: CostParams, timing: TimingParams) -> SimulationReport:
    """Send every sample to the server; no local pass, N * t_offload makespan."""
    _require_kind(trace, MULTICLASS, "full_offload")
    _, _, remote_ok = _ids_and_correctness(trace)
    n = len(trace)
    errors = int((~remote_ok).sum())
    return SimulationReport(
        policy_name=POLICY_FULL_OFFLOAD,
        n_samples=n,
        beta=costs.beta,
        offloaded_count=n,
        errors_total=errors,
        accuracy=1.0 - errors / n,
        cost_beta_coefficient=n,
        cost_constant=errors,
        makespan_ms=n * timing.t_offload_ms,
    )


def omd_offload_count(n_total: int, timing: TimingParams) -> int:
    """Exhaustive minimizer of the parallel makespan over the offload count."""
    ns = np.arange(n_total + 1)
    spans = np.maximum((n_total - ns) * timing.t_local_ms, ns * timing.t_offload_ms)
    return int(np.argmin(spans))


def omd(
    trace: Trace,
    timing: TimingParams,
    costs: Optional[CostParams] = None,
    shuffle_seed: Optional[int] = None,
) -> SimulationReport:
    """Balance device and server so both finish together (minimum parallel makespan).

    The offloaded jobs are the n_off lowest-id samples; pass shuffle_seed for
    a seeded random assignment instead. Assignment affects accuracy only, not
    the makespan.
    """
    _require_kind(trace, MULTICLASS, "omd")
    n = len(trace)
    n_off = omd_offload_count(n, timing)
    ids, _, _ = _ids_and_correctness(trace)
    if shuffle_seed is None:
        positions = np.argsort(ids, kind="stable")[:n_off]
    else:
        positions = np.random.default_rng(shuffle_seed).choice(n, size=n_off, replace=False)
    ms = makespan(n, n_off, timing, PURE_PARTITION_PARALLEL)
    beta = costs.beta if costs is not None else 0.0
    return _subset_report(POLICY_OMD, trace, positions, beta, ms)


def oma_offload_count(n_total: int, timing: TimingParams, time_budget_ms: float) -> tuple[int, str]:
    """Largest offload count whose parallel makespan fits the budget.

    When no count fits (budget below the best achievable makespan), falls
    back to 0 offloads and says so in the returned note.
    """
    ns = np.arange(n_total + 1)
    spans = np.maximum((n_total - ns) * timing.t_local_ms, ns * timing.t_offload_ms)
    feasible = np.nonzero(spans <= time_budget_ms)[0]
    if feasible.size == 0:
        best = spans.min()
        return 0, (
            f"budget {time_budget_ms} ms infeasible; minimal achievable makespan "
            f"is {best} ms"
        )
    return int(feasible[-1]), ""


def oma(
    trace: Trace,
    costs: CostParams,
    timing: TimingParams,
    time_budget_ms: float,
    variant: str = "random",
    seed: int = 0,
) -> SimulationReport:
    """Offload as many jobs as the time budget allows.

    variant 'random' picks a uniformly random subset under the seed;
    'worst_case' offloads locally-correct samples first (lowest id first),
    keeping the hard ones on the device.
    """
    _require_kind(trace, MULTICLASS, "oma")
    if time_budget_ms < 0:
        raise ValueError(f"time budget must be >= 0, got {time_budget_ms}")
    n = len(trace)
    n_off, note = oma_offload_count(n, timing, time_budget_ms)
    ids, local_ok, _ = _ids_and_correctness(trace)
    if variant == "random":
        positions = np.random.default_rng(seed).choice(n, size=n_off, replace=False)
        name = POLICY_OMA_RANDOM
    elif variant == "worst_case":
        # Correct-first, id order within each group.
        order = np.lexsort((ids, ~local_ok))
        positions = order[:n_off]
        name = POLICY_OMA_WORST
    else:
        raise ValueError(f"unknown oma variant: {variant!r}")
    ms = makespan(n, n_off, timing, PURE_PARTITION_PARALLEL)
    return _subset_report(name, trace, positions, costs.beta, ms, note=note)


def compare_all(
    trace: Trace,
    timing: TimingParams,
    beta_grid: list[float],
    seed: int = 0,
) -> list[SimulationReport]:
    """One report per (policy, beta) cell.

    The threshold policy re-searches its optimal theta at each beta; the
    budget-constrained baseline gets that run's makespan as its budget. The
    partitioned-DNN baseline is priced as full offload (splitting the
    profiled network never beats shipping the raw input, see
    dnn_partition_plan).
    """
    reports: list[SimulationReport] = []
    for i, beta in enumerate(beta_grid):
        costs = CostParams(beta)
        hi = hi_report(trace, costs, timing)
        hi_ms = hi.makespan_ms
        full = full_offload(trace, costs, timing)
        reports.append(hi)
        reports.append(no_offload(trace, costs, timing))
        reports.append(full)
        reports.append(omd(trace, timing, costs))
        reports.append(oma(trace, costs, timing, hi_ms, "random", seed=seed + i))
        reports.append(oma(trace, costs, timing, hi_ms, "worst_case"))
        reports.append(
            SimulationReport(
                policy_name=POLICY_DNN_PARTITION,
                n_samples=full.n_samples,
                beta=beta,
                offloaded_count=full.offloaded_count,
                errors_total=full.errors_total,
                accuracy=full.accuracy,
                cost_beta_coefficient=full.cost_beta_coefficient,
                cost_constant=full.cost_constant,
                makespan_ms=full.makespan_ms,
                note="split point 0: equivalent to full offload",
            )
        )
    return reports


@dataclass(frozen=True)
class LayerProfile:
    """Per-layer device time, server time, and output tensor size."""

    layer_index: int
    device_ms: float
    server_ms: float
    output_mb: float

    def __post_init__(self):
        if self.device_ms < 0 or self.server_ms < 0 or self.output_mb < 0:
            raise ValueError(f"layer {self.layer_index}: times and sizes must be >= 0")


@dataclass(frozen=True)
class SplitLatency:
    """Latency of one candidate split; split 0 also carries the interval
    computed from transfer arithmetic next to the measured end-to-end value."""

    split_after_layer: int
    interval: TimeInterval
    computed_interval: Optional[TimeInterval] = None


@dataclass(frozen=True)
class PartitionPlan:
    split_after_layer: int
    latency_interval: TimeInterval


def partition_latencies(
    layers: list[LayerProfile],
    input_mb: float,
    bw: BandwidthStats,
    remote_only_ms: float,
) -> list[SplitLatency]:
    """Latency interval of every split point 0..L.

    Split k runs layers 1..k on the device, ships layer k's output, and runs
    the rest on the server; after the last layer nothing is shipped. Split 0
    is full offload and is priced at the measured end-to-end constant, with
    the transfer-arithmetic value (input transfer + all server layers)
    attached for comparison.
    """
    if not layers:
        raise ValueError("empty layer profile")
    device = [l.device_ms for l in layers]
    server = [l.server_ms for l in layers]
    out: list[SplitLatency] = []
    computed0 = comm_interval(input_mb, bw).shift(sum(server))
    out.append(
        SplitLatency(
            split_after_layer=0,
            interval=TimeInterval(remote_only_ms, remote_only_ms),
            computed_interval=computed0,
        )
    )
    for k in range(1, len(layers) + 1):
        device_part = sum(device[:k])
        server_part = sum(server[k:])
        if k == len(layers):
            comm = TimeInterval(0.0, 0.0)
        else:
            comm = comm_interval(layers[k - 1].output_mb, bw)
        out.append(
            SplitLatency(
                split_after_layer=k,
                interval=comm.shift(device_part + server_part),
            )
        )
    return out


def dnn_partition_plan(
    layers: list[LayerProfile],
    input_mb: float,
    bw: BandwidthStats,
    remote_only_ms: float,
) -> PartitionPlan:
    """Pick the split with the smallest midpoint latency."""
    splits = partition_latencies(layers, input_mb, bw, remote_only_ms)
    best = min(splits, key=lambda s: s.interval.midpoint_ms)
    return PartitionPlan(
        split_after_layer=best.split_after_layer, latency_interval=best.interval
    )


def load_layer_profile(path) -> list[LayerProfile]:
    """Read a layer profile CSV with header layer,device_ms,server_ms,output_mb."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty layer profile") from None
        if header != ["layer", "device_ms", "server_ms", "output_mb"]:
            raise ValueError(f"{path}: unrecognized header {header}")
        layers = [
            LayerProfile(
                layer_index=int(row[0]),
                device_ms=float(row[1]),
                server_ms=float(row[2]),
                output_mb=float(row[3]),
            )
            for row in reader
            if row
        ]
    if not layers:
        raise ValueError(f"{path}: empty layer profile")
    return layers
