"""Confidence-threshold offloading policy, cost model, and threshold search.

Decision rule per sample: offload when the local model's top-1 confidence p
falls below a threshold theta, accept the local inference otherwise (p >= theta
accepts). Per-sample cost: an offloaded sample pays the fixed offload price
beta plus 1 if the remote prediction is wrong; an accepted sample pays 1 if
the local prediction is wrong. The binary relevance-filter variant offloads
at p >= 0.5 and pays beta per offloaded relevant sample and 1 per offloaded
irrelevant one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .traces import BINARY, MULTICLASS, InferenceSample, BinarySample, Trace

OFFLOAD = "offload"
ACCEPT = "accept"
DISCARD = "discard"


class KindMismatchError(ValueError):
    """Operation applied to a trace of the wrong kind."""


@dataclass(frozen=True)
class CostParams:
    """Fixed cost charged per offloaded sample, 0 <= beta < 1."""

    beta: float

    def __post_init__(self):
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must be in [0, 1), got {self.beta}")


@dataclass(frozen=True)
class ThresholdPolicy:
    """Confidence threshold theta in [0, 1)."""

    theta: float

    def __post_init__(self):
        if not 0.0 <= self.theta < 1.0:
            raise ValueError(f"theta must be in [0, 1), got {self.theta}")


@dataclass(frozen=True)
class HiOutcome:
    """Aggregate result of running the threshold policy over a trace.

    Total cost decomposes as cost_beta_coefficient * beta + cost_constant.
    """

    n_samples: int
    offloaded_count: int
    local_errors: int
    remote_errors: int

    @property
    def errors_total(self) -> int:
        return self.local_errors + self.remote_errors

    @property
    def cost_constant(self) -> int:
        return self.errors_total

    @property
    def cost_beta_coefficient(self) -> int:
        return self.offloaded_count

    @property
    def accuracy(self) -> float:
        return 1.0 - self.errors_total / self.n_samples

    def total_cost(self, beta: float) -> float:
        return self.cost_beta_coefficient * beta + self.cost_constant


@dataclass(frozen=True)
class FilterOutcome:
    """Aggregate result of the binary relevance filter over a trace.

    Accuracy is recall over relevant samples; a trace with no relevant
    samples reports accuracy 1.0 with zero_relevant set. Cost decomposes as
    cost_beta_coefficient * beta + cost_constant where the coefficient counts
    offloaded relevant samples and the constant counts false positives.
    """

    n_samples: int
    relevant_count: int
    true_positives: int
    false_positives: int
    false_negatives: int

    @property
    def offloaded_count(self) -> int:
        return self.true_positives + self.false_positives

    @property
    def zero_relevant(self) -> bool:
        return self.relevant_count == 0

    @property
    def cost_constant(self) -> int:
        return self.false_positives

    @property
    def cost_beta_coefficient(self) -> int:
        return self.true_positives

    @property
    def accuracy(self) -> float:
        if self.relevant_count == 0:
            return 1.0
        return self.true_positives / self.relevant_count

    def total_cost(self, beta: float) -> float:
        return self.cost_beta_coefficient * beta + self.cost_constant


def decide(sample: InferenceSample, policy: ThresholdPolicy) -> str:
    """OFFLOAD when confidence < theta, ACCEPT otherwise (equality accepts)."""
    return OFFLOAD if sample.confidence < policy.theta else ACCEPT


def sample_cost(sample: InferenceSample, policy: ThresholdPolicy, costs: CostParams) -> float:
    """Cost of one sample under the policy: beta + eta offloaded, gamma accepted."""
    if decide(sample, policy) == OFFLOAD:
        return costs.beta + (0.0 if sample.remote_correct else 1.0)
    return 0.0 if sample.local_correct else 1.0


def _require_kind(trace: Trace, kind: str, op: str) -> None:
    if trace.kind != kind:
        raise KindMismatchError(f"{op} requires a {kind} trace, got {trace.kind}")
    if len(trace) == 0:
        raise ValueError(f"{op} requires a non-empty trace")


def trace_arrays(trace: Trace):
    """(ids, confidences, local_correct, remote_correct) as numpy arrays.

    Cached on the trace; safe because traces are immutable.
    """
    cached = trace.__dict__.get("_np_cache")
    if cached is None:
        cached = (
            np.array([s.id for s in trace.samples]),
            np.array([s.confidence for s in trace.samples], dtype=float),
            np.array([s.local_correct for s in trace.samples], dtype=bool),
            np.array([s.remote_correct for s in trace.samples], dtype=bool),
        )
        object.__setattr__(trace, "_np_cache", cached)
    return cached


def _multiclass_arrays(trace: Trace):
    _, conf, local_ok, remote_ok = trace_arrays(trace)
    return conf, local_ok, remote_ok


def evaluate_policy(trace: Trace, policy: ThresholdPolicy, costs: CostParams) -> HiOutcome:
    """Aggregate the per-sample costs of a threshold policy over a trace."""
    _require_kind(trace, MULTICLASS, "evaluate_policy")
    conf, local_ok, remote_ok = _multiclass_arrays(trace)
    off = conf < policy.theta
    return HiOutcome(
        n_samples=len(trace),
        offloaded_count=int(off.sum()),
        local_errors=int((~off & ~local_ok).sum()),
        remote_errors=int((off & ~remote_ok).sum()),
    )


def candidate_thetas(confidences) -> np.ndarray:
    """Exhaustive threshold candidates: every accept/offload split a theta in
    [0, 1) can induce is induced by one of these.

    The set is 0, each distinct confidence, midpoints between consecutive
    distinct confidences, and one value above the maximum confidence (when
    that maximum is below 1, so "offload everything" is reachable).
    """
    distinct = np.unique(np.asarray(confidences, dtype=float))
    cands = [np.array([0.0]), distinct, (distinct[:-1] + distinct[1:]) / 2.0]
    if distinct[-1] < 1.0:
        cands.append(np.array([(distinct[-1] + 1.0) / 2.0]))
    merged = np.unique(np.concatenate(cands))
    return merged[merged < 1.0]


@dataclass(frozen=True)
class ThetaCell:
    """One candidate threshold's aggregate in a sweep."""

    theta: float
    offloaded_count: int
    local_errors: int
    remote_errors: int
    cost: float


def threshold_sweep(trace: Trace, costs: CostParams) -> list[ThetaCell]:
    """Aggregate cost of every candidate threshold, ascending in theta.

    Runs in O(n log n): samples are sorted by confidence once, then each
    candidate is scored from prefix sums. Offloading the k lowest-confidence
    samples costs k*beta + (remote errors among them) + (local errors among
    the rest).
    """
    _require_kind(trace, MULTICLASS, "threshold_sweep")
    conf, local_ok, remote_ok = _multiclass_arrays(trace)
    order = np.argsort(conf, kind="stable")
    conf_sorted = conf[order]
    remote_err_prefix = np.concatenate([[0], np.cumsum(~remote_ok[order])])
    local_err_suffix = np.concatenate([np.cumsum(~local_ok[order][::-1])[::-1], [0]])
    thetas = candidate_thetas(conf)
    ks = np.searchsorted(conf_sorted, thetas, side="left")
    costs_arr = ks * costs.beta + remote_err_prefix[ks] + local_err_suffix[ks]
    return [
        ThetaCell(
            theta=float(thetas[i]),
            offloaded_count=int(ks[i]),
            local_errors=int(local_err_suffix[ks[i]]),
            remote_errors=int(remote_err_prefix[ks[i]]),
            cost=float(costs_arr[i]),
        )
        for i in range(len(thetas))
    ]


def optimal_threshold(trace: Trace, costs: CostParams) -> tuple[ThresholdPolicy, float]:
    """Brute-force the cost-minimizing threshold over all candidate thetas.

    Ties break toward the smallest theta (fewer offloads at equal cost).
    """
    cells = threshold_sweep(trace, costs)
    best = min(cells, key=lambda c: c.cost)  # min keeps the first (smallest theta) on ties
    return ThresholdPolicy(theta=best.theta), best.cost


def cost_reduction_vs_full_offload(
    outcome, trace_size: int, full_offload_errors: int, beta: float
) -> float:
    """Percent cost reduction of an outcome against offloading everything.

    Full-offload cost is trace_size * beta + full_offload_errors; pass the
    count of beta-bearing jobs as trace_size (all samples for multiclass,
    relevant samples only for the binary filter, where irrelevant offloads
    pay 1 instead of beta).
    """
    c_full = trace_size * beta + full_offload_errors
    if c_full == 0:
        raise ZeroDivisionError("full-offload cost is zero")
    return (c_full - outcome.total_cost(beta)) / c_full * 100.0


def filter_decide(sample: BinarySample) -> str:
    """OFFLOAD when confidence >= 0.5 (boundary offloads), DISCARD otherwise."""
    return OFFLOAD if sample.confidence >= 0.5 else DISCARD


def evaluate_filter(trace: Trace, costs: CostParams) -> FilterOutcome:
    """Aggregate the relevance filter (offload at p >= 0.5) over a binary trace."""
    _require_kind(trace, BINARY, "evaluate_filter")
    tp = fp = fn = relevant = 0
    for s in trace.samples:
        relevant += s.is_relevant
        if filter_decide(s) == OFFLOAD:
            if s.is_relevant:
                tp += 1
            else:
                fp += 1
        elif s.is_relevant:
            fn += 1
    return FilterOutcome(
        n_samples=len(trace),
        relevant_count=relevant,
        true_positives=tp,
        false_positives=fp,
        false_negatives=fn,
    )


def filter_full_offload(trace: Trace) -> FilterOutcome:
    """Filter baseline that offloads every sample: recall 1, cost R*beta + I."""
    _require_kind(trace, BINARY, "filter_full_offload")
    relevant = sum(s.is_relevant for s in trace.samples)
    return FilterOutcome(
        n_samples=len(trace),
        relevant_count=relevant,
        true_positives=relevant,
        false_positives=len(trace) - relevant,
        false_negatives=0,
    )
