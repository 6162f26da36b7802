"""Parameterized synthetic trace generation.

A SyntheticSpec pins the aggregate counts a downstream evaluation must see —
how many samples sit below the decision threshold, how many errors each side
carries — and the generator places them exactly, drawing confidences from
truncated Beta shapes within each side of the threshold (bimodal by default:
mass near 1 above the threshold). Everything else is seeded-uniform, so a
spec + seed is a reproducible, byte-stable trace.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .formats import BINARY, MULTICLASS, binary_record, multiclass_record, write_trace_file

CONF_LO = 0.02
CONF_HI = 0.9995


class SpecError(ValueError):
    """Inconsistent synthetic-trace specification."""


@dataclass(frozen=True)
class SyntheticSpec:
    """Constraints for one generated trace.

    multiclass: exactly target_offload_count confidences fall strictly below
    theta; local_error_count accepted samples and remote_error_count offloaded
    samples carry errors. total_local_errors / total_remote_errors pin the
    whole-trace error counts; when omitted, the unconstrained side defaults to
    the constrained side's rate.

    binary: relevant_count samples are relevant; true_positives of them score
    >= 0.5, and false_positives of the irrelevant ones do.
    """

    kind: str
    n: int
    seed: int = 0
    # multiclass
    theta: float = 0.5
    target_offload_count: int = 0
    local_error_count: int = 0
    remote_error_count: int = 0
    total_local_errors: Optional[int] = None
    total_remote_errors: Optional[int] = None
    n_classes: int = 10
    # binary
    relevant_count: int = 0
    true_positives: int = 0
    false_positives: int = 0
    # confidence shapes: Beta(a, b) within each threshold side
    below_shape: tuple = (2.0, 2.0)
    above_shape: tuple = (2.5, 1.1)

    def __post_init__(self):
        if self.kind not in (MULTICLASS, BINARY):
            raise SpecError(f"unknown kind {self.kind!r}")
        if self.n < 1:
            raise SpecError(f"n must be >= 1, got {self.n}")
        if self.kind == MULTICLASS:
            self._check_multiclass()
        else:
            self._check_binary()

    def _check_multiclass(self):
        if not 0.0 < self.theta < 1.0:
            raise SpecError(f"theta must be in (0, 1), got {self.theta}")
        k, m = self.target_offload_count, self.n - self.target_offload_count
        if not 0 <= k <= self.n:
            raise SpecError(f"target_offload_count {k} outside [0, {self.n}]")
        if not 0 <= self.local_error_count <= m:
            raise SpecError(f"local_error_count {self.local_error_count} exceeds accepted group {m}")
        if not 0 <= self.remote_error_count <= k:
            raise SpecError(f"remote_error_count {self.remote_error_count} exceeds offloaded group {k}")
        if self.total_local_errors is not None and not (
            self.local_error_count <= self.total_local_errors <= self.local_error_count + k
        ):
            raise SpecError(
                f"total_local_errors {self.total_local_errors} incompatible with "
                f"{self.local_error_count} accepted-side errors and {k} offloaded samples"
            )
        if self.total_remote_errors is not None and not (
            self.remote_error_count <= self.total_remote_errors <= self.remote_error_count + m
        ):
            raise SpecError(
                f"total_remote_errors {self.total_remote_errors} incompatible with "
                f"{self.remote_error_count} offloaded-side errors and {m} accepted samples"
            )
        if self.n_classes < 2:
            raise SpecError("n_classes must be >= 2")

    def _check_binary(self):
        if not 0 <= self.relevant_count <= self.n:
            raise SpecError(f"relevant_count {self.relevant_count} outside [0, {self.n}]")
        if not 0 <= self.true_positives <= self.relevant_count:
            raise SpecError(f"true_positives {self.true_positives} exceeds relevant group")
        if not 0 <= self.false_positives <= self.n - self.relevant_count:
            raise SpecError(f"false_positives {self.false_positives} exceeds irrelevant group")


def _scaled_beta(rng, shape, size, lo, hi):
    return lo + rng.beta(shape[0], shape[1], size=size) * (hi - lo)


def _rate_scaled(count, group, other_group):
    # Default completion: apply the constrained group's error rate to the other.
    if group == 0:
        return 0
    return round(other_group * count / group)


def _wrong_labels(rng, true, n_classes):
    return (true + 1 + rng.integers(0, n_classes - 1, size=len(true))) % n_classes


def _generate_multiclass(spec: SyntheticSpec, rng):
    k = spec.target_offload_count
    m = spec.n - k
    below = _scaled_beta(rng, spec.below_shape, k, CONF_LO, spec.theta * (1 - 1e-12))
    above = _scaled_beta(rng, spec.above_shape, m, spec.theta, CONF_HI)
    conf = np.concatenate([below, above])

    total_local = (
        spec.total_local_errors
        if spec.total_local_errors is not None
        else spec.local_error_count + _rate_scaled(spec.local_error_count, m, k)
    )
    total_remote = (
        spec.total_remote_errors
        if spec.total_remote_errors is not None
        else spec.remote_error_count + _rate_scaled(spec.remote_error_count, k, m)
    )

    local_wrong = np.zeros(spec.n, dtype=bool)
    remote_wrong = np.zeros(spec.n, dtype=bool)
    off_idx = np.arange(k)
    acc_idx = np.arange(k, spec.n)
    local_wrong[rng.choice(acc_idx, size=spec.local_error_count, replace=False)] = True
    local_wrong[rng.choice(off_idx, size=total_local - spec.local_error_count, replace=False)] = True
    remote_wrong[rng.choice(off_idx, size=spec.remote_error_count, replace=False)] = True
    remote_wrong[rng.choice(acc_idx, size=total_remote - spec.remote_error_count, replace=False)] = True

    true = rng.integers(0, spec.n_classes, size=spec.n)
    local = np.where(local_wrong, _wrong_labels(rng, true, spec.n_classes), true)
    remote = np.where(remote_wrong, _wrong_labels(rng, true, spec.n_classes), true)

    ids = rng.permutation(spec.n)
    order = np.argsort(ids)
    return [multiclass_record(ids[i], conf[i], local[i], remote[i], true[i]) for i in order]


def _generate_binary(spec: SyntheticSpec, rng):
    r, tp = spec.relevant_count, spec.true_positives
    irr, fp = spec.n - spec.relevant_count, spec.false_positives
    conf = np.concatenate(
        [
            _scaled_beta(rng, spec.above_shape, tp, 0.5, CONF_HI),
            _scaled_beta(rng, spec.below_shape, r - tp, CONF_LO, 0.5 * (1 - 1e-12)),
            _scaled_beta(rng, spec.above_shape, fp, 0.5, CONF_HI),
            _scaled_beta(rng, spec.below_shape, irr - fp, CONF_LO, 0.5 * (1 - 1e-12)),
        ]
    )
    relevant = np.concatenate([np.ones(r, dtype=bool), np.zeros(irr, dtype=bool)])
    ids = rng.permutation(spec.n)
    order = np.argsort(ids)
    records = [binary_record(ids[i], conf[i], relevant[i]) for i in order]
    return records


def generate_synthetic(spec: SyntheticSpec, out_path, format: str = "jsonl") -> None:
    """Emit a trace file satisfying the spec exactly (seeded, byte-stable)."""
    rng = np.random.default_rng(spec.seed)
    if spec.kind == MULTICLASS:
        records = _generate_multiclass(spec, rng)
    else:
        records = _generate_binary(spec, rng)
    metadata = {"source": "traceadapter-synthetic", "seed": str(spec.seed)}
    write_trace_file(out_path, spec.kind, records, metadata=metadata, format=format)


def spec_from_dict(data: dict) -> SyntheticSpec:
    """Build a SyntheticSpec from parsed JSON, rejecting unknown keys."""
    known = {f.name for f in SyntheticSpec.__dataclass_fields__.values()}
    unknown = set(data) - known
    if unknown:
        raise SpecError(f"unknown spec keys: {sorted(unknown)}")
    if "kind" not in data or "n" not in data:
        raise SpecError("spec requires at least 'kind' and 'n'")
    if "below_shape" in data:
        data = {**data, "below_shape": tuple(data["below_shape"])}
    if "above_shape" in data:
        data = {**data, "above_shape": tuple(data["above_shape"])}
    return SyntheticSpec(**data)
