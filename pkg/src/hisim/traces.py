"""Canonical trace data model and JSONL/CSV readers and writers.

A trace is the per-sample record of what the on-device model and the server
model would have said about each input, which lets every policy in this
package run without touching an actual model. Two record shapes exist:
multiclass (confidence + predicted/true labels) and binary relevance
(confidence + ground-truth relevance flag).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional, Union

MULTICLASS = "multiclass"
BINARY = "binary"

CSV_HEADER_MULTICLASS = ["id", "confidence", "local_label", "remote_label", "true_label"]
CSV_HEADER_BINARY = ["id", "confidence", "is_relevant"]


class TraceError(ValueError):
    """Malformed trace file or record; carries a 1-based line number when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.base_message = message
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _as_int(value, what: str) -> int:
    # Strict: rejects fractional floats rather than truncating.
    if isinstance(value, bool):
        raise TraceError(f"{what} must be an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if value.is_integer():
            return int(value)
        raise TraceError(f"{what} must be an integer, got {value!r}")
    try:
        return int(str(value).strip())
    except ValueError:
        raise TraceError(f"{what} must be an integer, got {value!r}") from None


def _as_float(value, what: str) -> float:
    if isinstance(value, bool):
        raise TraceError(f"{what} must be a number, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise TraceError(f"{what} must be a number, got {value!r}") from None


@dataclass(frozen=True)
class InferenceSample:
    """One multiclass item: local top-1 confidence, predictions, ground truth.

    `remote_label` of None means the remote model is treated as an oracle
    (always correct), which some workloads assume for the server side.
    """

    id: int
    confidence: float
    local_label: int
    true_label: int
    remote_label: Optional[int] = None

    def __post_init__(self):
        if self.id < 0:
            raise TraceError(f"id must be non-negative, got {self.id}")
        if not 0.0 <= self.confidence <= 1.0:
            raise TraceError(f"confidence out of range [0, 1]: {self.confidence}")

    @property
    def local_correct(self) -> bool:
        return self.local_label == self.true_label

    @property
    def remote_correct(self) -> bool:
        # Oracle remote is always right.
        return self.remote_label is None or self.remote_label == self.true_label


@dataclass(frozen=True)
class BinarySample:
    """One binary-relevance item: probability of the positive class + truth."""

    id: int
    confidence: float
    is_relevant: bool

    def __post_init__(self):
        if self.id < 0:
            raise TraceError(f"id must be non-negative, got {self.id}")
        if not 0.0 <= self.confidence <= 1.0:
            raise TraceError(f"confidence out of range [0, 1]: {self.confidence}")


Sample = Union[InferenceSample, BinarySample]


@dataclass(frozen=True)
class Trace:
    """Ordered, immutable collection of samples of one kind.

    Immutable after construction, so a single Trace can be shared across
    concurrent evaluations.
    """

    samples: tuple
    kind: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in (MULTICLASS, BINARY):
            raise TraceError(f"unknown trace kind: {self.kind!r}")
        expected = InferenceSample if self.kind == MULTICLASS else BinarySample
        seen: set[int] = set()
        for s in self.samples:
            if not isinstance(s, expected):
                raise TraceError(f"sample {s!r} does not match trace kind {self.kind!r}")
            if s.id in seen:
                raise TraceError(f"duplicate id {s.id}")
            seen.add(s.id)
        object.__setattr__(self, "samples", tuple(self.samples))

    def __len__(self) -> int:
        return len(self.samples)


def _sample_from_dict(rec: dict, line: int) -> Sample:
    if not isinstance(rec, dict):
        raise TraceError("record is not an object", line)
    try:
        if "is_relevant" in rec:
            flag = rec["is_relevant"]
            if not isinstance(flag, bool):
                raise TraceError(f"is_relevant must be a boolean, got {flag!r}")
            return BinarySample(
                id=_as_int(rec["id"], "id"),
                confidence=_as_float(rec["confidence"], "confidence"),
                is_relevant=flag,
            )
        remote = rec.get("remote_label")
        return InferenceSample(
            id=_as_int(rec["id"], "id"),
            confidence=_as_float(rec["confidence"], "confidence"),
            local_label=_as_int(rec["local_label"], "local_label"),
            true_label=_as_int(rec["true_label"], "true_label"),
            remote_label=None if remote is None else _as_int(remote, "remote_label"),
        )
    except TraceError as exc:
        raise TraceError(exc.base_message, line) from None
    except KeyError as exc:
        raise TraceError(f"missing field {exc.args[0]!r}", line) from None


def _parse_jsonl(text: str) -> Trace:
    samples: list[Sample] = []
    kind: Optional[str] = None
    metadata: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            rec = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise TraceError(f"invalid JSON: {exc.msg}", lineno) from None
        if isinstance(rec, dict) and "kind" in rec and "id" not in rec:
            # Optional header object carrying kind + metadata.
            if samples or kind is not None:
                raise TraceError("header object must be the first line", lineno)
            kind = rec["kind"]
            if kind not in (MULTICLASS, BINARY):
                raise TraceError(f"unknown trace kind: {kind!r}", lineno)
            metadata = dict(rec.get("metadata", {}))
            continue
        samples.append(_sample_from_dict(rec, lineno))
    if not samples:
        raise TraceError("empty trace file")
    if kind is None:
        kind = BINARY if isinstance(samples[0], BinarySample) else MULTICLASS
    return _build_trace(samples, kind, metadata)


def _parse_csv(text: str) -> Trace:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise TraceError("empty trace file") from None
    if header == CSV_HEADER_MULTICLASS:
        kind = MULTICLASS
    elif header == CSV_HEADER_BINARY:
        kind = BINARY
    else:
        raise TraceError(f"unrecognized CSV header: {header}", 1)
    samples: list[Sample] = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise TraceError(f"expected {len(header)} fields, got {len(row)}", lineno)
        if kind == MULTICLASS:
            rec = {
                "id": row[0],
                "confidence": row[1],
                "local_label": row[2],
                "remote_label": row[3] if row[3] != "" else None,
                "true_label": row[4],
            }
        else:
            if row[2] not in ("true", "false"):
                raise TraceError(f"is_relevant must be true/false, got {row[2]!r}", lineno)
            rec = {"id": row[0], "confidence": row[1], "is_relevant": row[2] == "true"}
        samples.append(_sample_from_dict(rec, lineno))
    if not samples:
        raise TraceError("empty trace file")
    return _build_trace(samples, kind, {})


def _build_trace(samples: list, kind: str, metadata: dict) -> Trace:
    try:
        return Trace(samples=tuple(samples), kind=kind, metadata=metadata)
    except TraceError:
        raise
    except ValueError as exc:
        raise TraceError(str(exc)) from None


def parse_trace(path, format: str = "jsonl") -> Trace:
    """Parse a trace file, validating every record; ordering is preserved.

    Rejects out-of-range confidences, duplicate ids, malformed records
    (with the offending line number) and empty files. Never clamps values.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if format == "jsonl":
        return _parse_jsonl(text)
    if format == "csv":
        return _parse_csv(text)
    raise TraceError(f"unknown trace format: {format!r}")


def _jsonl_lines(trace: Trace):
    header = {"kind": trace.kind, "metadata": dict(sorted(trace.metadata.items()))}
    yield json.dumps(header, sort_keys=True)
    for s in trace.samples:
        if trace.kind == MULTICLASS:
            rec = {
                "id": s.id,
                "confidence": s.confidence,
                "local_label": s.local_label,
                "remote_label": s.remote_label,
                "true_label": s.true_label,
            }
        else:
            rec = {"id": s.id, "confidence": s.confidence, "is_relevant": s.is_relevant}
        yield json.dumps(rec)


def write_trace(trace: Trace, path, format: str = "jsonl") -> None:
    """Write a trace so that parse_trace(write_trace(t)) == t, byte-stably.

    JSONL carries kind + metadata in a leading header object. CSV uses the
    fixed per-kind header and carries no metadata (convenience format only).
    Floats are written with full repr precision.
    """
    if format == "jsonl":
        body = "\n".join(_jsonl_lines(trace)) + "\n"
    elif format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if trace.kind == MULTICLASS:
            writer.writerow(CSV_HEADER_MULTICLASS)
            for s in trace.samples:
                remote = "" if s.remote_label is None else s.remote_label
                writer.writerow([s.id, repr(s.confidence), s.local_label, remote, s.true_label])
        else:
            writer.writerow(CSV_HEADER_BINARY)
            for s in trace.samples:
                writer.writerow([s.id, repr(s.confidence), "true" if s.is_relevant else "false"])
        body = buf.getvalue()
    else:
        raise TraceError(f"unknown trace format: {format!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(body)
