"""Trace wire formats: JSONL (with a leading header object) and CSV.

This module is the adapter's half of the trace-file contract with the
simulator: one JSON object per sample, keys id / confidence / local_label /
remote_label / true_label for multiclass records and id / confidence /
is_relevant for binary ones, with an optional first-line header object
carrying the kind and free-form metadata. Floats are written with full repr
precision so files are byte-stable and parse back to identical values.
"""

from __future__ import annotations

import csv
import io
import json

MULTICLASS = "multiclass"
BINARY = "binary"

CSV_HEADER_MULTICLASS = ["id", "confidence", "local_label", "remote_label", "true_label"]
CSV_HEADER_BINARY = ["id", "confidence", "is_relevant"]


def multiclass_record(id, confidence, local_label, remote_label, true_label):
    return {
        "id": int(id),
        "confidence": float(confidence),
        "local_label": int(local_label),
        "remote_label": None if remote_label is None else int(remote_label),
        "true_label": int(true_label),
    }


def binary_record(id, confidence, is_relevant):
    return {"id": int(id), "confidence": float(confidence), "is_relevant": bool(is_relevant)}


def write_trace_file(path, kind, records, metadata=None, format="jsonl"):
    """Write records (already in wire shape, ordered) to path."""
    if kind not in (MULTICLASS, BINARY):
        raise ValueError(f"unknown trace kind: {kind!r}")
    if format == "jsonl":
        lines = [json.dumps({"kind": kind, "metadata": dict(sorted((metadata or {}).items()))},
                            sort_keys=True)]
        lines.extend(json.dumps(rec) for rec in records)
        body = "\n".join(lines) + "\n"
    elif format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if kind == MULTICLASS:
            writer.writerow(CSV_HEADER_MULTICLASS)
            for r in records:
                remote = "" if r["remote_label"] is None else r["remote_label"]
                writer.writerow(
                    [r["id"], repr(r["confidence"]), r["local_label"], remote, r["true_label"]]
                )
        else:
            writer.writerow(CSV_HEADER_BINARY)
            for r in records:
                writer.writerow(
                    [r["id"], repr(r["confidence"]), "true" if r["is_relevant"] else "false"]
                )
        body = buf.getvalue()
    else:
        raise ValueError(f"unknown trace format: {format!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(body)


def read_trace_records(path):
    """Read a JSONL trace back as (kind, metadata, records). Convenience for
    the adapter's own tests; the simulator side has the authoritative parser."""
    records = []
    kind = None
    metadata = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "kind" in obj and "id" not in obj:
                kind = obj["kind"]
                metadata = obj.get("metadata", {})
                continue
            records.append(obj)
    if kind is None and records:
        kind = BINARY if "is_relevant" in records[0] else MULTICLASS
    return kind, metadata, records
