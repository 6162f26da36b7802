"""Export inference traces from real models over a dataset.

A model is anything that maps a feature matrix (N x D) to per-class scores
(N x C): a Python callable, a "module:attr" reference to one, or a .npy/.npz
file of precomputed scores. Scores are normalized row-wise by their sum into
a pmf (already-normalized outputs pass through unchanged); the exported
confidence is the row maximum and the predicted label its argmax, so the
trace carries exactly what a threshold policy needs.
"""

from __future__ import annotations

from importlib import import_module
from pathlib import Path

import numpy as np

from .formats import MULTICLASS, multiclass_record, write_trace_file


class DatasetError(ValueError):
    """Dataset directory missing or inconsistent."""


class ModelError(ValueError):
    """Model reference unusable or its output malformed."""


def load_dataset(data_dir):
    """Load features.npy (N x D) and labels.npy (N,) from a directory."""
    data_dir = Path(data_dir)
    features_path = data_dir / "features.npy"
    labels_path = data_dir / "labels.npy"
    if not features_path.exists() or not labels_path.exists():
        raise DatasetError(f"{data_dir}: expected features.npy and labels.npy")
    features = np.load(features_path)
    labels = np.load(labels_path)
    if features.ndim < 2:
        raise DatasetError(f"features must be at least 2-D, got shape {features.shape}")
    if labels.ndim != 1 or len(labels) != len(features):
        raise DatasetError(
            f"labels shape {labels.shape} does not match {len(features)} feature rows"
        )
    return features, labels.astype(int)


def resolve_model(ref):
    """Turn a model reference into a callable features -> scores.

    Accepts a callable, a dotted "module:attr" string, or a path to .npy/.npz
    holding precomputed scores (npz: array under the 'scores' key).
    """
    if callable(ref):
        return ref
    ref = str(ref)
    if ref.endswith(".npy") or ref.endswith(".npz"):
        path = Path(ref)
        if not path.exists():
            raise ModelError(f"model file not found: {ref}")
        if ref.endswith(".npy"):
            scores = np.load(path)
        else:
            archive = np.load(path)
            if "scores" not in archive:
                raise ModelError(f"{ref}: .npz model needs a 'scores' array")
            scores = archive["scores"]

        def precomputed(features, _scores=scores):
            if len(_scores) != len(features):
                raise ModelError(
                    f"precomputed scores cover {len(_scores)} samples, dataset has {len(features)}"
                )
            return _scores

        return precomputed
    if ":" in ref:
        module_name, _, attr = ref.partition(":")
        try:
            fn = getattr(import_module(module_name), attr)
        except (ImportError, AttributeError) as exc:
            raise ModelError(f"cannot import model {ref!r}: {exc}") from None
        if not callable(fn):
            raise ModelError(f"{ref!r} is not callable")
        return fn
    raise ModelError(f"model reference {ref!r} is neither callable, module:attr, nor .npy/.npz")


def model_pmf(model, features):
    """Run the model and normalize its scores row-wise into a pmf."""
    scores = np.asarray(model(features), dtype=float)
    if scores.ndim != 2 or len(scores) != len(features):
        raise ModelError(
            f"model output must be (n_samples, n_classes), got shape {scores.shape}"
        )
    if (scores < 0).any():
        raise ModelError("model scores must be non-negative to normalize by their sum")
    sums = scores.sum(axis=1, keepdims=True)
    if (sums == 0).any():
        raise ModelError("model produced an all-zero score row; cannot normalize")
    return scores / sums


def export_trace(
    model_local,
    model_remote,
    dataset,
    out_path,
    format: str = "jsonl",
    metadata: dict | None = None,
) -> None:
    """One trace record per dataset item, in dataset order, ids 0..N-1.

    dataset is (features, labels) or a directory for load_dataset. The remote
    model is optional; without one, remote_label is null (treated downstream
    as an always-correct oracle). Deterministic given model weights and
    dataset order.
    """
    if isinstance(dataset, (str, Path)):
        features, labels = load_dataset(dataset)
    else:
        features, labels = dataset
    local_pmf = model_pmf(resolve_model(model_local), features)
    confidence = local_pmf.max(axis=1)
    local_label = local_pmf.argmax(axis=1)
    if model_remote is not None:
        remote_label = model_pmf(resolve_model(model_remote), features).argmax(axis=1)
    else:
        remote_label = None
    records = [
        multiclass_record(
            i,
            confidence[i],
            local_label[i],
            None if remote_label is None else remote_label[i],
            labels[i],
        )
        for i in range(len(features))
    ]
    write_trace_file(out_path, MULTICLASS, records, metadata=metadata or {}, format=format)
