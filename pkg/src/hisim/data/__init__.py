"""Bundled fixture traces and the profiled-network layer table.

cifar10_trace.jsonl  10,000-sample multiclass trace matching the reference
                     aggregate counts of the 5-layer on-device CNN (62.58%
                     accurate) and the EfficientNet server model (95%).
dog_trace.jsonl      10,000-sample binary relevance trace (1,000 relevant)
                     matching the reference filter confusion counts.
efficientnet_layers.csv  per-layer device/server times and output sizes.
"""

from importlib import resources

CIFAR_TRACE = "cifar10_trace.jsonl"
DOG_TRACE = "dog_trace.jsonl"
LAYER_PROFILE = "efficientnet_layers.csv"


def fixture_path(name: str):
    """Filesystem path of a bundled data file."""
    return resources.files(__package__).joinpath(name)
