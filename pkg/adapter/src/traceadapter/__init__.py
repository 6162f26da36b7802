"""Bridge from the ML ecosystem into the hierarchical-inference simulator:
exports real-model inference traces and generates parameterized synthetic
traces in the simulator's wire formats."""

from .export import DatasetError, ModelError, export_trace, load_dataset, model_pmf, resolve_model
from .synth import SpecError, SyntheticSpec, generate_synthetic, spec_from_dict

__version__ = "0.1.0"
