"""Trace-driven simulator for hierarchical inference at the network edge."""

from .traces import BinarySample, InferenceSample, Trace, TraceError, parse_trace, write_trace
from .policy import (
    CostParams,
    FilterOutcome,
    HiOutcome,
    KindMismatchError,
    ThetaCell,
    ThresholdPolicy,
    cost_reduction_vs_full_offload,
    decide,
    evaluate_filter,
    evaluate_policy,
    filter_decide,
    filter_full_offload,
    optimal_threshold,
    sample_cost,
    threshold_sweep,
)
from .latency import BandwidthStats, TimeInterval, TimingParams, comm_interval, makespan, throughput
from .schedulers import (
    LayerProfile,
    PartitionPlan,
    SimulationReport,
    compare_all,
    dnn_partition_plan,
    full_offload,
    no_offload,
    oma,
    omd,
)

__version__ = "0.1.0"
