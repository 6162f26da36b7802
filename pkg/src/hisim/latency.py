"""Per-sample timing, bandwidth-derived transfer-time intervals, makespans.

Defaults come from a Raspberry Pi 4B device and a GPU edge server on the same
WLAN: 0.99 ms per local inference, 74.34 ms per offloaded sample end to end
(transfer plus remote inference), and a measured link of 10.45 MB/s with a
0.6 MB/s standard deviation over 30 runs. Transfer times are reported as the
one-standard-deviation bandwidth band: [size/(mean+sd), size/(mean-sd)].
"""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_T_LOCAL_MS = 0.99
DEFAULT_T_OFFLOAD_MS = 74.34
DEFAULT_BW_MEAN = 10.45
DEFAULT_BW_SD = 0.6
DEFAULT_BW_N = 30

HI_SERIAL = "hi_serial"
PURE_PARTITION_PARALLEL = "pure_partition_parallel"


@dataclass(frozen=True)
class TimingParams:
    t_local_ms: float = DEFAULT_T_LOCAL_MS
    t_offload_ms: float = DEFAULT_T_OFFLOAD_MS

    def __post_init__(self):
        # Zero is allowed so one side can be switched off (e.g. a pure
        # full-offload run with no local pass); negatives are not.
        if self.t_local_ms < 0 or self.t_offload_ms < 0:
            raise ValueError("per-sample times must be non-negative")


@dataclass(frozen=True)
class BandwidthStats:
    mean_mb_per_s: float = DEFAULT_BW_MEAN
    sd_mb_per_s: float = DEFAULT_BW_SD
    n_experiments: int = DEFAULT_BW_N

    def __post_init__(self):
        if not self.mean_mb_per_s > self.sd_mb_per_s >= 0:
            raise ValueError(
                f"need mean > sd >= 0, got mean={self.mean_mb_per_s} sd={self.sd_mb_per_s}"
            )


@dataclass(frozen=True)
class TimeInterval:
    lo_ms: float
    hi_ms: float

    def __post_init__(self):
        if not 0 <= self.lo_ms <= self.hi_ms:
            raise ValueError(f"invalid interval [{self.lo_ms}, {self.hi_ms}]")

    @property
    def midpoint_ms(self) -> float:
        return (self.lo_ms + self.hi_ms) / 2.0

    def shift(self, offset_ms: float) -> "TimeInterval":
        return TimeInterval(self.lo_ms + offset_ms, self.hi_ms + offset_ms)


def comm_interval(size_mb: float, bw: BandwidthStats) -> TimeInterval:
    """Transfer-time band in ms for a payload, at bandwidth mean +- one SD."""
    if size_mb < 0:
        raise ValueError(f"size_mb must be >= 0, got {size_mb}")
    fast = bw.mean_mb_per_s + bw.sd_mb_per_s
    slow = bw.mean_mb_per_s - bw.sd_mb_per_s
    return TimeInterval(size_mb / fast * 1000.0, size_mb / slow * 1000.0)


def makespan(
    n_total: int, n_offloaded: int, timing: TimingParams, mode: str = HI_SERIAL
) -> float:
    """Completion time in ms for a batch of n_total jobs.

    hi_serial: every job runs locally first and offloaded ones additionally
    pay the offload constant (the hierarchical pipeline). For a baseline with
    no local pass, use t_local_ms = 0.
    pure_partition_parallel: device and server work disjoint shares
    concurrently; the batch finishes when the slower side does.
    """
    if not 0 <= n_offloaded <= n_total:
        raise ValueError(f"need 0 <= n_offloaded <= n_total, got {n_offloaded}/{n_total}")
    if mode == HI_SERIAL:
        return n_total * timing.t_local_ms + n_offloaded * timing.t_offload_ms
    if mode == PURE_PARTITION_PARALLEL:
        return max(
            (n_total - n_offloaded) * timing.t_local_ms,
            n_offloaded * timing.t_offload_ms,
        )
    raise ValueError(f"unknown makespan mode: {mode!r}")


def throughput(n_total: int, makespan_ms: float) -> float:
    """Jobs per second over a whole batch."""
    if makespan_ms <= 0:
        raise ValueError(f"makespan must be positive, got {makespan_ms}")
    return n_total / (makespan_ms / 1000.0)


def energy_estimate(n_total: int, n_offloaded: int, e_local_mj: float, e_tx_mj: float) -> float:
    """Millijoules for a batch: every job pays local compute, offloads pay transmit."""
    if e_local_mj < 0 or e_tx_mj < 0:
        raise ValueError("per-sample energies must be >= 0")
    if not 0 <= n_offloaded <= n_total:
        raise ValueError(f"need 0 <= n_offloaded <= n_total, got {n_offloaded}/{n_total}")
    return n_total * e_local_mj + n_offloaded * e_tx_mj


_CONFIG_KEYS = {"t_local_ms", "t_offload_ms", "bw_mean", "bw_sd", "bw_n"}


def load_config(path) -> tuple[TimingParams, BandwidthStats]:
    """Read timing/bandwidth overrides from a flat TOML-style key = value file.

    Keys: t_local_ms, t_offload_ms, bw_mean, bw_sd, bw_n. Missing keys keep
    their defaults; unknown keys are an error. Lines starting with # are
    comments.
    """
    values: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}: line {lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}: line {lineno}: unknown key {key!r}")
            try:
                values[key] = float(val.strip())
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: not a number: {val.strip()!r}") from None
    timing = TimingParams(
        t_local_ms=values.get("t_local_ms", DEFAULT_T_LOCAL_MS),
        t_offload_ms=values.get("t_offload_ms", DEFAULT_T_OFFLOAD_MS),
    )
    bw = BandwidthStats(
        mean_mb_per_s=values.get("bw_mean", DEFAULT_BW_MEAN),
        sd_mb_per_s=values.get("bw_sd", DEFAULT_BW_SD),
        n_experiments=int(values.get("bw_n", DEFAULT_BW_N)),
    )
    return timing, bw
