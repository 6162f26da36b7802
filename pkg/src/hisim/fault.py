"""Streaming normal/not-normal vibration detector and bandwidth arithmetic.

A sensor can separate a healthy bearing from a faulty one with nothing more
than the mean of fixed-size batches of consecutive vibration samples compared
against a threshold; only not-normal batches need to leave the device. The
windowed average here is computed with a running sum so a sensor never has to
store a whole batch.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

NORMAL = "normal"
NOT_NORMAL = "not_normal"

DEFAULT_WINDOW = 4096
DEFAULT_THRESHOLD = 0.07


@dataclass(frozen=True)
class SeriesLabel:
    """Ground-truth machine state for evaluation: 'normal' or a fault."""

    state: str
    fault_kind: Optional[str] = None
    fault_width_mm: Optional[float] = None


@dataclass
class VibrationSeries:
    samples: list
    sample_rate_hz: float
    label: Optional[SeriesLabel] = None

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")


@dataclass(frozen=True)
class DetectorConfig:
    window: int = DEFAULT_WINDOW
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")


def windowed_averages(series: VibrationSeries, config: DetectorConfig) -> list[float]:
    """Mean of each complete non-overlapping window, in order.

    The trailing partial window is dropped. Uses an incremental running sum,
    O(1) memory beyond the output.
    """
    window = config.window
    if len(series.samples) < window:
        raise ValueError(
            f"series has {len(series.samples)} samples, shorter than one window ({window})"
        )
    out: list[float] = []
    acc = 0.0
    count = 0
    for x in series.samples:
        acc += x
        count += 1
        if count == window:
            out.append(acc / window)
            acc = 0.0
            count = 0
    return out


def classify_windows(averages: Iterable[float], config: DetectorConfig) -> list[str]:
    """NORMAL when the window average is below threshold, NOT_NORMAL otherwise."""
    # Boundary value goes to NOT_NORMAL: fail toward offloading a possible fault.
    return [NORMAL if a < config.threshold else NOT_NORMAL for a in averages]


def offload_fraction(decisions: list[str]) -> float:
    """Fraction of windows that would be transmitted (marked NOT_NORMAL)."""
    if not decisions:
        raise ValueError("no window decisions")
    return sum(d == NOT_NORMAL for d in decisions) / len(decisions)


def raw_bandwidth_bps(sensor_count: int, sample_rate_hz: float, bytes_per_sample: int) -> float:
    """Bits per second needed to stream every raw sample from every sensor."""
    if sensor_count <= 0 or sample_rate_hz <= 0 or bytes_per_sample <= 0:
        raise ValueError("sensor_count, sample_rate_hz and bytes_per_sample must be positive")
    return sensor_count * sample_rate_hz * bytes_per_sample * 8


def synthetic_series(
    n_windows: int,
    fault_windows: Iterable[int],
    window: int = DEFAULT_WINDOW,
    normal_mean: float = 0.03,
    fault_mean: float = 0.2,
    noise_sd: float = 0.01,
    sample_rate_hz: float = 48_000.0,
    seed: int = 0,
) -> tuple[VibrationSeries, list[str]]:
    """Two-regime stand-in for a measured vibration series.

    Windows listed in fault_windows draw from N(fault_mean, noise_sd), the
    rest from N(normal_mean, noise_sd). Returns the series and the per-window
    ground truth.
    """
    fault_set = set(fault_windows)
    rng = np.random.default_rng(seed)
    means = np.where(
        np.isin(np.arange(n_windows), list(fault_set)), fault_mean, normal_mean
    )
    data = rng.normal(np.repeat(means, window), noise_sd)
    truth = [NOT_NORMAL if i in fault_set else NORMAL for i in range(n_windows)]
    label = SeriesLabel(state="normal" if not fault_set else "fault")
    series = VibrationSeries(samples=data.tolist(), sample_rate_hz=sample_rate_hz, label=label)
    return series, truth


def read_series_csv(path, sample_rate_hz: float) -> VibrationSeries:
    """One amplitude per line."""
    samples: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                samples.append(float(line))
            except ValueError:
                raise ValueError(f"line {lineno}: not a number: {line!r}") from None
    return VibrationSeries(samples=samples, sample_rate_hz=sample_rate_hz)


def read_series_i16(path, sample_rate_hz: float) -> VibrationSeries:
    """Little-endian signed 16-bit register dump, the raw sensor format."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) % 2 != 0:
        raise ValueError(f"odd byte count {len(raw)} in 16-bit series file")
    values = struct.unpack(f"<{len(raw) // 2}h", raw)
    return VibrationSeries(samples=[float(v) for v in values], sample_rate_hz=sample_rate_hz)
