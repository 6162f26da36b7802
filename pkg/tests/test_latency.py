import numpy as np
import pytest

from hisim.latency import (
    HI_SERIAL,
    PURE_PARTITION_PARALLEL,
    BandwidthStats,
    TimeInterval,
    TimingParams,
    comm_interval,
    energy_estimate,
    load_config,
    makespan,
    throughput,
)

# Measured transfer table for the profiled network: payload MB -> [lo, hi] ms.
MEASURED_TRANSFERS = [
    (0.003, 0.28, 0.30),
    (3.06, 276.92, 310.65),
    (1.64, 148.41, 166.49),
    (1.13, 102.26, 114.72),
    (0.97, 87.78, 98.47),
    (1.56, 141.17, 158.37),
    (1.98, 179.18, 201.0),
    (0.53, 47.96, 53.80),
]


class TestCommInterval:
    @pytest.mark.parametrize("size_mb,lo,hi", MEASURED_TRANSFERS)
    def test_reproduces_measured_table(self, size_mb, lo, hi):
        iv = comm_interval(size_mb, BandwidthStats())
        assert iv.lo_ms == pytest.approx(lo, abs=0.02)
        assert iv.hi_ms == pytest.approx(hi, abs=0.02)

    def test_zero_size(self):
        iv = comm_interval(0.0, BandwidthStats())
        assert (iv.lo_ms, iv.hi_ms) == (0.0, 0.0)

    def test_homogeneous_in_size(self):
        bw = BandwidthStats()
        a = comm_interval(1.7, bw)
        b = comm_interval(3.4, bw)
        assert b.lo_ms == pytest.approx(2 * a.lo_ms, rel=1e-12)
        assert b.hi_ms == pytest.approx(2 * a.hi_ms, rel=1e-12)

    def test_degenerate_bandwidth_rejected(self):
        with pytest.raises(ValueError):
            BandwidthStats(mean_mb_per_s=0.5, sd_mb_per_s=0.6)

    def test_negative_size_rejected(self):
        with pytest.raises(ValueError):
            comm_interval(-1.0, BandwidthStats())


class TestMakespan:
    def test_local_only(self):
        assert makespan(10_000, 0, TimingParams(), HI_SERIAL) == 9900.0

    def test_pure_full_offload(self):
        # No local pass: zero out the local time.
        timing = TimingParams(t_local_ms=0.0, t_offload_ms=74.34)
        assert makespan(10_000, 10_000, timing, HI_SERIAL) == pytest.approx(743_400.0)

    def test_hi_pipeline(self):
        got = makespan(10_000, 3550, TimingParams(), HI_SERIAL)
        assert got == pytest.approx(9900 + 3550 * 74.34)

    def test_parallel_takes_slower_side(self):
        timing = TimingParams(t_local_ms=1.0, t_offload_ms=10.0)
        assert makespan(100, 20, timing, PURE_PARTITION_PARALLEL) == 200.0
        assert makespan(100, 5, timing, PURE_PARTITION_PARALLEL) == 95.0

    def test_serial_affine_in_offload_count(self):
        timing = TimingParams()
        spans = [makespan(1000, n, timing, HI_SERIAL) for n in range(0, 1001, 100)]
        diffs = np.diff(spans)
        assert np.allclose(diffs, 100 * timing.t_offload_ms)

    def test_parallel_balance_point_matches_exhaustive(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            timing = TimingParams(
                t_local_ms=float(rng.uniform(0.1, 5)), t_offload_ms=float(rng.uniform(0.1, 100))
            )
            n_total = int(rng.integers(1, 10_001))
            spans = np.array(
                [makespan(n_total, n, timing, PURE_PARTITION_PARALLEL) for n in range(n_total + 1)]
            )
            best = spans.min()
            balance = n_total * timing.t_local_ms / (timing.t_local_ms + timing.t_offload_ms)
            near = {int(np.floor(balance)), int(np.ceil(balance))}
            assert min(
                makespan(n_total, n, timing, PURE_PARTITION_PARALLEL) for n in near
            ) == pytest.approx(best)

    def test_invalid_counts_rejected(self):
        with pytest.raises(ValueError):
            makespan(10, 11, TimingParams())

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError, match="mode"):
            makespan(10, 1, TimingParams(), "warp")


class TestThroughput:
    def test_local_only_rate(self):
        assert throughput(10_000, 9900.0) == pytest.approx(1010.101, abs=1e-3)

    def test_full_offload_rate(self):
        assert throughput(10_000, 743_400.0) == pytest.approx(13.4517, abs=1e-3)

    def test_single_job(self):
        assert throughput(1, 1000.0) == 1.0

    def test_nonpositive_makespan_rejected(self):
        with pytest.raises(ValueError):
            throughput(10, 0.0)


class TestEnergy:
    def test_no_offload(self):
        assert energy_estimate(100, 0, 2.5, 10.0) == 250.0

    def test_transmit_only(self):
        assert energy_estimate(100, 100, 0.0, 10.0) == 1000.0

    def test_mixed(self):
        assert energy_estimate(10, 4, 1.0, 10.0) == 50.0


class TestInterval:
    def test_invariant(self):
        with pytest.raises(ValueError):
            TimeInterval(5.0, 4.0)
        with pytest.raises(ValueError):
            TimeInterval(-1.0, 4.0)

    def test_midpoint_and_shift(self):
        iv = TimeInterval(2.0, 4.0).shift(1.0)
        assert (iv.lo_ms, iv.hi_ms, iv.midpoint_ms) == (3.0, 5.0, 4.0)


class TestConfigFile:
    def test_load_overrides_and_defaults(self, tmp_path):
        p = tmp_path / "lab.toml"
        p.write_text(
            "# bench overrides\nt_local_ms = 2.5\nbw_mean = 12.0  # MB/s\nbw_sd = 1.0\n",
            encoding="utf-8",
        )
        timing, bw = load_config(p)
        assert timing.t_local_ms == 2.5
        assert timing.t_offload_ms == 74.34
        assert bw.mean_mb_per_s == 12.0
        assert bw.sd_mb_per_s == 1.0
        assert bw.n_experiments == 30

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "lab.toml"
        p.write_text("warp_factor = 9\n", encoding="utf-8")
        with pytest.raises(ValueError, match="unknown key"):
            load_config(p)

    def test_bad_value_rejected(self, tmp_path):
        p = tmp_path / "lab.toml"
        p.write_text("t_local_ms = fast\n", encoding="utf-8")
        with pytest.raises(ValueError, match="not a number"):
            load_config(p)
