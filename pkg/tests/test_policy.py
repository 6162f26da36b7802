import numpy as np
import pytest

from hisim.policy import (
    ACCEPT,
    DISCARD,
    OFFLOAD,
    CostParams,
    HiOutcome,
    KindMismatchError,
    ThresholdPolicy,
    candidate_thetas,
    cost_reduction_vs_full_offload,
    decide,
    evaluate_filter,
    evaluate_policy,
    filter_decide,
    filter_full_offload,
    optimal_threshold,
    sample_cost,
)
from hisim.traces import BinarySample, InferenceSample, Trace


def mk_sample(i, conf, local_ok=True, remote_ok=True, oracle_remote=False):
    true = 3
    local = true if local_ok else 4
    remote = None if oracle_remote else (true if remote_ok else 5)
    return InferenceSample(id=i, confidence=conf, local_label=local, true_label=true, remote_label=remote)


def mk_trace(samples):
    return Trace(samples=tuple(samples), kind="multiclass")


def random_trace(rng, n=None, allow_ties=True):
    """Random multiclass trace; mixes continuous confidences with exact
    boundary values (0, 0.5, 1.0) to exercise ties and edge partitions."""
    n = n or int(rng.integers(1, 13))
    samples = []
    for i in range(n):
        if allow_ties and rng.random() < 0.4:
            conf = float(rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]))
        else:
            conf = float(rng.random())
        samples.append(
            mk_sample(
                i,
                conf,
                local_ok=bool(rng.random() < 0.6),
                remote_ok=bool(rng.random() < 0.9),
                oracle_remote=bool(rng.random() < 0.15),
            )
        )
    return mk_trace(samples)


def brute_force_best_cost(trace, beta):
    """Independent oracle: enumerate every offload set a threshold in [0, 1)
    can select ({p < t}) and price each by direct per-sample arithmetic."""
    confs = sorted({s.confidence for s in trace.samples})
    cuts = [0.0] + confs
    if confs[-1] < 1.0:
        cuts.append((confs[-1] + 1.0) / 2.0)
    best = float("inf")
    for cut in cuts:
        cost = 0.0
        for s in trace.samples:
            if s.confidence < cut:
                cost += beta + (0.0 if s.remote_correct else 1.0)
            else:
                cost += 0.0 if s.local_correct else 1.0
        best = min(best, cost)
    return best


class TestDecide:
    def test_low_confidence_offloads(self):
        assert decide(mk_sample(0, 0.3), ThresholdPolicy(0.607)) == OFFLOAD

    def test_boundary_equality_accepts(self):
        assert decide(mk_sample(0, 0.607), ThresholdPolicy(0.607)) == ACCEPT

    def test_theta_zero_accepts_everything(self):
        for conf in (0.0, 0.3, 1.0):
            assert decide(mk_sample(0, conf), ThresholdPolicy(0.0)) == ACCEPT

    def test_theta_range_validated(self):
        with pytest.raises(ValueError):
            ThresholdPolicy(1.0)
        with pytest.raises(ValueError):
            ThresholdPolicy(-0.1)

    def test_beta_range_validated(self):
        with pytest.raises(ValueError):
            CostParams(1.0)
        with pytest.raises(ValueError):
            CostParams(-0.01)


class TestSampleCost:
    def test_offloaded_remote_correct(self):
        s = mk_sample(0, 0.1, local_ok=False, remote_ok=True)
        assert sample_cost(s, ThresholdPolicy(0.5), CostParams(0.5)) == 0.5

    def test_accepted_local_wrong(self):
        s = mk_sample(0, 0.9, local_ok=False)
        assert sample_cost(s, ThresholdPolicy(0.5), CostParams(0.5)) == 1.0

    def test_offloaded_remote_wrong(self):
        s = mk_sample(0, 0.1, local_ok=True, remote_ok=False)
        assert sample_cost(s, ThresholdPolicy(0.5), CostParams(0.5)) == 1.5

    def test_oracle_remote_never_errs(self):
        s = mk_sample(0, 0.1, local_ok=False, oracle_remote=True)
        assert sample_cost(s, ThresholdPolicy(0.5), CostParams(0.25)) == 0.25


class TestEvaluatePolicy:
    def test_fixture_at_reference_threshold(self, cifar_trace):
        out = evaluate_policy(cifar_trace, ThresholdPolicy(0.607), CostParams(0.5))
        assert out.offloaded_count == 3550
        assert out.local_errors == 1577
        assert out.remote_errors == 71
        assert out.cost_beta_coefficient == 3550
        assert out.cost_constant == 1648
        assert out.accuracy == 1 - 1648 / 10_000
        assert out.total_cost(0.5) == 3550 * 0.5 + 1648

    def test_fixture_theta_zero_is_local_only(self, cifar_trace):
        out = evaluate_policy(cifar_trace, ThresholdPolicy(0.0), CostParams(0.5))
        assert out.offloaded_count == 0
        assert out.cost_constant == 3742
        assert out.accuracy == 0.6258

    def test_fixture_theta_near_one_is_full_offload(self, cifar_trace):
        out = evaluate_policy(cifar_trace, ThresholdPolicy(0.9999999), CostParams(0.5))
        assert out.offloaded_count == 10_000
        assert out.cost_constant == 500
        assert out.accuracy == 0.95

    def test_binary_trace_rejected(self, dog_trace):
        with pytest.raises(KindMismatchError):
            evaluate_policy(dog_trace, ThresholdPolicy(0.5), CostParams(0.5))

    def test_decomposition_invariant(self, cifar_trace):
        rng = np.random.default_rng(3)
        conf = [s.confidence for s in cifar_trace.samples]
        for _ in range(20):
            theta = float(rng.choice(conf))
            beta = float(rng.random() * 0.99)
            out = evaluate_policy(cifar_trace, ThresholdPolicy(theta), CostParams(beta))
            direct = sum(
                sample_cost(s, ThresholdPolicy(theta), CostParams(beta))
                for s in cifar_trace.samples
            )
            assert out.total_cost(beta) == pytest.approx(direct, abs=1e-9)
            assert out.total_cost(beta) == out.offloaded_count * beta + out.local_errors + out.remote_errors

    def test_monotonicity_in_theta(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            trace = random_trace(rng, n=int(rng.integers(1, 30)))
            t1, t2 = sorted(rng.random(2))
            o1 = evaluate_policy(trace, ThresholdPolicy(float(t1)), CostParams(0.5))
            o2 = evaluate_policy(trace, ThresholdPolicy(float(t2)), CostParams(0.5))
            assert o2.offloaded_count >= o1.offloaded_count


class TestOptimalThreshold:
    def test_perfect_local_model(self):
        trace = mk_trace([mk_sample(i, 1.0, local_ok=True) for i in range(5)])
        policy, cost = optimal_threshold(trace, CostParams(0.5))
        assert policy.theta == 0.0
        assert cost == 0.0

    def test_two_sample_hand_enumeration(self):
        # All four accept/offload assignments priced by hand: offloading only
        # the weak sample wins at cost beta = 0.5.
        trace = mk_trace(
            [mk_sample(0, 0.9, local_ok=True), mk_sample(1, 0.1, local_ok=False, remote_ok=True)]
        )
        policy, cost = optimal_threshold(trace, CostParams(0.5))
        assert 0.1 < policy.theta <= 0.9
        assert cost == 0.5

    def test_fixture_threshold_near_reference_value(self, cifar_trace):
        policy, cost = optimal_threshold(cifar_trace, CostParams(0.5))
        cands = candidate_thetas([s.confidence for s in cifar_trace.samples])
        gap = float(np.diff(cands).max())
        assert abs(policy.theta - 0.607) <= gap
        assert cost == 3550 * 0.5 + 1648

    def test_matches_exhaustive_partition_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            trace = random_trace(rng)
            beta = float(rng.random() * 0.99)
            _, cost = optimal_threshold(trace, CostParams(beta))
            assert cost == pytest.approx(brute_force_best_cost(trace, beta), abs=1e-9)

    def test_tie_breaks_toward_smallest_theta(self):
        # Both splits cost 1.0; the all-accept policy (theta 0) must win.
        trace = mk_trace([mk_sample(0, 0.4, local_ok=False, remote_ok=False)])
        policy, cost = optimal_threshold(trace, CostParams(0.0))
        assert policy.theta == 0.0
        assert cost == 1.0

    def test_empty_trace_rejected(self):
        trace = Trace(samples=(), kind="multiclass")
        with pytest.raises(ValueError):
            optimal_threshold(trace, CostParams(0.5))

    def test_candidates_cover_all_offload(self):
        cands = candidate_thetas([0.2, 0.6])
        # 0, the two confidences, their midpoint, and one value above the max
        assert list(cands) == [0.0, 0.2, 0.4, 0.6, 0.8]

    def test_candidates_exclude_one(self):
        cands = candidate_thetas([0.2, 1.0])
        assert 1.0 not in cands
        assert cands.max() < 1.0


class TestCostReduction:
    def test_fixture_closed_form_at_half(self, cifar_trace):
        policy = ThresholdPolicy(0.607)
        out = evaluate_policy(cifar_trace, policy, CostParams(0.5))
        got = cost_reduction_vs_full_offload(out, 10_000, 500, 0.5)
        expected = (6450 * 0.5 - 1148) / (10_000 * 0.5 + 500) * 100
        assert got == pytest.approx(expected, abs=1e-9)

    def test_equal_costs_give_zero(self):
        out = HiOutcome(n_samples=100, offloaded_count=100, local_errors=0, remote_errors=5)
        assert cost_reduction_vs_full_offload(out, 100, 5, 0.5) == 0.0

    def test_beta_one_boundary_value(self, cifar_trace):
        # beta = 1 is outside the policy's own range but useful for sweep
        # endpoints; the closed form gives about 50.5%.
        out = evaluate_policy(cifar_trace, ThresholdPolicy(0.607), CostParams(0.5))
        got = cost_reduction_vs_full_offload(out, 10_000, 500, 1.0)
        assert got == pytest.approx((6450 - 1148) / 10_500 * 100, abs=1e-9)

    def test_zero_full_cost_rejected(self):
        out = HiOutcome(n_samples=1, offloaded_count=0, local_errors=0, remote_errors=0)
        with pytest.raises(ZeroDivisionError):
            cost_reduction_vs_full_offload(out, 1, 0, 0.0)


class TestFilter:
    def test_boundary_offloads(self):
        assert filter_decide(BinarySample(id=0, confidence=0.5, is_relevant=True)) == OFFLOAD

    def test_below_boundary_discards(self):
        assert filter_decide(BinarySample(id=0, confidence=0.49, is_relevant=True)) == DISCARD

    def test_certain_positive_offloads(self):
        assert filter_decide(BinarySample(id=0, confidence=1.0, is_relevant=False)) == OFFLOAD

    def test_dog_fixture(self, dog_trace):
        out = evaluate_filter(dog_trace, CostParams(0.5))
        assert out.offloaded_count == 4433
        assert out.true_positives == 912
        assert out.false_positives == 3521
        assert out.false_negatives == 88
        assert out.accuracy == 0.912
        assert out.total_cost(0.5) == 912 * 0.5 + 3521

    def test_full_offload_on_dog_fixture(self, dog_trace):
        out = filter_full_offload(dog_trace)
        assert out.cost_beta_coefficient == 1000
        assert out.cost_constant == 9000
        assert out.accuracy == 1.0

    def test_all_irrelevant_vacuous_recall(self):
        trace = Trace(
            samples=tuple(BinarySample(id=i, confidence=0.1 * i % 0.5, is_relevant=False) for i in range(4)),
            kind="binary",
        )
        out = evaluate_filter(trace, CostParams(0.5))
        assert out.total_cost(0.5) == 0.0
        assert out.accuracy == 1.0
        assert out.zero_relevant

    def test_multiclass_trace_rejected(self, cifar_trace):
        with pytest.raises(KindMismatchError):
            evaluate_filter(cifar_trace, CostParams(0.5))

    def test_accuracy_ignores_irrelevant_rescoring(self, dog_trace):
        base = evaluate_filter(dog_trace, CostParams(0.5))
        rescored = Trace(
            samples=tuple(
                s if s.is_relevant else BinarySample(id=s.id, confidence=0.9, is_relevant=False)
                for s in dog_trace.samples
            ),
            kind="binary",
        )
        out = evaluate_filter(rescored, CostParams(0.5))
        assert out.accuracy == base.accuracy
        assert out.false_positives != base.false_positives  # cost moved, recall did not
