"""LRU, randomized marking, and the two predictor-following baselines."""

import math
import statistics

from predcache.core import INFINITY, PhaseTracker, RequestSequence, simulate
from predcache.offline import belady_schedule
from predcache.baselines import (
    FtpmPolicy,
    MarkerPolicy,
    ftp_policy,
    ftpm_policy,
    lru_policy,
    marker_policy,
)
from predcache.predictors import (
    adversarial_predictor,
    belady_predictor,
    synthetic_next_arrival,
)
from predcache.traces import cycling_trace, uniform_trace, walk_trace, zipf_trace


def seq_of(*tokens):
    return RequestSequence.from_tokens(tokens)


class RecordingMarker(MarkerPolicy):
    def reset(self, seq, k, rng):
        super().reset(seq, k, rng)
        self.evictions = []

    def choose_victim(self, t, page, cache):
        victim = super().choose_victim(t, page, cache)
        self.evictions.append((t, victim, set(self._phases.marked)))
        return victim


class RecordingFtpm(FtpmPolicy):
    def reset(self, seq, k, rng):
        super().reset(seq, k, rng)
        self.evictions = []

    def choose_victim(self, t, page, cache):
        victim = super().choose_victim(t, page, cache)
        self.evictions.append(victim)
        return victim


class TestLru:
    def test_cycling_evictions(self):
        seq = seq_of("a", "b", "c", "a")
        ledger, state = simulate(lru_policy(), seq, 2)
        assert ledger.cost == 4
        assert state.pages == {2, 0}

    def test_fitting_sequence(self):
        seq = zipf_trace(3, 50, seed=2)
        ledger, _ = simulate(lru_policy(), seq, 3)
        assert ledger.cost == seq.num_pages

    def test_single_page(self):
        ledger, _ = simulate(lru_policy(), seq_of(*["a"] * 10), 2)
        assert ledger.cost == 1


class TestMarker:
    def test_no_eviction_when_everything_fits(self):
        seq = uniform_trace(4, 60, seed=3)
        policy = RecordingMarker()
        ledger, _ = simulate(policy, seq, 4, seed=1)
        assert ledger.cost == seq.num_pages
        assert policy.evictions == []

    def test_never_evicts_a_marked_page(self):
        for seed in range(10):
            seq = walk_trace(12, 300, seed=seed)
            policy = RecordingMarker()
            simulate(policy, seq, 5, seed=seed)
            assert policy.evictions
            for _, victim, marked in policy.evictions:
                assert victim not in marked

    def test_end_of_phase_cache_is_the_marked_set(self):
        seq = zipf_trace(14, 400, seed=6)
        k = 5
        policy = marker_policy()
        tracker = PhaseTracker(k)
        snapshots = []

        def watch(t, page, fault, cache):
            snapshots.append(set(cache))

        simulate(policy, seq, k, seed=4, step_callback=watch)
        previous_marked = None
        marked = set()
        boundaries = []
        for t, page in enumerate(seq.requests):
            if tracker.observe(t, page):
                boundaries.append((t, set(marked)))
                marked = set()
            marked.add(page)
        assert boundaries
        for t, phase_marked in boundaries:
            assert snapshots[t - 1] == phase_marked

    def test_cycling_ratio_near_harmonic_bound(self):
        k = 10
        seq = cycling_trace(k + 1, 500)
        opt = belady_schedule(seq, k).opt_cost
        ratios = []
        for trial in range(100):
            ledger, _ = simulate(marker_policy(), seq, k, seed=trial)
            ratios.append(ledger.cost / opt)
        mean = statistics.fmean(ratios)
        harmonic = sum(1 / i for i in range(1, k + 1))
        assert 1 <= mean <= 2 * harmonic


class TestFtp:
    def test_perfect_predictions_reach_the_optimum(self):
        for seed in range(10):
            seq = zipf_trace(16, 300, seed=seed)
            schedule = belady_schedule(seq, 6)
            policy = ftp_policy(belady_predictor(schedule))
            ledger, _ = simulate(policy, seq, 6, seed=seed)
            assert ledger.cost == schedule.opt_cost

    def test_hostile_predictions_fault_nearly_everywhere(self):
        k = 6
        seq = cycling_trace(k + 1, 300)
        policy = ftp_policy(adversarial_predictor(seed=1))
        ledger, _ = simulate(policy, seq, k, seed=1)
        assert ledger.cost >= 0.9 * len(seq)

    def test_prediction_equal_to_cache_falls_back_to_lru(self):
        class EchoPredictor:
            """Predicts exactly the caller's cache, excluding nothing."""

            def reset(self, seq, k):
                pass

            def observe(self, t, page):
                pass

            def query(self, t, caller_cache):
                class P:
                    predicted_cache = frozenset(caller_cache)

                return P

        seq = uniform_trace(9, 200, seed=8)
        ftp_ledger, _ = simulate(ftp_policy(EchoPredictor()), seq, 4, seed=0)
        lru_ledger, _ = simulate(lru_policy(), seq, 4, seed=0)
        assert ftp_ledger.fault_times == lru_ledger.fault_times


class TestFtpm:
    def test_exact_predictions_beat_lru_on_lookahead_case(self):
        seq = seq_of("a", "b", "c", "a")
        nap = synthetic_next_arrival(seq, 0.0, seed=0)
        ledger, state = simulate(ftpm_policy(nap), seq, 2, seed=0)
        assert ledger.cost == 3
        assert state.pages == {0, 2}
        lru_ledger, _ = simulate(lru_policy(), seq, 2, seed=0)
        assert lru_ledger.cost == 4

    def test_unmarked_eviction_order_on_fresh_phase(self):
        seq = seq_of("a", "b", "c", "d", "e", "f")
        nap = synthetic_next_arrival(seq, 0.0, seed=0)
        policy = RecordingFtpm(nap)
        simulate(policy, seq, 3, seed=0)
        assert policy.evictions == [0, 1, 2]

    def test_single_unmarked_page_is_forced(self):
        seq = seq_of("a", "b", "c", "a", "b", "d")
        nap = synthetic_next_arrival(seq, 0.0, seed=0)
        policy = RecordingFtpm(nap)
        simulate(policy, seq, 3, seed=0)
        assert policy.evictions == [2]

    def test_exact_predictions_no_worse_than_marker_on_average(self):
        k = 6
        ftpm_ratios, marker_ratios = [], []
        for seed in range(25):
            seq = walk_trace(20, 400, seed=seed)
            opt = belady_schedule(seq, k).opt_cost
            nap = synthetic_next_arrival(seq, 0.0, seed=seed)
            ledger, _ = simulate(ftpm_policy(nap), seq, k, seed=seed)
            ftpm_ratios.append(ledger.cost / opt)
            ledger, _ = simulate(marker_policy(), seq, k, seed=seed)
            marker_ratios.append(ledger.cost / opt)
        assert statistics.fmean(ftpm_ratios) <= statistics.fmean(marker_ratios)


class TestPhaseCostLowerBound:
    def test_any_policy_pays_for_marked_pages_it_dropped(self):
        k = 5
        for seed, policy_factory in [
            (0, lru_policy),
            (1, marker_policy),
            (2, lambda: ftp_policy(adversarial_predictor(seed=3))),
        ]:
            seq = walk_trace(15, 350, seed=seed)
            snapshots = []

            def watch(t, page, fault, cache):
                snapshots.append(set(cache))

            ledger, _ = simulate(policy_factory(), seq, k, seed=seed, step_callback=watch)
            faults = set(ledger.fault_times)
            tracker = PhaseTracker(k)
            marked = set()
            start = 0
            checked = 0
            for t, page in enumerate(seq.requests):
                if tracker.observe(t, page):
                    cost = sum(1 for u in range(start, t) if u in faults)
                    assert cost >= len(marked - snapshots[t - 1])
                    checked += 1
                    marked = set()
                    start = t
                marked.add(page)
            assert checked > 0
