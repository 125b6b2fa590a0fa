"""Furthest-in-future eviction: schedules, prefix queries, restarts."""

import pytest

from predcache.core import (
    INFINITY,
    NextArrivalIndex,
    PhaseTracker,
    RequestSequence,
    SimulationError,
)
from predcache.offline import (
    BeladyRun,
    FurthestFirstCache,
    belady_prefix_fault,
    belady_restart,
    belady_schedule,
)
from predcache.traces import uniform_trace, walk_trace, zipf_trace

from oracles import optimal_faults


def seq_of(*tokens):
    return RequestSequence.from_tokens(tokens)


class TestBeladySchedule:
    def test_cycling_three_pages(self):
        seq = seq_of("a", "b", "c", "a", "b", "c")
        assert belady_schedule(seq, 2).opt_cost == 4

    def test_fitting_working_set_costs_distinct_count(self):
        seq = uniform_trace(4, 80, seed=0)
        assert belady_schedule(seq, 5).opt_cost == seq.num_pages

    def test_matches_exhaustive_minimum_on_small_instances(self):
        for seed in range(30):
            seq = uniform_trace(5, 24, seed=seed)
            k = 2 + seed % 2
            assert belady_schedule(seq, k).opt_cost == optimal_faults(seq, k)

    def test_never_requested_again_ties_break_to_smallest_id(self):
        schedule = belady_schedule(seq_of("a", "b", "c"), 2)
        assert schedule.evicted_at[2] == 0

    def test_schedule_bookkeeping_is_consistent(self):
        seq = zipf_trace(12, 150, seed=3)
        schedule = belady_schedule(seq, 4)
        assert schedule.opt_cost == sum(schedule.fault_at)
        assert schedule.opt_cost == schedule.faults_in(0, len(seq))
        split = 70
        assert schedule.faults_in(0, split) + schedule.faults_in(split, len(seq)) == schedule.opt_cost
        for t, evicted in enumerate(schedule.evicted_at):
            if evicted is not None:
                assert schedule.fault_at[t]

    def test_eviction_never_precedes_reuse_within_a_phase(self):
        for seed in range(12):
            seq = walk_trace(14, 220, seed=seed)
            k = 4
            schedule = belady_schedule(seq, k)
            index = NextArrivalIndex(seq)
            tracker = PhaseTracker(k)
            phase_of = []
            for t, page in enumerate(seq.requests):
                tracker.observe(t, page)
                phase_of.append(tracker.phase_index)
            for t, evicted in enumerate(schedule.evicted_at):
                if evicted is None:
                    continue
                returns = index.next_after(evicted, t)
                assert returns == INFINITY or phase_of[returns] > phase_of[t]


class TestPrefixFault:
    def test_first_request_always_faults(self):
        assert belady_prefix_fault(seq_of("a", "b"), 1, 0) is True

    def test_cached_page_does_not_fault(self):
        assert belady_prefix_fault(seq_of("a", "b", "a"), 2, 2) is False

    def test_out_of_range_rejected(self):
        seq = seq_of("a", "b")
        with pytest.raises(SimulationError, match="t out of range"):
            belady_prefix_fault(seq, 1, 2)
        with pytest.raises(SimulationError, match="t out of range"):
            belady_prefix_fault(seq, 1, -1)

    def test_equals_full_schedule_everywhere(self):
        for seed in range(6):
            seq = uniform_trace(7, 60, seed=seed)
            schedule = belady_schedule(seq, 3)
            for t in range(len(seq)):
                assert belady_prefix_fault(seq, 3, t) == schedule.fault_at[t]


class TestRestart:
    def test_remaining_requests_already_cached(self):
        seq = seq_of("a", "b", "a", "b")
        ledger = belady_restart(seq, 2, 2, (0, 1))
        assert ledger.cost == 0

    def test_restart_from_the_beginning_is_the_schedule(self):
        seq = zipf_trace(10, 120, seed=5)
        assert belady_restart(seq, 3, 0, ()).cost == belady_schedule(seq, 3).opt_cost

    def test_mid_trace_restarts_are_optimal(self):
        for seed in range(15):
            seq = uniform_trace(5, 30, seed=seed)
            k = 3
            start = 10 + seed % 5
            cache = tuple(sorted(set(seq.requests[:k]))[:k])
            got = belady_restart(seq, k, start, cache).cost
            assert got == optimal_faults(seq, k, start_time=start, initial_cache=cache)

    def test_oversized_initial_cache_rejected(self):
        with pytest.raises(SimulationError, match="initial cache larger than capacity"):
            BeladyRun(seq_of("a", "b"), 1, initial_cache=(0, 1))


class TestStepwiseRun:
    def test_lockstep_run_reproduces_the_schedule(self):
        seq = walk_trace(9, 100, seed=1)
        schedule = belady_schedule(seq, 4)
        run = BeladyRun(seq, 4)
        for t, page in enumerate(seq.requests):
            fault, _ = run.step(t, page)
            assert fault == schedule.fault_at[t]
        assert run.ledger.cost == schedule.opt_cost

    def test_furthest_first_cache_evicts_latest_returner(self):
        seq = seq_of("a", "b", "c", "a", "b")
        index = NextArrivalIndex(seq)
        cache = FurthestFirstCache(2)
        assert cache.request(0, index.next_after(0, 0)) == (True, None)
        assert cache.request(1, index.next_after(1, 1)) == (True, None)
        fault, evicted = cache.request(2, index.next_after(2, 2))
        assert fault and evicted == 1
        assert cache.request(0, index.next_after(0, 3)) == (False, None)
