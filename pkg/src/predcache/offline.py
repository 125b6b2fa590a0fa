"""Furthest-in-future eviction: full schedules, prefix checks, restarts.

The same cache engine serves two purposes: fed true next arrivals it is the
offline optimal policy, fed predicted arrivals (see predictors) it converts
next-arrival predictions into cache actions. Ties, which only occur between
never-requested-again pages, break toward the smallest page id.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .core import (
    CostLedger,
    SimulationError,
    build_next_arrival_index,
)


class FurthestFirstCache:
    """Cache evicting the page whose recorded arrival value is largest.

    Arrival values are positions (INFINITY for never again). Entries are
    invalidated lazily in the heap, giving amortized O(log size) requests.
    """

    def __init__(self, k, initial=None):
        self.k = k
        self.cache = set()
        self._arrival = {}
        self._heap = []
        for page, arrival in initial or ():
            self.cache.add(page)
            self._set_arrival(page, arrival)

    def request(self, page, arrival):
        """Serve one request, refreshing the page's arrival value.

        Returns (fault, evicted_page_or_None).
        """
        if page in self.cache:
            self._set_arrival(page, arrival)
            return False, None
        evicted = None
        if len(self.cache) >= self.k:
            evicted = self._pop_furthest()
            self.cache.remove(evicted)
            del self._arrival[evicted]
        self.cache.add(page)
        self._set_arrival(page, arrival)
        return True, evicted

    def _set_arrival(self, page, arrival):
        self._arrival[page] = arrival
        heapq.heappush(self._heap, (-arrival, page))

    def _pop_furthest(self):
        while True:
            neg, page = heapq.heappop(self._heap)
            if page in self.cache and self._arrival.get(page) == -neg:
                return page


class BeladyRun:
    """Incremental furthest-in-future run, restartable mid-trace."""

    def __init__(self, seq, k, index=None, start_time=0, initial_cache=()):
        initial_cache = list(initial_cache)
        if len(initial_cache) > k:
            raise SimulationError("initial cache larger than capacity")
        self.seq = seq
        self.index = index if index is not None else build_next_arrival_index(seq)
        init = [
            (page, self.index.next_at_or_after(page, start_time))
            for page in initial_cache
        ]
        self.ff = FurthestFirstCache(k, init)
        self.ledger = CostLedger()

    def step(self, t, page):
        """Serve the request at time t; returns (fault, evicted_page_or_None)."""
        fault, evicted = self.ff.request(page, self.index.next_after(page, t))
        if fault:
            self.ledger.record(t)
        return fault, evicted

    @property
    def cache(self):
        return self.ff.cache


@dataclass
class BeladySchedule:
    """Per-step fault flags and evictions of the full furthest-in-future run.

    prefix_faults[t] counts faults strictly before t, so faults over a
    half-open window [s, e) are prefix_faults[e] - prefix_faults[s].
    """

    k: int
    fault_at: list
    evicted_at: list
    prefix_faults: list

    @property
    def opt_cost(self):
        return self.prefix_faults[-1]

    def faults_in(self, start, end):
        return self.prefix_faults[end] - self.prefix_faults[start]


def belady_schedule(seq, k, index=None):
    """The full-sequence furthest-in-future schedule and its cost."""
    run = BeladyRun(seq, k, index)
    fault_at = []
    evicted_at = []
    prefix = [0]
    for t, page in enumerate(seq.requests):
        fault, evicted = run.step(t, page)
        fault_at.append(fault)
        evicted_at.append(evicted)
        prefix.append(prefix[-1] + fault)
    return BeladySchedule(k, fault_at, evicted_at, prefix)


def belady_prefix_fault(seq, k, t):
    """Whether a fresh furthest-in-future run on requests[0..t] faults at t.

    t is a 0-based position. Running on the prefix alone gives the same
    answer as the full schedule's fault_at[t], which makes per-step
    recomputation unnecessary elsewhere; this function performs the honest
    prefix-only run.
    """
    if not 0 <= t < len(seq):
        raise SimulationError("t out of range")
    run = BeladyRun(seq.prefix(t + 1), k)
    fault = False
    for u in range(t + 1):
        fault, _ = run.step(u, seq.requests[u])
    return fault


def belady_restart(seq, k, start_time, initial_cache, index=None):
    """Fault ledger of a furthest-in-future run resumed mid-trace.

    The run begins at start_time holding initial_cache and serves the rest
    of the sequence.
    """
    run = BeladyRun(seq, k, index, start_time, initial_cache)
    for t in range(start_time, len(seq)):
        run.step(t, seq.requests[t])
    return run.ledger
