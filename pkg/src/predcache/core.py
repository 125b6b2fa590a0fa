"""Shared simulation primitives for prediction-augmented caching.

Pages are dense integer ids produced by a first-seen remapping of raw trace
tokens. Time is 0-indexed. Every miss costs one unit, cold-start loads
included. INFINITY is an integer sentinel that sorts above any position.
"""

from __future__ import annotations

import random
from bisect import bisect_left, bisect_right
from collections import OrderedDict
from dataclasses import dataclass, field

INFINITY = 2**62


class SimulationError(Exception):
    """Raised when a simulation is driven with invalid inputs or actions."""


@dataclass(frozen=True)
class RequestSequence:
    """A page request trace over a dense integer page universe."""

    requests: tuple
    num_pages: int

    @classmethod
    def from_tokens(cls, tokens):
        """Build a sequence from raw tokens, numbering pages by first appearance."""
        ids = {}
        requests = []
        for tok in tokens:
            page = ids.get(tok)
            if page is None:
                page = ids[tok] = len(ids)
            requests.append(page)
        return cls(tuple(requests), len(ids))

    def prefix(self, length):
        """The sequence truncated to its first `length` requests."""
        return RequestSequence(self.requests[:length], self.num_pages)

    def __len__(self):
        return len(self.requests)


class NextArrivalIndex:
    """Occurrence positions per page with next-arrival lookups.

    next_pos[t] is the next position of the page requested at t, strictly
    after t, or INFINITY if it is never requested again.
    """

    def __init__(self, seq):
        if len(seq) == 0:
            raise SimulationError("empty trace")
        occurrences = [[] for _ in range(seq.num_pages)]
        for t, page in enumerate(seq.requests):
            occurrences[page].append(t)
        self.occurrences = occurrences
        next_pos = [INFINITY] * len(seq)
        last_seen = [INFINITY] * seq.num_pages
        for t in range(len(seq) - 1, -1, -1):
            page = seq.requests[t]
            next_pos[t] = last_seen[page]
            last_seen[page] = t
        self.next_pos = next_pos

    def next_after(self, page, t):
        """First position of page strictly after t, else INFINITY."""
        occ = self.occurrences[page]
        i = bisect_right(occ, t)
        return occ[i] if i < len(occ) else INFINITY

    def next_at_or_after(self, page, t):
        """First position of page at or after t, else INFINITY."""
        occ = self.occurrences[page]
        i = bisect_left(occ, t)
        return occ[i] if i < len(occ) else INFINITY


def build_next_arrival_index(seq):
    """One-backward-pass construction of the next-arrival index."""
    return NextArrivalIndex(seq)


@dataclass
class CostLedger:
    """Fault times of one run, countable over half-open time windows."""

    fault_times: list = field(default_factory=list)

    @property
    def cost(self):
        return len(self.fault_times)

    def record(self, t):
        self.fault_times.append(t)

    def faults_in(self, start, end):
        """Number of faults with start <= t < end."""
        return bisect_left(self.fault_times, end) - bisect_left(self.fault_times, start)


@dataclass(frozen=True)
class CacheState:
    """Cache size, final contents, and fault count of a finished run."""

    k: int
    pages: frozenset
    faults: int


class RecencyTracker:
    """Last-use order of pages, answering LRU and most-recent-distinct queries."""

    def __init__(self):
        self._order = OrderedDict()
        self._clock = 0

    def touch(self, page):
        self._order.pop(page, None)
        self._order[page] = self._clock
        self._clock += 1

    def least_recent(self, candidates):
        """Least recently touched page among candidates; never-touched pages
        sort first, ties by smallest page id. Candidates must be nonempty."""
        return min(candidates, key=lambda p: (self._order.get(p, -1), p))

    def most_recent_distinct(self, n):
        """Up to n distinct pages, most recent first."""
        out = []
        for page in reversed(self._order):
            if len(out) == n:
                break
            out.append(page)
        return out


class PhaseTracker:
    """Marking phases: a phase ends when the (k+1)-st distinct page arrives."""

    def __init__(self, k):
        self.k = k
        self.marked = set()
        self.phase_index = 0

    def observe(self, t, page):
        """Mark the page; returns True when this request starts a new phase."""
        new_phase = False
        if page not in self.marked and len(self.marked) >= self.k:
            self.marked.clear()
            self.phase_index += 1
            new_phase = True
        self.marked.add(page)
        return new_phase


class EvictionPolicy:
    """Stateful eviction policy driven by simulate().

    reset runs once per simulation. on_request sees every request before the
    cache is updated. choose_victim runs only on a fault with a full cache
    and must return a cached page. on_load runs after the missed page is
    inserted.
    """

    def reset(self, seq, k, rng):
        raise NotImplementedError

    def on_request(self, t, page, hit):
        pass

    def choose_victim(self, t, page, cache):
        raise NotImplementedError

    def on_load(self, t, page):
        pass


def simulate(policy, seq, k, seed=0, step_callback=None):
    """Run a policy over a sequence with cache size k.

    Returns (CostLedger, CacheState). The simulation owns one seeded
    generator; policies draw randomness only through it unless they were
    constructed with a dedicated seed. step_callback(t, page, fault, cache)
    is invoked after each request with the live cache set.
    """
    if len(seq) == 0:
        raise SimulationError("empty trace")
    if k < 1:
        raise SimulationError("cache size must be positive")
    rng = random.Random(seed)
    policy.reset(seq, k, rng)
    cache = set()
    ledger = CostLedger()
    for t, page in enumerate(seq.requests):
        hit = page in cache
        policy.on_request(t, page, hit)
        if not hit:
            ledger.record(t)
            if len(cache) >= k:
                victim = policy.choose_victim(t, page, cache)
                if victim not in cache:
                    raise SimulationError("illegal eviction")
                cache.remove(victim)
            cache.add(page)
            policy.on_load(t, page)
        if step_callback is not None:
            step_callback(t, page, not hit, cache)
    return ledger, CacheState(k, frozenset(cache), ledger.cost)


class EagerPolicy:
    """Policy that manages its own cache and may load or evict eagerly.

    Subclasses implement serve(t, page) and must route every cache change
    through _load and _evict so the load count and eviction order stay
    accurate. Cost equals the number of loads.
    """

    def reset(self, seq, k, rng):
        self.seq = seq
        self.k = k
        self.rng = rng
        self.cache = set()
        self.loads = 0
        self.load_times = []
        self.eviction_seq = {}
        self._eviction_clock = 0
        self._now = 0

    def serve(self, t, page):
        raise NotImplementedError

    def run(self, seq, k, seed=0):
        """Serve the whole sequence eagerly; returns the load-count ledger."""
        if len(seq) == 0:
            raise SimulationError("empty trace")
        self.reset(seq, k, random.Random(seed))
        for t, page in enumerate(seq.requests):
            self._now = t
            self.serve(t, page)
        return CostLedger(list(self.load_times))

    def _load(self, page):
        if page in self.cache:
            return False
        if len(self.cache) >= self.k:
            raise SimulationError("eager load into a full cache")
        self.cache.add(page)
        self.loads += 1
        self.load_times.append(self._now)
        return True

    def _evict(self, page):
        if page not in self.cache:
            raise SimulationError("illegal eviction")
        self.cache.remove(page)
        self._eviction_clock += 1
        self.eviction_seq[page] = self._eviction_clock


class LazifiedPolicy(EvictionPolicy):
    """Defers an eager policy's cache changes until a fault forces them.

    The wrapped policy simulates its own cache in lockstep. On a lazy fault
    with a full cache, the victim is the page the eager run discarded
    longest ago among pages the eager cache no longer holds; that set is
    never empty because the eager cache already contains the requested page
    while the lazy cache does not.
    """

    def __init__(self, eager):
        self.eager = eager

    def reset(self, seq, k, rng):
        self.eager.reset(seq, k, rng)

    def on_request(self, t, page, hit):
        self.eager._now = t
        self.eager.serve(t, page)

    def choose_victim(self, t, page, cache):
        stale = cache - self.eager.cache
        if not stale:
            raise SimulationError("no eager-discarded page available to evict")
        return min(stale, key=lambda p: (self.eager.eviction_seq.get(p, 0), p))

    @property
    def eager_loads(self):
        return self.eager.loads


def lazify(eager_policy):
    """Wrap an eager policy so it evicts exactly one page per actual fault."""
    return LazifiedPolicy(eager_policy)
