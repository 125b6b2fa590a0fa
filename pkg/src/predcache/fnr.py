"""Prediction-following cache policy with a randomized recovery phase.

The policy alternates two regimes. The Follower mirrors an action predictor
while its fault count stays within alpha times the offline schedule's fault
count over the current period. When it falls behind at a fault the offline
schedule avoids, control passes to one sliding marking phase of the Robust
regime, which evicts random unmarked pages, re-queries the predictor on a
sparse arrival schedule derived from a growth function f, and periodically
synchronizes its cache with the latest prediction. After the phase the
Follower resumes.

The eager state machine lives in FnrEager; fnr_policy wraps it in the
lazification adapter so the deployed policy evicts one page per fault.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .core import (
    EagerPolicy,
    CostLedger,
    RecencyTracker,
    lazify,
)
from .offline import belady_schedule

GROWTH_FUNCTIONS = {
    "exp": lambda i: 2**i - 1,
    "quad": lambda i: i * i,
    "lin": lambda i: i,
    "zero": lambda i: 0,
}


def growth_function(spec):
    """Resolve a growth-function spec: a registry name, a callable, or a
    table of values f(0), f(1), ... (values past the table repeat the last)."""
    if callable(spec):
        return spec
    if isinstance(spec, str):
        try:
            return GROWTH_FUNCTIONS[spec]
        except KeyError:
            raise ValueError(
                "unknown growth function %r; expected one of %s or a table"
                % (spec, sorted(GROWTH_FUNCTIONS))
            ) from None
    table = list(spec)
    if not table:
        raise ValueError("growth-function table must be non-empty")
    return lambda i: table[i] if i < len(table) else table[-1]


@dataclass(frozen=True)
class WindowPlan:
    """Arrival-index structure of one recovery phase.

    boundaries lists the synchronization arrivals S ascending; windows are
    inclusive arrival-index ranges partitioning 1..k; query_arrivals lists,
    per window, the arrival indices where a fresh prediction is requested.
    """

    k: int
    boundaries: tuple
    windows: tuple
    query_arrivals: tuple

    @property
    def sync_arrival_set(self):
        return frozenset(self.boundaries)

    @property
    def query_arrival_set(self):
        return frozenset(a for window in self.query_arrivals for a in window)

    def window_of(self, arrival_index):
        """0-based window position containing the 1-based arrival index."""
        for i, (start, end) in enumerate(self.windows):
            if start <= arrival_index <= end:
                return i
        raise ValueError("arrival index outside 1..k")


def window_plan(k, f, arrival_rule="earliest"):
    """Build the sync/query arrival schedule for cache size k.

    Boundaries are {max(1, k - 2^j + 1)} for j from ceil(log2 k) down to 0,
    deduplicated; windows span consecutive boundaries. Window i receives
    min(f(i) - f(i-1), window size) query arrivals, taken from the earliest
    arrivals of the window (or the latest, per arrival_rule).
    """
    if k < 1:
        raise ValueError("cache size must be positive")
    if arrival_rule not in ("earliest", "latest"):
        raise ValueError("arrival_rule must be 'earliest' or 'latest'")
    f = growth_function(f)
    m = max(0, math.ceil(math.log2(k))) if k > 1 else 0
    boundaries = sorted({max(1, k - 2**j + 1) for j in range(m, -1, -1)})
    edges = boundaries + [k + 1]
    windows = tuple(
        (edges[i], edges[i + 1] - 1) for i in range(len(boundaries))
    )
    if f(0) != 0:
        raise ValueError("growth function must satisfy f(0) = 0")
    for i in range(1, len(windows) + 1):
        if f(i) < f(i - 1):
            raise ValueError("growth function must be non-decreasing")
        if f(i) > 2**i - 1:
            raise ValueError("growth function must satisfy f(i) <= 2^i - 1")
        if i >= 2 and (f(i) - f(i - 1)) < (f(i - 1) - f(i - 2)):
            raise ValueError("growth function must be convex")
    query_arrivals = []
    for i, (start, end) in enumerate(windows, start=1):
        budget = min(f(i) - f(i - 1), end - start + 1)
        if arrival_rule == "earliest":
            chosen = tuple(range(start, start + budget))
        else:
            chosen = tuple(range(end - budget + 1, end + 1))
        query_arrivals.append(chosen)
    return WindowPlan(k, tuple(boundaries), windows, tuple(query_arrivals))


@dataclass
class PhasePlan:
    """Live bookkeeping of one recovery phase."""

    phase_start: int
    start_cache: frozenset
    marked: set = field(default_factory=set)
    clean: set = field(default_factory=set)
    arrivals: int = 0
    arrival_times: list = field(default_factory=list)
    queries: int = 0
    sync_slack_events: int = 0
    end_time: int = None

    @property
    def clean_count(self):
        return len(self.clean)


@dataclass(frozen=True)
class SyncRecord:
    """Snapshot taken right after one synchronization, before the faulting
    arrival is loaded. E lists the should-be-cached pages currently absent."""

    arrival_index: int
    time: int
    evicted: tuple
    returned: tuple
    E: tuple
    c: int
    slack: int


@dataclass
class EvictionLedger:
    """Random evictions awaiting return, plus per-sync snapshots."""

    random_out: list = field(default_factory=list)
    total_random_evictions: int = 0
    sync_records: list = field(default_factory=list)


def synchronize_with_prediction(cache, ledger, P, rng=None, exclude=(), capacity=None):
    """Plan one synchronization with the prediction P.

    All outstanding randomly evicted pages return; an equal number of cached
    pages outside P (never one in exclude) leaves, chosen uniformly at
    random through rng (deterministically earliest-sorted without one).
    Returns (evictions, loads, slack): slack counts returns that could not
    be honored because candidates or capacity ran short.
    """
    returns = list(ledger.random_out)
    want = len(returns)
    if want == 0:
        return set(), [], 0
    candidates = sorted(set(cache) - set(P) - set(exclude))
    m = min(want, len(candidates))
    if rng is None:
        chosen = set(candidates[:m])
    else:
        chosen = set(rng.sample(candidates, m))
    capacity = len(cache) if capacity is None else capacity
    space = capacity - (len(cache) - len(chosen))
    loaded = returns[: max(0, space)]
    return chosen, loaded, want - len(loaded)


@dataclass(frozen=True)
class IntervalRecord:
    """One half-open stretch [start, end) tagged as a gap or a phase, with
    the loads the eager run performed while it was current."""

    kind: str
    start: int
    end: int
    loads: int


class FnrEager(EagerPolicy):
    """Eager state machine of the follower/recovery policy.

    Deploy through fnr_policy (lazified). Running this class directly gives
    the reference eager behavior whose interval ledger the analysis tests
    consume.
    """

    def __init__(
        self,
        predictor,
        f="lin",
        alpha=1.0,
        mode="unbounded",
        a=1,
        seed=None,
        final_sync=True,
        schedule=None,
        arrival_rule="earliest",
    ):
        if alpha < 1:
            raise ValueError("alpha must be at least 1")
        if mode not in ("unbounded", "a_separated"):
            raise ValueError("mode must be 'unbounded' or 'a_separated'")
        if a < 1:
            raise ValueError("a must be at least 1")
        self.predictor = predictor
        self.f_spec = f
        self.alpha = alpha
        self.mode = mode
        self.a = a
        self._seed = seed
        self.final_sync = final_sync
        self._given_schedule = schedule
        self.arrival_rule = arrival_rule

    def reset(self, seq, k, rng):
        super().reset(seq, k, rng)
        self._rng = random.Random(self._seed) if self._seed is not None else rng
        self.plan = window_plan(k, self.f_spec, self.arrival_rule)
        self.schedule = (
            self._given_schedule
            if self._given_schedule is not None
            else belady_schedule(seq, k)
        )
        self.predictor.reset(seq, k)
        self.recency = RecencyTracker()
        self.mode_state = "follower"
        self.P = None
        self.last_query = None
        self.period_alg = 0
        self.period_belady = 0
        self.phase = None
        self.phase_ledger = None
        self.phase_history = []
        self.queries_per_phase = []
        self.sync_slack_events = 0
        self.intervals = []
        self._interval_start = 0
        self._interval_loads_base = 0
        self.last_action = None

    # -- shared helpers ------------------------------------------------

    def serve(self, t, page):
        self.predictor.observe(t, page)
        if self.mode_state == "follower":
            self._serve_follower(t, page)
        else:
            self._serve_robust(t, page)
        self.recency.touch(page)

    def finish(self, end_time):
        """Close the trailing interval; call once after the last request."""
        kind = "phase" if self.mode_state == "robust" else "gap"
        self._close_interval(kind, end_time)

    def _can_query(self, t):
        if self.mode != "a_separated" or self.last_query is None:
            return True
        return t - self.last_query >= self.a

    def _query(self, t):
        prediction = self.predictor.query(t, frozenset(self.cache))
        self.P = set(prediction.predicted_cache)
        self.last_query = t
        if self.phase is not None:
            self.phase.queries += 1
        return prediction

    def _evict_lru(self, candidates):
        self._evict(self.recency.least_recent(candidates))

    def _evict_toward_prediction(self, page):
        """Evict the least recent page outside P; plain LRU if none is."""
        if len(self.cache) < self.k:
            return
        candidates = (self.cache - self.P) if self.P is not None else set()
        self._evict_lru(candidates or self.cache)

    def _close_interval(self, kind, end):
        self.intervals.append(
            IntervalRecord(
                kind, self._interval_start, end, self.loads - self._interval_loads_base
            )
        )
        self._interval_start = end
        self._interval_loads_base = self.loads

    # -- follower regime -------------------------------------------------

    def _serve_follower(self, t, page):
        if self.schedule.fault_at[t]:
            self.period_belady += 1
        if page in self.cache:
            self.last_action = "hit"
            return
        self.period_alg += 1
        if self.P is not None and page in self.P:
            self._evict_toward_prediction(page)
            self._load(page)
            self.last_action = "lazy-sync-evict"
        elif self.schedule.fault_at[t]:
            if self._can_query(t):
                self._query(t)
                self._evict_toward_prediction(page)
                self.last_action = "follow-evict"
            else:
                if len(self.cache) >= self.k:
                    self._evict_lru(self.cache)
                self.last_action = "lru-evict"
            self._load(page)
        else:
            if self.period_alg > self.alpha * self.period_belady:
                self.last_action = "switch-to-robust"
                self._enter_robust(t)
                self._serve_robust(t, page)
            else:
                if len(self.cache) >= self.k:
                    self._evict_lru(self.cache)
                self._load(page)
                self.last_action = "lru-evict"

    # -- recovery regime ---------------------------------------------------

    def _enter_robust(self, t):
        self._close_interval("gap", t)
        self.mode_state = "robust"
        target = set(self.recency.most_recent_distinct(self.k))
        for p in sorted(self.cache - target):
            self._evict(p)
        for p in sorted(target - self.cache):
            self._load(p)
        self.phase = PhasePlan(phase_start=t, start_cache=frozenset(self.cache))
        self.phase_ledger = EvictionLedger()

    def _serve_robust(self, t, page):
        phase = self.phase
        if page not in phase.marked and len(phase.marked) >= self.k:
            self._end_phase(t)
            self._serve_follower(t, page)
            return
        fault = page not in self.cache
        if self.mode == "a_separated" and fault and self._can_query(t):
            self._query(t)
        if page not in phase.marked:
            phase.arrivals += 1
            phase.arrival_times.append(t)
            phase.marked.add(page)
            if page not in phase.start_cache:
                phase.clean.add(page)
            if fault:
                if (
                    self.mode != "a_separated"
                    and phase.arrivals in self.plan.query_arrival_set
                ):
                    self._query(t)
                if phase.arrivals in self.plan.sync_arrival_set:
                    self._synchronize(t, page)
                if page not in self.cache:
                    if len(self.cache) >= self.k:
                        self._evict_for_arrival(page)
                    self._load_tracked(page)
            self.last_action = "robust-arrival"
        elif fault:
            if len(self.cache) >= self.k:
                self._evict_random_unmarked(page)
            self._load_tracked(page)
            self.last_action = "robust-fault"
        else:
            self.last_action = "hit"

    def _load_tracked(self, page):
        self._load(page)
        out = self.phase_ledger.random_out
        if page in out:
            out.remove(page)

    def _evict_for_arrival(self, page):
        """Eviction for a faulting arrival: pages the prediction excludes are
        preferred for clean arrivals; otherwise a random unmarked page."""
        if page not in self.phase.start_cache and self.P is not None:
            candidates = sorted(self.cache - self.P - {page})
            if candidates:
                self._evict(self._rng.choice(candidates))
                return
        self._evict_random_unmarked(page)

    def _evict_random_unmarked(self, page):
        candidates = sorted(self.cache - self.phase.marked)
        victim = self._rng.choice(candidates)
        self._evict(victim)
        self.phase_ledger.random_out.append(victim)
        self.phase_ledger.total_random_evictions += 1

    def _synchronize(self, t, page):
        if self.P is None:
            return
        phase = self.phase
        ledger = self.phase_ledger
        evictions, loads, slack = synchronize_with_prediction(
            self.cache, ledger, self.P, self._rng, exclude={page}, capacity=self.k
        )
        for p in sorted(evictions):
            self._evict(p)
        for p in loads:
            self._load(p)
        loaded = set(loads)
        ledger.random_out = [p for p in ledger.random_out if p not in loaded]
        if slack or len(evictions) < len(loads) + slack:
            phase.sync_slack_events += 1
            self.sync_slack_events += 1
        clean_before = phase.clean - {page}
        should_hold = set(phase.start_cache) | clean_before
        record = SyncRecord(
            arrival_index=phase.arrivals,
            time=t,
            evicted=tuple(sorted(evictions)),
            returned=tuple(loads),
            E=tuple(sorted(should_hold - self.cache)),
            c=len(clean_before),
            slack=slack,
        )
        ledger.sync_records.append(record)

    def _end_phase(self, t):
        phase = self.phase
        if self.final_sync:
            for p in sorted(self.cache - phase.marked):
                self._evict(p)
            for p in sorted(phase.marked - self.cache):
                self._load(p)
        phase.end_time = t
        self.queries_per_phase.append(phase.queries)
        self.phase_history.append((phase, self.phase_ledger))
        self._close_interval("phase", t)
        self.mode_state = "follower"
        self.phase = None
        self.phase_ledger = None
        self.period_alg = 0
        self.period_belady = 0


def follower_step(state, t, page):
    """Serve one request through the state machine and name the action taken:
    hit, follow-evict, lazy-sync-evict, lru-evict, or switch-to-robust."""
    state._now = t
    state.serve(t, page)
    return state.last_action


def robust_phase(state, stream):
    """Feed (t, page) pairs to a state machine currently in its recovery
    phase until the phase closes; returns the loads recorded meanwhile."""
    if state.mode_state != "robust":
        raise ValueError("state machine is not in a recovery phase")
    start = len(state.load_times)
    for t, page in stream:
        state._now = t
        state.serve(t, page)
        if state.mode_state != "robust":
            break
    return CostLedger(list(state.load_times[start:]))


def fnr_policy(
    predictor,
    f="lin",
    alpha=1.0,
    mode="unbounded",
    a=1,
    seed=None,
    final_sync=True,
    schedule=None,
):
    """The deployable policy: the eager machine behind the lazification
    adapter, so exactly one page is evicted per actual fault."""
    eager = FnrEager(
        predictor,
        f=f,
        alpha=alpha,
        mode=mode,
        a=a,
        seed=seed,
        final_sync=final_sync,
        schedule=schedule,
    )
    return lazify(eager)
