"""Cache policy driven by a furthest-in-future oracle.

The oracle answers a narrower question than a full cache prediction: given
the current cache, which member is requested furthest in the future. The
Follower keeps a reference furthest-in-future run going from the start of
the current execution and evicts whatever the oracle names while the two
fault in lockstep. When the policy faults where the reference run does not,
it runs one marking phase whose oracle usage is rationed by a budget
parameter b against the count of clean arrivals, evicting random unmarked
pages once the budget binds. Each phase ends by reloading the marked pages
and starting a fresh reference run from that state.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .core import CostLedger, EagerPolicy, SimulationError, lazify
from .offline import BeladyRun, build_next_arrival_index
from .fnr import window_plan


@dataclass
class FitfBudget:
    """Query rationing for one recovery phase: at most b queries per clean
    arrival over the phase, at most one per clean arrival within a window."""

    b: float
    phase_queries: int = 0
    window_queries: int = 0
    c_t: int = 0

    def can_query(self):
        return (
            self.phase_queries < self.b * self.c_t
            and self.window_queries < self.c_t
        )

    def note_query(self):
        self.phase_queries += 1
        self.window_queries += 1


@dataclass
class FitfPhase:
    """Bookkeeping of one recovery phase."""

    start: int
    start_cache: frozenset
    budget: FitfBudget
    marked: set = field(default_factory=set)
    arrivals: int = 0
    arrival_times: list = field(default_factory=list)
    fault_times: list = field(default_factory=list)
    end: int = None


class FitfEager(EagerPolicy):
    """Eager state machine of the oracle-following policy.

    Deploy through fitf_policy (lazified); the eager machine is the
    reference object the analysis tests drive directly.
    """

    def __init__(self, oracle, b=1.0, seed=None):
        self.oracle = oracle
        self.b = b
        self._seed = seed

    def reset(self, seq, k, rng):
        super().reset(seq, k, rng)
        if self.b < 1 or self.b > max(1.0, math.log2(k)) + 1e-9:
            raise ValueError("budget parameter out of range")
        self._rng = random.Random(self._seed) if self._seed is not None else rng
        self.index = build_next_arrival_index(seq)
        self.oracle.reset(seq, k)
        self.plan = window_plan(k, "zero")
        self.mode_state = "follower"
        self.run = BeladyRun(seq, k, index=self.index)
        self.phase = None
        self._window_idx = None
        self.phase_history = []
        self.query_log = []
        self.last_action = None

    def serve(self, t, page):
        if self.mode_state == "follower":
            self._serve_follower(t, page)
        else:
            self._serve_robust(t, page)

    def _ask(self, t, page):
        """Query the oracle and evict its answer."""
        answer = self.oracle.query(t, frozenset(self.cache))
        if answer not in self.cache:
            raise SimulationError("illegal oracle answer")
        self.query_log.append((t, answer, self.mode_state))
        self._evict(answer)

    def _serve_follower(self, t, page):
        reference_faulted, _ = self.run.step(t, page)
        if page in self.cache:
            self.last_action = "hit"
            return
        if reference_faulted:
            if len(self.cache) >= self.k:
                self._ask(t, page)
            self._load(page)
            self.last_action = "oracle-evict"
        else:
            self.last_action = "switch-to-robust"
            self._enter_robust(t)
            self._serve_robust(t, page)

    def _enter_robust(self, t):
        self.mode_state = "robust"
        self.phase = FitfPhase(
            start=t,
            start_cache=frozenset(self.cache),
            budget=FitfBudget(b=self.b),
        )
        self._window_idx = None

    def _serve_robust(self, t, page):
        phase = self.phase
        if page not in phase.marked and len(phase.marked) >= self.k:
            self._end_phase(t)
            self._serve_follower(t, page)
            return
        if page not in phase.marked:
            phase.arrivals += 1
            phase.arrival_times.append(t)
            phase.marked.add(page)
            if page not in phase.start_cache:
                phase.budget.c_t += 1
            window = self.plan.window_of(phase.arrivals)
            if window != self._window_idx:
                self._window_idx = window
                phase.budget.window_queries = 0
        if page in self.cache:
            self.last_action = "hit"
            return
        phase.fault_times.append(t)
        if len(self.cache) >= self.k:
            if phase.budget.can_query():
                phase.budget.note_query()
                self._ask(t, page)
            else:
                self._evict_random_unmarked(page)
        self._load(page)
        self.last_action = "robust-fault"

    def _evict_random_unmarked(self, page):
        candidates = sorted(self.cache - self.phase.marked)
        self._evict(self._rng.choice(candidates))

    def _end_phase(self, t):
        phase = self.phase
        for p in sorted(self.cache - phase.marked):
            self._evict(p)
        for p in sorted(phase.marked - self.cache):
            self._load(p)
        phase.end = t
        self.phase_history.append(phase)
        self.mode_state = "follower"
        self.phase = None
        self.run = BeladyRun(
            self.seq, self.k, index=self.index, start_time=t,
            initial_cache=sorted(self.cache),
        )


def fitf_follower(state, stream, fitf_predictor=None):
    """Feed (t, page) pairs to the state machine while it follows the
    reference run; returns the last action taken (switch-to-robust when the
    machine left the follower regime, which also serves that request)."""
    if fitf_predictor is not None and fitf_predictor is not state.oracle:
        raise ValueError("predictor must be the one bound to the state machine")
    if state.mode_state != "follower":
        raise ValueError("state machine is not in the follower regime")
    for t, page in stream:
        state._now = t
        state.serve(t, page)
        if state.mode_state != "follower":
            break
    return state.last_action


def fitf_robust(state, stream, fitf_predictor=None, b=None, seed=None):
    """Feed (t, page) pairs to a state machine currently in a recovery
    phase until the phase closes; returns the loads recorded meanwhile."""
    if fitf_predictor is not None and fitf_predictor is not state.oracle:
        raise ValueError("predictor must be the one bound to the state machine")
    if b is not None and b != state.b:
        raise ValueError("budget parameter must match the state machine")
    if state.mode_state != "robust":
        raise ValueError("state machine is not in a recovery phase")
    start = len(state.load_times)
    for t, page in stream:
        state._now = t
        state.serve(t, page)
        if state.mode_state != "robust":
            break
    return CostLedger(list(state.load_times[start:]))


def fitf_policy(oracle, b=1.0, seed=None):
    """The deployable policy: the eager machine behind the lazification
    adapter, so exactly one page is evicted per actual fault."""
    return lazify(FitfEager(oracle, b=b, seed=seed))
