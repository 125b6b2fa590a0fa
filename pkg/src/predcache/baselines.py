"""Classical and simple prediction-following eviction policies.

All four policies plug into core.simulate. Policies that randomize draw
from the simulation's generator unless constructed with a dedicated seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .core import EvictionPolicy, PhaseTracker, RecencyTracker


@dataclass
class MarkerState:
    """Marking bookkeeping: marked pages and phase position."""

    marks: set = field(default_factory=set)
    phase_start: int = 0
    phase_distinct: int = 0


class LruPolicy(EvictionPolicy):
    """Evicts the least recently requested cached page."""

    def reset(self, seq, k, rng):
        self._recency = RecencyTracker()

    def on_request(self, t, page, hit):
        self._recency.touch(page)

    def choose_victim(self, t, page, cache):
        return self._recency.least_recent(cache)


def lru_policy():
    return LruPolicy()


class MarkerPolicy(EvictionPolicy):
    """Marks requested pages; evicts a uniformly random unmarked cached page.

    Marks clear when the (k+1)-st distinct page since the phase start
    arrives. A fault always finds an unmarked cached page: the faulting
    page is already marked but absent, so at most k-1 cached pages carry
    marks.
    """

    def __init__(self, seed=None):
        self._seed = seed

    def reset(self, seq, k, rng):
        self._phases = PhaseTracker(k)
        self._rng = random.Random(self._seed) if self._seed is not None else rng
        self.state = MarkerState()

    def on_request(self, t, page, hit):
        if self._phases.observe(t, page):
            self.state.phase_start = t
        self.state.marks = self._phases.marked
        self.state.phase_distinct = len(self._phases.marked)

    def choose_victim(self, t, page, cache):
        unmarked = sorted(cache - self._phases.marked)
        return self._rng.choice(unmarked)


def marker_policy(seed=None):
    return MarkerPolicy(seed)


class FtpPolicy(EvictionPolicy):
    """Queries the action predictor at every fault and follows it blindly.

    Evicts the least recently used page the prediction excludes; when the
    prediction excludes nothing, falls back to plain LRU.
    """

    def __init__(self, predictor):
        self.predictor = predictor

    def reset(self, seq, k, rng):
        self.predictor.reset(seq, k)
        self._recency = RecencyTracker()

    def on_request(self, t, page, hit):
        self.predictor.observe(t, page)
        self._recency.touch(page)

    def choose_victim(self, t, page, cache):
        prediction = self.predictor.query(t, frozenset(cache))
        outside = cache - prediction.predicted_cache
        return self._recency.least_recent(outside or cache)


def ftp_policy(predictor):
    return FtpPolicy(predictor)


class FtpmPolicy(EvictionPolicy):
    """Marking policy evicting the unmarked page predicted to return last.

    Stores a predicted next arrival for each page as it is requested; on a
    fault evicts the unmarked cached page with the maximal stored arrival,
    ties toward the smallest page id.
    """

    def __init__(self, next_arrival_predictor, seed=None):
        self.arrival_predictor = next_arrival_predictor
        self._seed = seed

    def reset(self, seq, k, rng):
        self.arrival_predictor.reset(seq, k)
        self._phases = PhaseTracker(k)
        self._predicted_arrival = {}

    def on_request(self, t, page, hit):
        self._phases.observe(t, page)
        self._predicted_arrival[page] = self.arrival_predictor.predict_next(t, page)

    def choose_victim(self, t, page, cache):
        unmarked = cache - self._phases.marked
        return max(unmarked, key=lambda p: (self._predicted_arrival[p], -p))


def ftpm_policy(next_arrival_predictor, seed=None):
    return FtpmPolicy(next_arrival_predictor, seed)
