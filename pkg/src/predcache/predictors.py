"""Prediction sources for cache simulations.

Two shapes of predictor exist side by side. Next-arrival predictors guess
when the page requested now returns; action predictors maintain a predicted
cache and answer queries with it; furthest-in-future oracles name a single
eviction victim from the caller's cache.

Protocol shared by the stateful kinds: reset(seq, k) once per simulation,
then exactly one observation per time step with the requested page, before
any query at that step. Queries therefore see the predictor's state after
serving the current request.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import INFINITY, build_next_arrival_index
from .offline import FurthestFirstCache


@dataclass(frozen=True)
class ActionPrediction:
    """One answer from an action predictor.

    predicted_cache is the predictor's cache P at query_time.
    reported_evictions lists, sorted, the caller's cached pages absent
    from P; it never overlaps P and is always drawn from the caller's cache.
    """

    predicted_cache: frozenset
    query_time: int
    reported_evictions: tuple


@dataclass(frozen=True)
class PredictionErrorMeter:
    """Usage and error counters of one predictor over one simulation.

    eta_t holds the per-query error (pages the reference offline cache
    holds that the prediction lacks); eta is their sum.
    """

    eta_t: tuple
    eta: int
    query_count: int
    reported_page_count: int


class BeladyCacheReplay:
    """Follows the cache of a precomputed furthest-in-future schedule."""

    def __init__(self, schedule):
        self.schedule = schedule
        self.cache = set()

    def step(self, t, page):
        if self.schedule.fault_at[t]:
            evicted = self.schedule.evicted_at[t]
            if evicted is not None:
                self.cache.discard(evicted)
            self.cache.add(page)


class ActionPredictor:
    """Base class for predictors answering with a predicted cache.

    Subclasses implement _reset, _observe, and _predicted_cache. Metering
    (query count, reported pages, and error against a reference schedule
    when one is attached) lives here so every predictor reports uniformly.
    """

    def __init__(self):
        self._reference_schedule = None

    def attach_reference(self, schedule):
        """Meter prediction error against this offline schedule's cache."""
        self._reference_schedule = schedule
        return self

    def reset(self, seq, k):
        self.seq = seq
        self.k = k
        self.query_count = 0
        self.reported_page_count = 0
        self.eta = 0
        self.eta_series = []
        self._replay = (
            BeladyCacheReplay(self._reference_schedule)
            if self._reference_schedule is not None
            else None
        )
        self._reset(seq, k)

    def observe(self, t, page):
        if self._replay is not None:
            self._replay.step(t, page)
        self._observe(t, page)

    def query(self, t, caller_cache):
        predicted = frozenset(self._predicted_cache(t, caller_cache))
        reported = tuple(sorted(set(caller_cache) - predicted))
        self.query_count += 1
        self.reported_page_count += len(reported)
        if self._replay is not None:
            error = len(self._replay.cache - predicted)
            self.eta += error
            self.eta_series.append(error)
        return ActionPrediction(predicted, t, reported)

    @property
    def meter(self):
        return PredictionErrorMeter(
            tuple(self.eta_series), self.eta, self.query_count, self.reported_page_count
        )

    def _reset(self, seq, k):
        pass

    def _observe(self, t, page):
        pass

    def _predicted_cache(self, t, caller_cache):
        raise NotImplementedError


class BeladyPredictor(ActionPredictor):
    """Perfect action predictor: its cache is the offline schedule's cache."""

    def __init__(self, schedule):
        super().__init__()
        self.schedule = schedule
        self.attach_reference(schedule)

    def _reset(self, seq, k):
        self._sim = BeladyCacheReplay(self.schedule)

    def _observe(self, t, page):
        self._sim.step(t, page)

    def _predicted_cache(self, t, caller_cache):
        return self._sim.cache


def belady_predictor(schedule):
    """Action predictor that reproduces the given offline schedule exactly."""
    return BeladyPredictor(schedule)


class SyntheticNextArrival:
    """True next arrivals perturbed by seeded log-normal noise.

    With multiplicative noise (default) the predicted gap is the true gap
    scaled by exp(N(0, sigma)); with additive noise the sample minus one is
    added instead. Both keep sigma = 0 exact. Pages never requested again
    are predicted at INFINITY regardless of noise.
    """

    def __init__(self, seq, sigma, seed, additive=False, index=None):
        if sigma < 0:
            raise ValueError("sigma must be non-negative")
        self.seq = seq
        self.sigma = sigma
        self.seed = seed
        self.additive = additive
        self._index = index
        self._index_seq = seq if index is not None else None

    def reset(self, seq, k):
        self.seq = seq
        if self._index_seq is not seq:
            self._index = build_next_arrival_index(seq)
            self._index_seq = seq
        self._rng = random.Random(self.seed)

    def predict_next(self, t, page):
        # One noise draw per request keeps the stream reproducible across
        # pages, including those never requested again.
        sample = self._rng.lognormvariate(0.0, self.sigma) if self.sigma > 0 else 1.0
        true_next = self._index.next_after(page, t)
        if true_next >= INFINITY:
            return INFINITY
        gap = true_next - t
        if self.additive:
            noisy = gap + (sample - 1.0)
        else:
            noisy = gap * sample
        return t + max(1, round(noisy))


def synthetic_next_arrival(seq, sigma, seed, additive=False):
    """Next-arrival predictor with log-normal noise on the true gap."""
    return SyntheticNextArrival(seq, sigma, seed, additive=additive)


class PopuPredictor:
    """Frequency predictor: a page seen in fraction p of requests so far is
    predicted to return 1/p steps ahead; first sightings give p = 1/(t+1)."""

    def __init__(self):
        self._counts = {}

    def reset(self, seq, k):
        self._counts = {}

    def predict_next(self, t, page):
        count = self._counts.get(page, 0) + 1
        self._counts[page] = count
        total = t + 1
        gap = max(1, round(total / count))
        return t + gap


def popu_predictor():
    """Popularity-based next-arrival predictor."""
    return PopuPredictor()


class NextArrivalToAction(ActionPredictor):
    """Converts a next-arrival predictor into an action predictor.

    A simulated cache serves every request, evicting the cached page with
    the furthest predicted arrival (ties toward the smallest page id). It
    loads only requested pages, so the predictor is lazy. Fed exact
    arrivals it evolves identically to the offline schedule.
    """

    def __init__(self, next_arrival_predictor, k=None, seed=None):
        super().__init__()
        self.arrival_predictor = next_arrival_predictor
        self._default_k = k
        # The conversion itself is deterministic; seed is accepted so all
        # predictor factories configure uniformly.
        self._seed = seed

    def _reset(self, seq, k):
        self.arrival_predictor.reset(seq, k or self._default_k)
        self._sim = FurthestFirstCache(k or self._default_k)

    def _observe(self, t, page):
        arrival = self.arrival_predictor.predict_next(t, page)
        self._sim.request(page, arrival)

    def _predicted_cache(self, t, caller_cache):
        return self._sim.cache


def next_arrival_to_action(next_arrival_predictor, k=None, seed=None):
    """Action predictor driven by a simulated cache over predicted arrivals."""
    return NextArrivalToAction(next_arrival_predictor, k=k, seed=seed)


class AdversarialPredictor(ActionPredictor):
    """Worst-case advice: the predicted cache is the caller's cache with the
    soonest-needed page replaced by the current request."""

    def __init__(self, seed=None):
        super().__init__()
        # Deterministic (the soonest next arrival is unique among finite
        # values; all-INFINITY ties break by smallest id); seed accepted for
        # factory uniformity.
        self._seed = seed

    def _reset(self, seq, k):
        self._index = build_next_arrival_index(seq)

    def _predicted_cache(self, t, caller_cache):
        if not caller_cache:
            return {self.seq.requests[t]}
        soonest = min(
            caller_cache, key=lambda p: (self._index.next_after(p, t), p)
        )
        return (set(caller_cache) - {soonest}) | {self.seq.requests[t]}


def adversarial_predictor(seed=None):
    """Action predictor that always drops the page needed soonest."""
    return AdversarialPredictor(seed)


class FitfOracle:
    """Base for oracles naming one eviction victim from the caller's cache.

    phi counts answers that are not furthest-in-future for the caller's
    cache at query time (ties between never-again pages all count correct).
    """

    def reset(self, seq, k):
        self.seq = seq
        self.k = k
        self.query_count = 0
        self.phi = 0
        self._index = build_next_arrival_index(seq)
        self._reset(seq, k)

    def query(self, t, caller_cache):
        answer = self._answer(t, caller_cache)
        self.query_count += 1
        best = max(self._index.next_after(p, t) for p in caller_cache)
        if answer not in caller_cache or self._index.next_after(answer, t) != best:
            self.phi += 1
        return answer

    def _reset(self, seq, k):
        pass

    def _answer(self, t, caller_cache):
        raise NotImplementedError


class FitfProbabilistic(FitfOracle):
    """Furthest-in-future oracle that errs with probability p.

    With probability 1 - p it names the true furthest-in-future page of the
    caller's cache (ties toward the smallest id); with probability p it
    names a uniformly random cached page.
    """

    def __init__(self, p, seed):
        if not 0 <= p <= 1:
            raise ValueError("p must lie in [0, 1]")
        self.p = p
        self.seed = seed

    def _reset(self, seq, k):
        self._rng = random.Random(self.seed)

    def _answer(self, t, caller_cache):
        if self.p > 0 and self._rng.random() < self.p:
            return self._rng.choice(sorted(caller_cache))
        return max(caller_cache, key=lambda p: (self._index.next_after(p, t), -p))


def fitf_probabilistic(p, seed=0):
    """Furthest-in-future oracle answering randomly with probability p."""
    return FitfProbabilistic(p, seed)
