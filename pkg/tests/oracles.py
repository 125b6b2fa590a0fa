"""Brute-force reference implementations used to check the fast code paths.

Everything here favors obviousness over speed: quadratic scans, exhaustive
dynamic programs over cache sets, and full trajectory enumeration for tiny
task systems.
"""

import itertools
import math
import random
import statistics

import numpy as np

from predcache.core import INFINITY
from predcache.mts import MtsInstance


def naive_next_arrival(seq):
    """next_pos by forward scan, O(T^2)."""
    T = len(seq)
    out = []
    for t, page in enumerate(seq.requests):
        nxt = INFINITY
        for u in range(t + 1, T):
            if seq.requests[u] == page:
                nxt = u
                break
        out.append(nxt)
    return out


def optimal_faults(seq, k, start_time=0, initial_cache=()):
    """Minimum fault count by DP over reachable cache sets.

    Cold loads count one fault each. Only feasible for small page universes.
    """
    states = {frozenset(initial_cache): 0}
    for t in range(start_time, len(seq)):
        page = seq.requests[t]
        nxt = {}
        for cache, cost in states.items():
            if page in cache:
                moves = [(cache, cost)]
            elif len(cache) < k:
                moves = [(cache | {page}, cost + 1)]
            else:
                moves = [((cache - {v}) | {page}, cost + 1) for v in cache]
            for state, c in moves:
                prev = nxt.get(state)
                if prev is None or c < prev:
                    nxt[state] = c
        states = nxt
    return min(states.values())


def bootstrap_mean_upper(values, confidence=0.99, resamples=4000, seed=0):
    """Upper percentile-bootstrap confidence bound on the mean."""
    rng = random.Random(seed)
    n = len(values)
    means = sorted(
        statistics.fmean(rng.choices(values, k=n)) for _ in range(resamples)
    )
    return means[min(int(confidence * resamples), resamples - 1)]


def integer_instance(n, T, a=1, seed=0, max_d=6, max_c=8, inf_prob=0.0, x0=0):
    """Random task-system instance with integer distances and costs.

    Integer values keep every float operation exact, so comparisons against
    enumerated optima can demand equality instead of tolerances. Distances
    are the metric closure of random integer edge weights.
    """
    rng = random.Random(seed)
    d = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = rng.randint(1, max_d)
    for m in range(n):
        for i in range(n):
            for j in range(n):
                via = d[i][m] + d[m][j]
                if via < d[i][j]:
                    d[i][j] = via
    costs = tuple(
        tuple(
            math.inf if rng.random() < inf_prob else float(rng.randint(0, max_c))
            for _ in range(n)
        )
        for _ in range(T)
    )
    metric = tuple(tuple(float(x) for x in row) for row in d)
    return MtsInstance(n, metric, x0, costs, a)


def all_trajectories(instance):
    """Every state sequence of length T as an (n^T, T) integer array."""
    n, T = instance.n, instance.T
    flat = np.arange(n**T)
    return np.stack(np.unravel_index(flat, (n,) * T), axis=1)


def trajectory_costs(instance, trajs):
    """Total movement plus service cost for each enumerated trajectory."""
    d = np.asarray(instance.d, dtype=float)
    costs = np.asarray(instance.costs, dtype=float)
    total = d[instance.x0, trajs[:, 0]] + costs[0, trajs[:, 0]]
    for t in range(1, instance.T):
        total = total + d[trajs[:, t - 1], trajs[:, t]] + costs[t, trajs[:, t]]
    return total


def enumerated_optimum(instance):
    """Minimum offline cost by full enumeration (tiny instances only)."""
    if instance.T == 0:
        return 0.0
    trajs = all_trajectories(instance)
    return float(trajectory_costs(instance, trajs).min())


def caching_as_task_system(seq, k):
    """Encode a caching instance as a task system over k-page cache states.

    Movement distance |B \\ A| between cache sets, zero service cost when the
    requested page is cached and an infinite cost otherwise. The start state
    holds the first k distinct pages, so the task-system optimum equals the
    caching optimum minus the k compulsory loads.
    """
    states = sorted(itertools.combinations(range(seq.num_pages), k))
    index = {s: i for i, s in enumerate(states)}
    d = tuple(
        tuple(float(len(set(b) - set(a))) for b in states) for a in states
    )
    first = []
    for p in seq.requests:
        if p not in first:
            first.append(p)
        if len(first) == k:
            break
    x0 = index[tuple(sorted(first))]
    costs = tuple(
        tuple(0.0 if page in s else math.inf for s in states)
        for page in seq.requests
    )
    return MtsInstance(len(states), d, x0, costs, 1)
