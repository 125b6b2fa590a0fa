"""Finite metrical task systems with periodic state predictions.

An instance is a finite metric over states plus a stream of per-step cost
vectors; serving step t from state x costs d(x_prev, x) + cost_t(x), and
INFINITY entries mark forbidden states. The module provides work-function
tables, support-point extraction for a predicted state, a budget-doubling
movement routine that chases the support point without overcommitting, the
period-driven runner combining them, and an exact dynamic-programming
offline optimum used as the reference in tests and error metering.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

INFINITY = math.inf


def _as_matrix(d):
    return np.asarray(d, dtype=float)


@dataclass(frozen=True)
class MtsInstance:
    """One task-system instance: n states, metric d, start state x0, T cost
    vectors, and the prediction period a."""

    n: int
    d: tuple
    x0: int
    costs: tuple
    a: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("state count must be positive")
        if self.a < 1:
            raise ValueError("prediction period must be positive")
        if not 0 <= self.x0 < self.n:
            raise ValueError("start state out of range")
        d = self.d
        if len(d) != self.n or any(len(row) != self.n for row in d):
            raise ValueError("distance matrix must be n by n")
        eps = 1e-9
        for i in range(self.n):
            if d[i][i] != 0:
                raise ValueError("distance matrix must have zero diagonal")
            for j in range(self.n):
                if d[i][j] < 0:
                    raise ValueError("distances must be non-negative")
                if abs(d[i][j] - d[j][i]) > eps:
                    raise ValueError("distance matrix must be symmetric")
                for m in range(self.n):
                    if d[i][j] > d[i][m] + d[m][j] + eps:
                        raise ValueError("distances must satisfy the triangle inequality")
        for row in self.costs:
            if len(row) != self.n:
                raise ValueError("cost vector length must equal the state count")
            if any(c < 0 for c in row):
                raise ValueError("costs must be non-negative")

    @property
    def T(self):
        return len(self.costs)

    def padded(self):
        """Extend with zero-cost steps until T is a multiple of the period."""
        remainder = self.T % self.a
        if remainder == 0:
            return self
        pad = tuple((0.0,) * self.n for _ in range(self.a - remainder))
        return MtsInstance(self.n, self.d, self.x0, self.costs + pad, self.a)


def parse_instance(text):
    """Read the plain-text format: header "n T a x0", n distance rows, then
    T cost rows; the token inf marks a forbidden state."""
    tokens = text.split()
    if len(tokens) < 4:
        raise ValueError("malformed instance: missing header")
    try:
        n, T, a, x0 = (int(tok) for tok in tokens[:4])
    except ValueError:
        raise ValueError("malformed instance: header must be four integers") from None
    need = 4 + n * n + T * n
    if len(tokens) != need:
        raise ValueError(
            "malformed instance: expected %d values, found %d" % (need, len(tokens))
        )
    try:
        values = [float(tok) for tok in tokens[4:]]
    except ValueError:
        raise ValueError("malformed instance: non-numeric entry") from None
    d = tuple(tuple(values[i * n : (i + 1) * n]) for i in range(n))
    base = n * n
    costs = tuple(
        tuple(values[base + t * n : base + (t + 1) * n]) for t in range(T)
    )
    return MtsInstance(n, d, x0, costs, a)


def format_instance(instance):
    """Inverse of parse_instance."""
    def fmt(x):
        return "inf" if math.isinf(x) else repr(float(x))

    lines = ["%d %d %d %d" % (instance.n, instance.T, instance.a, instance.x0)]
    for row in instance.d:
        lines.append(" ".join(fmt(x) for x in row))
    for row in instance.costs:
        lines.append(" ".join(fmt(x) for x in row))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class WorkFunctionTable:
    """Per-state cheapest-service values after a number of steps."""

    values: tuple
    step: int = 0

    def __getitem__(self, x):
        return self.values[x]


def work_function_step(w_prev, cost, d):
    """Advance one step: w(x) = min over y of w_prev(y) + cost(y) + d(y, x)."""
    m = np.asarray(w_prev.values, dtype=float) + np.asarray(cost, dtype=float)
    new = np.min(m[:, None] + _as_matrix(d), axis=0)
    return WorkFunctionTable(tuple(float(v) for v in new), w_prev.step + 1)


def window_work_function(q_prev, costs, d):
    """Work function of a fresh window started at state q_prev: initialized
    to w(x) = d(q_prev, x), then advanced through the window's cost rows."""
    wf = WorkFunctionTable(tuple(float(x) for x in d[q_prev]), 0)
    for row in costs:
        wf = work_function_step(wf, row, d)
    return wf


def support_point(wf, p, d):
    """Cheapest state through which the window could optimally end at p:
    the smallest-value x with wf(x) + d(x, p) == wf(p), smallest index on
    ties. p itself always qualifies."""
    feasible = [
        x for x in range(len(wf.values)) if wf[x] + d[x][p] == wf[p]
    ]
    return min(feasible, key=lambda x: (wf[x], x))


def emek_cycle(x_start, q, costs, d, initial_budget=None):
    """Serve one window greedily near the target state q under a doubling
    budget. Each step takes the cheapest move-plus-service state inside the
    ball around q of the current radius/budget R; whenever the accumulated
    cycle cost would exceed R, R doubles and the step is reconsidered over
    the larger ball. States with infinite cost are skipped unless every
    state in a maximal ball is infinite, in which case the walk stays put
    and absorbs the infinite cost. Returns (trajectory, cost, final R)."""
    n = len(d)
    if initial_budget is None:
        positive = [d[i][j] for i in range(n) for j in range(n) if d[i][j] > 0]
        initial_budget = min(positive) if positive else 1.0
    radius = float(initial_budget)
    full_radius = max(d[q])
    cycle_cost = 0.0
    x = x_start
    trajectory = []
    for row in costs:
        while True:
            ball = [y for y in range(n) if d[q][y] <= radius]
            finite = [
                (d[x][y] + row[y], y) for y in ball if math.isfinite(row[y])
            ]
            if finite:
                step_cost, target = min(finite)
            else:
                step_cost, target = row[x], x
            if cycle_cost + step_cost <= radius:
                break
            if radius >= full_radius and not math.isfinite(cycle_cost + step_cost):
                break
            radius *= 2
        cycle_cost += step_cost
        x = target
        trajectory.append(x)
    return tuple(trajectory), cycle_cost, radius


@dataclass(frozen=True)
class PredictionTrack:
    """Periodic predictions alongside the chosen support states and, when a
    reference trajectory is supplied, the states it occupied and the total
    prediction error eta = sum of d(p_i, o_i)."""

    p: tuple
    q: tuple
    o: tuple = None
    eta: float = None


@dataclass(frozen=True)
class FtspResult:
    """Outcome of a prediction-following run: the actual trajectory and its
    cost, plus the sum of window work-function values at the support states
    (the cost of the idealized comparison trajectory through them)."""

    trajectory: tuple
    cost: float
    support_cost: float
    track: PredictionTrack


def ftsp_run(instance, predictions, offline_states=None):
    """Follow periodic state predictions through their support points.

    The horizon is padded to a whole number of periods. Window i is served
    by a budget-doubling cycle around the previous support state; at its
    end prediction p_i resolves to the support state q_i of the window's
    work function, which anchors the next window. offline_states, when
    given, must hold the reference state at the end of each window and
    enables error metering."""
    instance = instance.padded()
    periods = instance.T // instance.a
    predictions = tuple(predictions)
    if len(predictions) != periods:
        raise ValueError("prediction count mismatch")
    if offline_states is not None:
        offline_states = tuple(offline_states)
        if len(offline_states) != periods:
            raise ValueError("prediction count mismatch")
    d = instance.d
    x = instance.x0
    q_prev = instance.x0
    trajectory = []
    cost = 0.0
    support_cost = 0.0
    supports = []
    for i in range(periods):
        window = instance.costs[i * instance.a : (i + 1) * instance.a]
        steps, window_cost, _ = emek_cycle(x, q_prev, window, d)
        trajectory.extend(steps)
        cost += window_cost
        x = steps[-1]
        wf = window_work_function(q_prev, window, d)
        q_i = support_point(wf, predictions[i], d)
        supports.append(q_i)
        support_cost += wf[q_i]
        q_prev = q_i
    eta = None
    if offline_states is not None:
        eta = float(
            sum(d[p][o] for p, o in zip(predictions, offline_states))
        )
    track = PredictionTrack(predictions, tuple(supports), offline_states, eta)
    return FtspResult(tuple(trajectory), cost, support_cost, track)


@dataclass(frozen=True)
class OfflineResult:
    """Exact offline optimum: the visited states x_1..x_T and total cost."""

    states: tuple
    cost: float
    x0: int

    def state_at(self, t):
        """State occupied after serving step t (t=0 gives the start)."""
        return self.x0 if t == 0 else self.states[t - 1]


def brute_force_offline(instance):
    """Cheapest trajectory by dynamic programming over (step, state); each
    step pays movement then service. Ties resolve to the smallest index."""
    if not instance.costs:
        return OfflineResult((), 0.0, instance.x0)
    n = instance.n
    d = _as_matrix(instance.d)
    best = np.full(n, INFINITY)
    best[instance.x0] = 0.0
    parents = []
    for row in instance.costs:
        via = best[:, None] + d
        parent = np.argmin(via, axis=0)
        best = np.min(via, axis=0) + np.asarray(row, dtype=float)
        parents.append(parent)
    final = int(np.argmin(best))
    total = float(best[final])
    states = [final]
    for parent in reversed(parents[1:]):
        states.append(int(parent[states[-1]]))
    states.reverse()
    return OfflineResult(tuple(states), total, instance.x0)


def random_instance(n, T, a=1, seed=0, inf_prob=0.0, x0=0):
    """Random instance: a metric from the shortest-path closure of random
    symmetric weights, and uniform costs with an optional chance of inf."""
    rng = random.Random(seed)
    d = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = round(rng.uniform(0.5, 3.0), 3)
    for m in range(n):
        for i in range(n):
            for j in range(n):
                through = d[i][m] + d[m][j]
                if through < d[i][j]:
                    d[i][j] = through
    costs = tuple(
        tuple(
            INFINITY if rng.random() < inf_prob else round(rng.uniform(0.0, 3.0), 3)
            for _ in range(n)
        )
        for _ in range(T)
    )
    return MtsInstance(n, tuple(tuple(row) for row in d), x0, costs, a)
