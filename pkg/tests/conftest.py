"""Shared fixtures: the random instance suite and the checked-in traces.

The instance suite is built once per session; several acceptance checks
share its precomputed offline schedules and one perfect-prediction run per
instance.
"""

import re
from pathlib import Path

import pytest

from predcache import RequestSequence, belady_predictor, belady_schedule, simulate
from predcache.fnr import fnr_policy
from predcache.traces import GENERATORS

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"


def load_trace(path):
    return RequestSequence.from_tokens(path.read_text(encoding="utf-8").split())


def suite_specs():
    """1,000 deterministic instance descriptions cycling through trace
    kinds, cache sizes 4/8/10, and lengths 100..500."""
    kinds = ("zipf", "walk", "uniform", "cycling")
    specs = []
    for i in range(1000):
        k = (4, 8, 10)[i % 3]
        kind = kinds[i % 4]
        length = 100 + (37 * i) % 401
        pages = k + 1 if kind == "cycling" else 3 * k
        specs.append(("%s-%04d" % (kind, i), kind, pages, length, i, k))
    return specs


@pytest.fixture(scope="session")
def random_suite():
    """[(instance_id, sequence, k, offline schedule)] for the 1,000-instance
    suite."""
    suite = []
    for instance_id, kind, pages, length, seed, k in suite_specs():
        seq = GENERATORS[kind](pages, length, seed=seed)
        suite.append((instance_id, seq, k, belady_schedule(seq, k)))
    return suite


@pytest.fixture(scope="session")
def fixture_traces():
    """Checked-in traces as {name: (sequence, cache size)}; the cache size
    comes from the _k<N> filename suffix."""
    out = {}
    for path in sorted((FIXTURE_DIR / "traces").glob("*_k*.txt")):
        k = int(re.search(r"_k(\d+)\.txt$", path.name).group(1))
        out[path.stem] = (load_trace(path), k)
    assert out, "fixture traces missing; run fixtures/regen.py"
    return out


@pytest.fixture(scope="session")
def perfect_runs(random_suite):
    """One run per suite instance with exact cache-content predictions:
    [(instance_id, faults, queries, opt)]."""
    runs = []
    for instance_id, seq, k, schedule in random_suite:
        predictor = belady_predictor(schedule)
        policy = fnr_policy(predictor, schedule=schedule)
        ledger, _ = simulate(policy, seq, k, seed=17)
        meter = predictor.meter
        runs.append((instance_id, ledger.cost, meter.query_count, schedule.opt_cost))
    return runs


@pytest.fixture(scope="session")
def brightkite_path():
    return FIXTURE_DIR / "brightkite_sample.tsv"


@pytest.fixture(scope="session")
def citibike_dir():
    return FIXTURE_DIR / "citibike"
