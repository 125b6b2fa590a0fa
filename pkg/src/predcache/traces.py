"""Synthetic request-sequence generators for experiments and tests."""

from __future__ import annotations

import random

from .core import RequestSequence


def cycling_trace(num_pages, length):
    """Round-robin over the page set; with one page more than the cache
    holds this is the classic worst case for deterministic eviction."""
    return RequestSequence.from_tokens(i % num_pages for i in range(length))


def uniform_trace(num_pages, length, seed=0):
    """Independent uniform draws over the page set."""
    rng = random.Random(seed)
    return RequestSequence.from_tokens(
        rng.randrange(num_pages) for _ in range(length)
    )


def zipf_trace(num_pages, length, exponent=0.8, seed=0):
    """Independent draws with probability proportional to rank^-exponent."""
    rng = random.Random(seed)
    weights = [(r + 1) ** -exponent for r in range(num_pages)]
    return RequestSequence.from_tokens(
        rng.choices(range(num_pages), weights=weights, k=length)
    )


def walk_trace(num_pages, length, seed=0, jump_prob=0.1):
    """Local random walk over the page set with occasional uniform jumps,
    giving traces with drifting working sets."""
    rng = random.Random(seed)
    page = 0
    out = []
    for _ in range(length):
        if rng.random() < jump_prob:
            page = rng.randrange(num_pages)
        else:
            page = (page + rng.choice((-1, 0, 1))) % num_pages
        out.append(page)
    return RequestSequence.from_tokens(out)


GENERATORS = {
    "cycling": lambda num_pages, length, seed=0: cycling_trace(num_pages, length),
    "uniform": uniform_trace,
    "zipf": lambda num_pages, length, seed=0: zipf_trace(num_pages, length, seed=seed),
    "walk": walk_trace,
}
