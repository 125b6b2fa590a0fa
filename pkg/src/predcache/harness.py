"""Experiment orchestration: dataset ingestion, benchmark runs, results CSV.

Benchmarks are described by an ExperimentConfig, resolved into request
sequences (public check-in or bike-trip datasets, or seeded synthetic
traces), and executed once per (instance, algorithm, trial) with RNG
streams derived from the base seed by hashing, so identical configs yield
identical result files byte for byte. Per-row results carry costs, the
competitive ratio against the offline optimum, and the predictor's query
and error meters; per-algorithm aggregate rows (mean and population
standard deviation over trials) are appended after each block.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import statistics
from dataclasses import dataclass, fields

from .core import RequestSequence, SimulationError, simulate
from .offline import belady_schedule
from .baselines import ftp_policy, ftpm_policy, lru_policy, marker_policy
from .predictors import (
    adversarial_predictor,
    belady_predictor,
    fitf_probabilistic,
    next_arrival_to_action,
    popu_predictor,
    synthetic_next_arrival,
)
from .fnr import GROWTH_FUNCTIONS, fnr_policy
from .fitf import fitf_policy
from .traces import GENERATORS

log = logging.getLogger("predcache.harness")


class DataError(Exception):
    """An input dataset is missing, unreadable, or unusable."""


SYNTHETIC_DATASETS = tuple(sorted(GENERATORS))
DATASETS = SYNTHETIC_DATASETS + ("brightkite", "citibike")
ALGORITHMS = ("lru", "marker", "ftp", "ftpm", "fnr", "fitf")
PREDICTORS = ("belady", "synthetic", "popu", "adversarial")

# Protocol constants for check-in ingestion: the usability filter runs at
# this cache size and fault threshold regardless of the experiment's k.
BRIGHTKITE_FILTER_K = 10
BRIGHTKITE_MIN_OPT = 50
BRIGHTKITE_MAX_USERS = 100
CITIBIKE_TRIM = 25000


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one benchmark run."""

    dataset: str
    k: int
    algorithms: tuple
    predictor: str = "belady"
    sigma: float = 0.0
    p: float = 0.0
    f: str = "lin"
    alpha: float = 1.0
    mode: str = "unbounded"
    a: int = 1
    b: float = 1.0
    trials: int = 10
    base_seed: int = 0
    output: str = None
    data_paths: tuple = ()
    num_instances: int = 10
    num_pages: int = None
    trace_length: int = 2000
    ratio_mode: str = "per_instance"

    def __post_init__(self):
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        object.__setattr__(self, "data_paths", tuple(self.data_paths))
        if self.dataset not in DATASETS:
            raise ValueError("unknown dataset %r" % (self.dataset,))
        if self.k < 1:
            raise ValueError("cache size must be positive")
        if not self.algorithms:
            raise ValueError("no algorithms selected")
        for name in self.algorithms:
            if name not in ALGORITHMS:
                raise ValueError("unknown algorithm %r" % (name,))
        if self.predictor not in PREDICTORS:
            raise ValueError("unknown predictor %r" % (self.predictor,))
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if not 0 <= self.p <= 1:
            raise ValueError("p must lie in [0, 1]")
        if not (callable(self.f) or self.f in GROWTH_FUNCTIONS):
            raise ValueError("unknown growth function %r" % (self.f,))
        if self.alpha < 1:
            raise ValueError("alpha must be at least 1")
        if self.mode not in ("unbounded", "a_separated"):
            raise ValueError("mode must be 'unbounded' or 'a_separated'")
        if self.a < 1:
            raise ValueError("a must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.num_instances < 1:
            raise ValueError("num_instances must be at least 1")
        if self.trace_length < 1:
            raise ValueError("trace_length must be at least 1")
        if self.ratio_mode not in ("per_instance", "total"):
            raise ValueError("ratio_mode must be 'per_instance' or 'total'")


@dataclass(frozen=True)
class ResultRow:
    """One simulation outcome, or an aggregate when instance_id is "ALL"
    and trial is "mean" or "stddev"."""

    dataset: str
    instance_id: str
    algorithm: str
    predictor: str
    sigma: float = None
    a: int = None
    f: str = None
    b: float = None
    trial: object = 0
    alg_cost: float = None
    opt_cost: float = None
    ratio: float = None
    num_queries: int = None
    num_reported_pages: int = None
    eta: float = None


RESULT_FIELDS = tuple(f.name for f in fields(ResultRow))


def derive_seed(base_seed, instance_id, algorithm, trial, role):
    """Stable per-row seed: a hash of the run coordinates, so adding
    instances, algorithms, or trials never shifts other rows' streams."""
    key = "%r|%s|%s|%r|%s" % (base_seed, instance_id, algorithm, trial, role)
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def ingest_brightkite(path):
    """One request sequence per user from a tab-separated check-in file
    (user, timestamp, latitude, longitude, location id), chronological,
    keeping the first 100 longest sequences whose offline optimum at the
    protocol cache size is at least 50 faults."""
    per_user = {}
    skipped = 0
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError("cannot read check-in file %s: %s" % (path, exc)) from None
    with handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 5 or not parts[0] or not parts[1] or not parts[4]:
                skipped += 1
                continue
            per_user.setdefault(parts[0], []).append((parts[1], parts[4]))
    if skipped:
        log.warning("skipped %d malformed check-in rows in %s", skipped, path)
    selected = []
    for user in sorted(per_user, key=lambda u: (-len(per_user[u]), u)):
        if len(selected) == BRIGHTKITE_MAX_USERS:
            break
        rows = sorted(per_user[user])
        seq = RequestSequence.from_tokens(loc for _, loc in rows)
        if belady_schedule(seq, BRIGHTKITE_FILTER_K).opt_cost >= BRIGHTKITE_MIN_OPT:
            selected.append(seq)
    if not selected:
        raise DataError("no usable check-in sequences in %s" % (path,))
    return selected


def ingest_citibike(paths):
    """One request sequence per monthly trip CSV, reading the start-station
    column (header matched case-insensitively) and trimming each sequence
    to the protocol length."""
    sequences = []
    for path in paths:
        try:
            handle = open(path, encoding="utf-8", newline="")
        except OSError as exc:
            raise DataError("cannot read trip file %s: %s" % (path, exc)) from None
        with handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None:
                raise DataError("empty trip file %s" % (path,))
            column = None
            for i, name in enumerate(header):
                if name.strip().strip('"').lower() == "start station id":
                    column = i
                    break
            if column is None:
                raise DataError("no start station id column in %s" % (path,))
            tokens = []
            skipped = 0
            for parts in reader:
                if len(parts) <= column or not parts[column].strip():
                    skipped += 1
                    continue
                tokens.append(parts[column].strip())
                if len(tokens) == CITIBIKE_TRIM:
                    break
        if skipped:
            log.warning("skipped %d malformed trip rows in %s", skipped, path)
        if not tokens:
            raise DataError("no trips in %s" % (path,))
        sequences.append(RequestSequence.from_tokens(tokens))
    return sequences


def _default_pages(config):
    if config.num_pages is not None:
        return config.num_pages
    if config.dataset == "cycling":
        return config.k + 1
    return 4 * config.k


def _instances(config):
    """Resolve the config's dataset into [(instance_id, sequence)]."""
    if config.dataset == "brightkite":
        if len(config.data_paths) != 1:
            raise ValueError("brightkite needs exactly one check-in file")
        seqs = ingest_brightkite(config.data_paths[0])
        return [("brightkite-%03d" % i, seq) for i, seq in enumerate(seqs)]
    if config.dataset == "citibike":
        if not config.data_paths:
            raise ValueError("citibike needs monthly trip files")
        seqs = ingest_citibike(config.data_paths)
        return [("citibike-%02d" % i, seq) for i, seq in enumerate(seqs)]
    generator = GENERATORS[config.dataset]
    pages = _default_pages(config)
    out = []
    for i in range(config.num_instances):
        instance_id = "%s-%03d" % (config.dataset, i)
        seed = derive_seed(config.base_seed, instance_id, "trace", 0, "trace")
        out.append((instance_id, generator(pages, config.trace_length, seed=seed)))
    return out


def _next_arrival_predictor(config, seq, seed):
    if config.predictor == "synthetic":
        return synthetic_next_arrival(seq, config.sigma, seed)
    if config.predictor == "popu":
        return popu_predictor()
    raise ValueError(
        "predictor %r does not produce arrival predictions" % (config.predictor,)
    )


def _action_predictor(config, seq, k, schedule, seed):
    if config.predictor == "belady":
        return belady_predictor(schedule)
    if config.predictor == "adversarial":
        return adversarial_predictor(seed)
    return next_arrival_to_action(
        _next_arrival_predictor(config, seq, seed), k=k, seed=seed
    )


def _build_policy(name, config, seq, schedule, policy_seed, predictor_seed):
    """Build one policy instance; returns (policy, meter handle or None)."""
    k = config.k
    if name == "lru":
        return lru_policy(), None
    if name == "marker":
        return marker_policy(seed=policy_seed), None
    if name == "ftp":
        pred = _action_predictor(config, seq, k, schedule, predictor_seed)
        pred.attach_reference(schedule)
        return ftp_policy(pred), pred
    if name == "ftpm":
        nap = _next_arrival_predictor(config, seq, predictor_seed)
        return ftpm_policy(nap, seed=policy_seed), None
    if name == "fnr":
        pred = _action_predictor(config, seq, k, schedule, predictor_seed)
        pred.attach_reference(schedule)
        policy = fnr_policy(
            pred,
            f=config.f,
            alpha=config.alpha,
            mode=config.mode,
            a=config.a,
            schedule=schedule,
        )
        return policy, pred
    if name == "fitf":
        oracle = fitf_probabilistic(config.p, seed=predictor_seed)
        return fitf_policy(oracle, b=config.b), oracle
    raise ValueError("unknown algorithm %r" % (name,))


def _meter_columns(handle):
    """(num_queries, num_reported_pages, eta) for a predictor handle; the
    furthest-in-future oracle reports one page per query and counts its
    wrong answers as the error figure."""
    if handle is None:
        return 0, 0, None
    if hasattr(handle, "phi"):
        return handle.query_count, handle.query_count, float(handle.phi)
    m = handle.meter
    return m.query_count, m.reported_page_count, float(m.eta)


def _predictor_label(name, config):
    if name in ("lru", "marker"):
        return None
    if name == "fitf":
        return "fitf_probabilistic"
    return config.predictor


def _aggregate(value_lists):
    """Mean and population standard deviation per column over trials."""
    means, devs = [], []
    for values in value_lists:
        if not values or any(v is None for v in values):
            means.append(None)
            devs.append(None)
        else:
            means.append(float(statistics.fmean(values)))
            devs.append(float(statistics.pstdev(values)))
    return means, devs


def run_benchmark(config):
    """Execute the config and return per-run rows plus, after each
    algorithm's block, its mean and stddev aggregate rows."""
    instances = [
        (instance_id, seq, belady_schedule(seq, config.k))
        for instance_id, seq in _instances(config)
    ]
    rows = []
    for name in config.algorithms:
        label = _predictor_label(name, config)
        tag = dict(
            dataset=config.dataset,
            algorithm=name,
            predictor=label,
            sigma=config.sigma,
            a=config.a,
            f=config.f if isinstance(config.f, str) else "custom",
            b=config.b,
        )
        per_trial = {t: [] for t in range(config.trials)}
        for instance_id, seq, schedule in instances:
            for trial in range(config.trials):
                policy_seed = derive_seed(
                    config.base_seed, instance_id, name, trial, "policy"
                )
                predictor_seed = derive_seed(
                    config.base_seed, instance_id, name, trial, "predictor"
                )
                policy, meter = _build_policy(
                    name, config, seq, schedule, policy_seed, predictor_seed
                )
                try:
                    ledger, _ = simulate(policy, seq, config.k, seed=policy_seed)
                except SimulationError as exc:
                    log.error(
                        "skipping %s on %s trial %d: %s", name, instance_id, trial, exc
                    )
                    continue
                alg_cost = float(ledger.cost)
                opt_cost = float(schedule.opt_cost)
                queries, reported, eta = _meter_columns(meter)
                row = ResultRow(
                    instance_id=instance_id,
                    trial=trial,
                    alg_cost=alg_cost,
                    opt_cost=opt_cost,
                    ratio=alg_cost / opt_cost,
                    num_queries=queries,
                    num_reported_pages=reported,
                    eta=eta,
                    **tag,
                )
                rows.append(row)
                per_trial[trial].append(row)
        ratios, costs, opts, queries, reported, etas = [], [], [], [], [], []
        for trial in range(config.trials):
            batch = per_trial[trial]
            if not batch:
                continue
            if config.ratio_mode == "total":
                ratios.append(
                    sum(r.alg_cost for r in batch) / sum(r.opt_cost for r in batch)
                )
            else:
                ratios.append(statistics.fmean(r.ratio for r in batch))
            costs.append(sum(r.alg_cost for r in batch))
            opts.append(sum(r.opt_cost for r in batch))
            queries.append(sum(r.num_queries for r in batch))
            reported.append(sum(r.num_reported_pages for r in batch))
            etas.append(
                None
                if any(r.eta is None for r in batch)
                else sum(r.eta for r in batch)
            )
        if not ratios:
            continue
        means, devs = _aggregate([ratios, costs, opts, queries, reported, etas])
        for kind, stats in (("mean", means), ("stddev", devs)):
            rows.append(
                ResultRow(
                    instance_id="ALL",
                    trial=kind,
                    ratio=stats[0],
                    alg_cost=stats[1],
                    opt_cost=stats[2],
                    num_queries=stats[3],
                    num_reported_pages=stats[4],
                    eta=stats[5],
                    **tag,
                )
            )
    return rows


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_cell(name, text):
    if text == "":
        return None
    if name in ("sigma", "b", "alg_cost", "opt_cost", "ratio", "eta"):
        return float(text)
    if name in ("a", "num_queries", "num_reported_pages"):
        return float(text) if "." in text or "e" in text else int(text)
    if name == "trial":
        try:
            return int(text)
        except ValueError:
            return text
    return text


def write_results_csv(rows, path):
    """Write rows with the header exactly matching the row field names."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(RESULT_FIELDS)
            for row in rows:
                writer.writerow([_cell(getattr(row, name)) for name in RESULT_FIELDS])
    except OSError as exc:
        raise DataError("cannot write results to %s: %s" % (path, exc)) from None


def read_results_csv(path):
    """Inverse of write_results_csv."""
    try:
        with open(path, encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None or tuple(header) != RESULT_FIELDS:
                raise DataError("unexpected results header in %s" % (path,))
            return [
                ResultRow(
                    **{
                        name: _parse_cell(name, value)
                        for name, value in zip(RESULT_FIELDS, line)
                    }
                )
                for line in reader
                if line
            ]
    except OSError as exc:
        raise DataError("cannot read results from %s: %s" % (path, exc)) from None
