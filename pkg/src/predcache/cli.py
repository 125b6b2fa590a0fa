"""Command-line interface: benchmarks, task-system runs, trace generation,
and offline optimum costs.

Exit codes: 0 on success, 1 on configuration errors (bad flags or
parameter ranges), 2 on data errors (missing or malformed input files).
"""

from __future__ import annotations

import argparse
import sys

from .core import RequestSequence, SimulationError
from .offline import belady_schedule
from .harness import (
    DATASETS,
    DataError,
    ExperimentConfig,
    PREDICTORS,
    run_benchmark,
    write_results_csv,
)
from .mts import brute_force_offline, format_instance, ftsp_run, parse_instance, random_instance
from .traces import GENERATORS


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the documented contract
    # reserves 2 for data errors, so flag problems become ValueError -> 1.
    def error(self, message):
        raise ValueError(message)


def _read_text(path, what):
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise DataError("cannot read %s %s: %s" % (what, path, exc)) from None


def _read_trace(path):
    tokens = _read_text(path, "trace").split()
    if not tokens:
        raise DataError("empty trace file %s" % (path,))
    return RequestSequence.from_tokens(tokens)


def build_parser():
    parser = _Parser(prog="predcache", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run caching benchmarks")
    bench.add_argument("--dataset", required=True, choices=DATASETS)
    bench.add_argument("--k", type=int, required=True, help="cache size (>= 1)")
    bench.add_argument(
        "--algorithms",
        required=True,
        help="comma-separated subset of lru,marker,ftp,ftpm,fnr,fitf",
    )
    bench.add_argument("--predictor", default="belady", choices=PREDICTORS)
    bench.add_argument(
        "--sigma", type=float, default=0.0, help="synthetic noise level (>= 0)"
    )
    bench.add_argument(
        "--p", type=float, default=0.0, help="oracle error rate in [0, 1]"
    )
    bench.add_argument(
        "--f", default="lin", help="query growth function: exp, quad, lin, zero"
    )
    bench.add_argument("--alpha", type=float, default=1.0, help="switch slack (>= 1)")
    bench.add_argument("--mode", default="unbounded", choices=("unbounded", "a_separated"))
    bench.add_argument("--a", type=int, default=1, help="min steps between queries (>= 1)")
    bench.add_argument("--b", type=float, default=1.0, help="oracle budget in [1, log2 k]")
    bench.add_argument("--trials", type=int, default=10)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--output", default=None, help="results CSV path")
    bench.add_argument(
        "--data",
        nargs="*",
        default=[],
        help="dataset files (brightkite: one check-in file; citibike: monthly CSVs)",
    )
    bench.add_argument("--instances", type=int, default=10, help="synthetic instances")
    bench.add_argument("--pages", type=int, default=None, help="synthetic page count")
    bench.add_argument("--length", type=int, default=2000, help="synthetic trace length")
    bench.add_argument("--ratio-mode", default="per_instance", choices=("per_instance", "total"))

    mts = sub.add_parser("mts", help="run the prediction-following task-system algorithm")
    mts.add_argument("--instance", required=True, help="instance file (plain text)")
    mts.add_argument("--predictions", default=None, help="file with one state per period")
    mts.add_argument(
        "--perfect",
        action="store_true",
        help="predict the offline optimum's own states",
    )

    gen = sub.add_parser("gen", help="generate a synthetic trace or instance")
    gen.add_argument("--kind", required=True, choices=tuple(sorted(GENERATORS)) + ("mts",))
    gen.add_argument("--pages", type=int, default=64)
    gen.add_argument("--length", type=int, default=2000)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--states", type=int, default=4, help="mts state count")
    gen.add_argument("--period", type=int, default=1, help="mts prediction period")
    gen.add_argument("--inf-prob", type=float, default=0.0, help="mts forbidden-state rate")
    gen.add_argument("--output", required=True)

    opt = sub.add_parser("opt", help="print the offline optimum cost of a trace")
    opt.add_argument("--trace", required=True)
    opt.add_argument("--k", type=int, required=True)
    return parser


def _cmd_bench(args):
    config = ExperimentConfig(
        dataset=args.dataset,
        k=args.k,
        algorithms=tuple(name.strip() for name in args.algorithms.split(",") if name.strip()),
        predictor=args.predictor,
        sigma=args.sigma,
        p=args.p,
        f=args.f,
        alpha=args.alpha,
        mode=args.mode,
        a=args.a,
        b=args.b,
        trials=args.trials,
        base_seed=args.seed,
        output=args.output,
        data_paths=tuple(args.data),
        num_instances=args.instances,
        num_pages=args.pages,
        trace_length=args.length,
        ratio_mode=args.ratio_mode,
    )
    rows = run_benchmark(config)
    if args.output:
        write_results_csv(rows, args.output)
        print("wrote %d rows to %s" % (len(rows), args.output))
    for row in rows:
        if row.instance_id == "ALL" and row.trial == "mean":
            print(
                "%s: mean ratio %.4f, mean queries %.1f"
                % (row.algorithm, row.ratio, row.num_queries)
            )
    return 0


def _cmd_mts(args):
    instance = parse_instance(_read_text(args.instance, "instance"))
    padded = instance.padded()
    periods = padded.T // padded.a
    offline = brute_force_offline(padded)
    offline_states = tuple(offline.state_at((i + 1) * padded.a) for i in range(periods))
    if args.perfect:
        predictions = offline_states
    elif args.predictions:
        tokens = _read_text(args.predictions, "predictions").split()
        try:
            predictions = tuple(int(tok) for tok in tokens)
        except ValueError:
            raise DataError("predictions must be integer states") from None
    else:
        raise ValueError("provide --predictions FILE or --perfect")
    result = ftsp_run(padded, predictions, offline_states=offline_states)
    print("trajectory cost %r" % (result.cost,))
    print("support cost %r" % (result.support_cost,))
    print("offline cost %r" % (offline.cost,))
    print("eta %r" % (result.track.eta,))
    return 0


def _cmd_gen(args):
    if args.kind == "mts":
        instance = random_instance(
            args.states, args.length, args.period, seed=args.seed, inf_prob=args.inf_prob
        )
        payload = format_instance(instance)
    else:
        seq = GENERATORS[args.kind](args.pages, args.length, seed=args.seed)
        payload = "\n".join(str(page) for page in seq.requests) + "\n"
    try:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(payload)
    except OSError as exc:
        raise DataError("cannot write %s: %s" % (args.output, exc)) from None
    print("wrote %s" % (args.output,))
    return 0


def _cmd_opt(args):
    seq = _read_trace(args.trace)
    if args.k < 1:
        raise ValueError("cache size must be positive")
    print(belady_schedule(seq, args.k).opt_cost)
    return 0


_COMMANDS = {"bench": _cmd_bench, "mts": _cmd_mts, "gen": _cmd_gen, "opt": _cmd_opt}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except DataError as exc:
        print("data error: %s" % (exc,), file=sys.stderr)
        return 2
    except SimulationError as exc:
        print("data error: %s" % (exc,), file=sys.stderr)
        return 2
    except ValueError as exc:
        print("config error: %s" % (exc,), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
