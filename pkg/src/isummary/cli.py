"""Command-line entry point: summarize, evaluate, oracle and synth commands.

Exit codes: 0 on success, 2 on usage errors, 3 on data errors (the error
name is printed on stderr).
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

from . import steiner, summarizer, synth, workload
from .coverage import CoverageConfig, InsufficientWorkload, evaluate, write_csv
from .parser import ParseError, parse_term
from .rng import XorShift64Star

DATA_ERRORS = (
    workload.IoError,
    workload.EmptyWorkload,
    summarizer.NoRelevantQueries,
    InsufficientWorkload,
    steiner.Infeasible,
    steiner.SizeLimit,
    steiner.Disconnected,
)


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return number


def _int_list(value: str) -> list[int]:
    try:
        return [int(part) for part in value.split(",") if part]
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected a comma-separated integer list") from exc


def _add_log_options(sub):
    sub.add_argument("--log", required=True, help="query log path")
    sub.add_argument("--format", default=workload.RAW_LINES, choices=workload.FORMATS,
                     help="log encoding (default: raw-lines)")
    sub.add_argument("--tsv-column", type=int, default=None,
                     help="0-based column holding the query text (tsv format only)")
    sub.add_argument("--base-prefix", default=None,
                     help="IRI prefix applied to bare names in queries and seeds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isummary",
        description="Workload-based personalized knowledge-graph summaries",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    cmd = commands.add_parser("summarize", help="build one personalized summary")
    _add_log_options(cmd)
    cmd.add_argument("--seed", action="append", required=True, dest="seeds",
                     help="seed term; repeat for multiple seeds")
    cmd.add_argument("--k", type=_positive_int, required=True, help="node budget")
    cmd.add_argument("--strategy", default=summarizer.ISUMMARY,
                     choices=summarizer.STRATEGIES)
    cmd.add_argument("--random-seed", type=int, default=0,
                     help="stream seed for the random strategy")
    cmd.add_argument("--out", default=None, help="N-Triples output path (default: stdout)")
    cmd.add_argument("--report", default=None, help="JSON report path")

    cmd = commands.add_parser("evaluate", help="run the fold-based coverage protocol")
    _add_log_options(cmd)
    cmd.add_argument("--k", type=_int_list, default=[5, 10, 15],
                     help="comma-separated budgets (default: 5,10,15)")
    cmd.add_argument("--folds", type=_positive_int, default=10)
    cmd.add_argument("--split", type=float, default=0.8, help="train fraction")
    cmd.add_argument("--sample-seeds", type=_positive_int, default=10)
    cmd.add_argument("--rng", type=int, default=42)
    cmd.add_argument("--strategies", default="isummary,random",
                     help="comma-separated strategy list")
    cmd.add_argument("--w-node", type=float, default=0.5)
    cmd.add_argument("--w-edge", type=float, default=0.5)
    cmd.add_argument("--out", default=None, help="CSV output path (default: stdout)")

    cmd = commands.add_parser("oracle", help="exact-vs-approximation quality check")
    cmd.add_argument("--instances", default=None,
                     help="directory of fixture instance files (*.txt)")
    cmd.add_argument("--trials", type=int, default=200,
                     help="number of random instances to add")
    cmd.add_argument("--rng", type=int, default=7)
    cmd.add_argument("--out", default=None, help="CSV output path (default: stdout)")

    cmd = commands.add_parser("synth", help="generate a synthetic workload")
    cmd.add_argument("--n-queries", type=_positive_int, default=50000)
    cmd.add_argument("--classes", type=_positive_int, default=400)
    cmd.add_argument("--predicates", type=_positive_int, default=1300)
    cmd.add_argument("--instances", type=_positive_int, default=100000)
    cmd.add_argument("--skew", type=float, default=1.0)
    cmd.add_argument("--mean-patterns", type=float, default=3.0)
    cmd.add_argument("--rng", type=int, default=1)
    cmd.add_argument("--out", required=True, help="workload output path")
    return parser


def _load(args) -> workload.WorkloadStore:
    return workload.load_workload(
        args.log, format=args.format, tsv_column=args.tsv_column,
        base_prefix=args.base_prefix,
    )


def _cmd_summarize(args) -> int:
    try:
        seeds = [parse_term(text, base_prefix=args.base_prefix) for text in args.seeds]
    except ParseError as exc:
        print(f"InvalidRequest: bad seed term: {exc}", file=sys.stderr)
        return 2
    store = _load(args)
    try:
        request = summarizer.SummaryRequest(
            seeds, args.k, args.strategy, random_seed=args.random_seed
        )
    except summarizer.InvalidRequest as exc:
        print(f"InvalidRequest: {exc}", file=sys.stderr)
        return 2
    summary = summarizer.summarize(store, request)
    triples = summarizer.to_ntriples(summary)
    if args.out:
        Path(args.out).write_text(triples, encoding="utf-8")
    else:
        sys.stdout.write(triples)
    if args.report:
        Path(args.report).write_text(summarizer.to_json(summary), encoding="utf-8")
    return 0


def _cmd_evaluate(args) -> int:
    strategies = [s for s in args.strategies.split(",") if s]
    for strategy in strategies:
        if strategy not in summarizer.STRATEGIES:
            print(f"InvalidRequest: unknown strategy {strategy!r}", file=sys.stderr)
            return 2
    try:
        config = CoverageConfig(
            w_node=args.w_node, w_edge=args.w_edge, split_ratio=args.split,
            folds=args.folds, sample_seeds=args.sample_seeds, rng_seed=args.rng,
        )
    except ValueError as exc:
        print(f"InvalidRequest: {exc}", file=sys.stderr)
        return 2
    store = _load(args)
    result = evaluate(store, config, args.k, strategies)
    for warning in result.warnings:
        print(warning, file=sys.stderr)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(result.rows, fh)
    else:
        write_csv(result.rows, sys.stdout)
    print(
        f"mean coverage {result.fold_stats.mean:.6f}"
        f" (std {result.fold_stats.std:.6f} over {len(result.fold_stats.fold_means)} folds)",
        file=sys.stderr,
    )
    return 0


def _oracle_rows(args):
    instances = []
    if args.instances:
        directory = Path(args.instances)
        if not directory.is_dir():
            raise workload.IoError(f"not a directory: {directory}")
        for file in sorted(directory.glob("*.txt")):
            instances.append((file.name, steiner.read_instance(file)))
    rng = XorShift64Star(args.rng)
    for trial in range(args.trials):
        instances.append((f"random-{trial}", steiner.random_instance(rng)))

    for name, instance in instances:
        costs = steiner.normalize_to_min_cost(instance.graph, instance.terminals).weights
        try:
            exact = steiner.exact_solve(instance)
        except steiner.Infeasible:
            yield (name, instance.graph.node_count, instance.k, "", "", "", "infeasible")
            continue
        approx = steiner.chins(instance, costs)
        exact_cost = steiner.tree_cost(costs, exact)
        approx_cost = steiner.tree_cost(costs, approx)
        if exact_cost > 0:
            ratio = approx_cost / exact_cost
            ok = ratio <= 2.0
        else:
            ratio = 0.0 if approx_cost == 0 else float("inf")
            ok = approx_cost == 0
        yield (
            name, instance.graph.node_count, instance.k,
            f"{exact_cost:.6f}", f"{approx_cost:.6f}", f"{ratio:.6f}",
            "ok" if ok else "violated",
        )


def _cmd_oracle(args) -> int:
    rows = list(_oracle_rows(args))
    header = ("instance", "nodes", "k", "exact_cost", "chins_cost", "ratio", "status")

    def emit(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
    else:
        emit(sys.stdout)
    solved = [r for r in rows if r[6] != "infeasible"]
    violated = sum(1 for r in solved if r[6] == "violated")
    print(
        f"{len(solved)} instances solved, {violated} above the factor-2 envelope",
        file=sys.stderr,
    )
    return 0


def _cmd_synth(args) -> int:
    spec = synth.SyntheticSpec(
        n_queries=args.n_queries, classes=args.classes, predicates=args.predicates,
        instances=args.instances, skew=args.skew, mean_patterns=args.mean_patterns,
        rng_seed=args.rng,
    )
    count = synth.generate_synthetic(spec, args.out)
    print(f"wrote {count} queries to {args.out}", file=sys.stderr)
    return 0


_COMMANDS = {
    "summarize": _cmd_summarize,
    "evaluate": _cmd_evaluate,
    "oracle": _cmd_oracle,
    "synth": _cmd_synth,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    threads = os.environ.get("ISUMMARY_THREADS")
    if threads is not None:
        try:
            if int(threads) < 1:
                raise ValueError
        except ValueError:
            print("InvalidRequest: ISUMMARY_THREADS must be a positive integer",
                  file=sys.stderr)
            return 2
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _COMMANDS[args.command](args)
    except DATA_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
