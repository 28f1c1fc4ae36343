"""Command-line front end.

Every subcommand writes JSON or CSV to ``--out`` (stdout by default). Errors
are reported as a JSON object on stderr with a machine-readable code; exit
status is 0 on success, 2 for an infeasible or malformed query, 3 when a
budget or time limit cut the run short, and 4 for I/O and input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .bench import ALGORITHMS, run_bench, solve
from .densest import DEFAULT_BUDGET, Query, StdfAnswer
from .errors import QueryError, StdfError
from .generate import synthetic_network
from .maxflow import max_temporal_flow, max_flow_sets, naive_augmenting_paths
from .network import INF, StaticFlowNetwork, TemporalFlowNetwork, ingest_edge_list, window
from .oracle import max_temporal_flow_lp, project_flow, stdf_bruteforce
from .preprocess import classify, compress, reduce, transform

EXIT_OK, EXIT_QUERY, EXIT_BUDGET, EXIT_IO = 0, 2, 3, 4


@dataclass
class RunConfig:
    input: str | None = None
    window: tuple[int, int] | None = None
    query: str | None = None
    algo: str = "dc"
    k: int | None = None
    budget: int = DEFAULT_BUDGET
    exact_wcc_threshold: int = 6
    time_limit_ms: int | None = None
    out: str | None = None
    trace: str | None = None
    seed: int = 0
    timings: bool = False


def _window_arg(text: str) -> tuple[int, int]:
    try:
        start, end = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:END, got {text!r}") from None
    if start > end:
        raise argparse.ArgumentTypeError(f"empty window {text!r}")
    return start, end


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--input", default=d(None), help="edge-list CSV (src,dst,capacity,timestamp)")
    parser.add_argument("--window", type=_window_arg, default=d(None), metavar="START:END", help="keep edges with START <= timestamp <= END")
    parser.add_argument("--out", default=d(None), help="output file (default stdout)")
    parser.add_argument("--seed", type=int, default=d(0), help="seed for generated data")
    parser.add_argument("--time-limit-ms", type=_positive, default=d(None), help="anytime limit for exact enumeration")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stdflow", description="Densest flow queries on temporal transaction networks.")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, metavar="{transform,maxflow,stdf,bench}")

    p = sub.add_parser("transform", parents=[common], help="emit the time-expanded network as CSV")
    p.add_argument("--query", help="reduce relative to this query first")
    p.add_argument("--compress", action="store_true", help="merge copies where flow is preserved")
    p.add_argument("--sidecar", help="write the copy index JSON here")

    p = sub.add_parser("maxflow", parents=[common], help="maximum flow between two labelled vertices")
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--sink", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--temporal", action="store_true", help="respect timestamps via the time-expanded network")
    mode.add_argument("--naive", action="store_true", help="greedy temporal augmentation without rerouting")

    p = sub.add_parser("stdf", parents=[common], help="answer a densest flow query")
    p.add_argument("--query", required=True, help='JSON {"sources": [...], "sinks": [...], "k": int}')
    p.add_argument("--k", type=_positive, help="override the query's k")
    p.add_argument("--algo", choices=ALGORITHMS, default="dc")
    p.add_argument("--trace", help="write the peeling trace JSON here")
    p.add_argument("--exact-wcc-threshold", type=int, default=6, help="peel-dc enumerates components up to this many terminals")
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET, help="max subsets per exact enumeration")
    p.add_argument("--timings", action="store_true", help="include wall-clock times (makes output non-reproducible)")

    p = sub.add_parser("bench", parents=[common], help="compare all algorithms on random queries")
    p.add_argument("--n", type=_positive, default=8, help="terminals per query (half sources, half sinks)")
    p.add_argument("--queries", type=_positive, default=5)
    p.add_argument("--vertices", type=_positive, default=40, help="size of the synthetic network when --input is absent")
    p.add_argument("--edges", type=_positive, default=120)
    p.add_argument("--motif-density", type=float, default=0.2)
    p.add_argument("--exact-wcc-threshold", type=int, default=6)
    p.add_argument("--no-timings", action="store_true", help="omit the elapsed column so output is byte-reproducible")

    # debugging aid, deliberately left out of --help
    p = sub.add_parser("oracle", parents=[common])
    p.add_argument("--query", help="brute-force a densest flow query")
    p.add_argument("--source", type=int)
    p.add_argument("--sink", type=int)
    return parser


# ---------------------------------------------------------------------------

def _load_network(args) -> TemporalFlowNetwork:
    if args.input is None:
        raise QueryError("--input is required")
    with open(args.input, encoding="utf-8", newline="") as fh:
        tfn = ingest_edge_list(fh)
    if args.window is not None:
        tfn = window(tfn, *args.window)
    return tfn


def _load_query(path: str, k: int | None) -> Query:
    return Query.from_json(Path(path).read_text(encoding="utf-8"), k)


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _density(ans: StdfAnswer) -> dict:
    d = ans.density
    return {"num": d.numerator, "den": d.denominator, "decimal": f"{float(d):.6f}"}


def cmd_transform(args) -> int:
    tfn = _load_network(args)
    if args.query:
        q = _load_query(args.query, None)
        tfn = reduce(tfn, q.sources, q.sinks)
    rtfn = transform(tfn)
    if args.compress:
        rtfn = compress(rtfn)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("src", "dst", "capacity", "kind"))
    for x, (u, v, c) in enumerate(rtfn.net.edges()):
        writer.writerow((u, v, "inf" if c == INF else c, "horizontal" if rtfn.tr_inv[x] else "vertical"))
    _emit(args, buf.getvalue())
    if args.sidecar:
        doc = {
            "vertices": [
                {"id": x, "copies": [[tfn.label(v), ts] for v, ts in rtfn.members[x]], "color": classify(rtfn, x).value}
                for x in range(rtfn.net.num_vertices)
            ],
            "copies": {str(tfn.label(v)): list(c) for v, c in enumerate(rtfn.copies) if c},
            "tr": [
                {"src": tfn.label(e.src), "dst": tfn.label(e.dst), "timestamp": e.timestamp, "edge": rtfn.tr[i]}
                for i, e in enumerate(tfn.edges)
            ],
        }
        Path(args.sidecar).write_text(_dumps(doc), encoding="utf-8")
    return EXIT_OK


def cmd_maxflow(args) -> int:
    tfn = _load_network(args)
    if args.source == args.sink:
        raise QueryError("source and sink must differ")
    edge_flow = [0] * tfn.num_edges
    if args.naive:
        value = 0
        for path, width in naive_augmenting_paths(tfn, args.source, args.sink):
            value += width
            for i in path:
                edge_flow[i] += width
    elif args.temporal:
        # per-edge flows only survive projection from an uncompressed network
        result = max_temporal_flow(tfn, args.source, args.sink, do_compress=False)
        value = result.value
        flows = project_flow(result.rtfn, result.flow).flows
        # the result lives on the reduced network; map its edges back by endpoints
        index = {(e.src, e.dst): i for i, e in enumerate(tfn.edges)}
        red = result.rtfn.tfn
        for j, e in enumerate(red.edges):
            i = index[tfn.vertex(red.label(e.src)), tfn.vertex(red.label(e.dst))]
            edge_flow[i] = flows[j]
    else:
        s, t = tfn.vertex(args.source), tfn.vertex(args.sink)
        if s is None or t is None:
            value = 0
        else:
            net = StaticFlowNetwork(tfn.num_vertices, ((e.src, e.dst, e.capacity) for e in tfn.edges))
            flow = max_flow_sets(net, [s], [t])
            value, edge_flow = flow.value, list(flow.edge_flow)
    edges = [
        {"src": tfn.label(e.src), "dst": tfn.label(e.dst), "timestamp": e.timestamp, "flow": f}
        for e, f in zip(tfn.edges, edge_flow)
        if f
    ]
    _emit(args, _dumps({"value": value, "edges": edges}))
    return EXIT_OK


def run(config: RunConfig) -> tuple[dict, int]:
    """Execute one densest-flow query; returns the JSON report and exit status."""
    ns = argparse.Namespace(input=config.input, window=config.window)
    started = time.perf_counter()
    tfn = _load_network(ns)
    query = _load_query(config.query, config.k)
    deadline = None if config.time_limit_ms is None else time.monotonic() + config.time_limit_ms / 1000
    ans = solve(config.algo, tfn, query, budget=config.budget, deadline=deadline, exact_wcc_threshold=config.exact_wcc_threshold)
    report = {
        "algorithm": config.algo,
        "k": query.k,
        "sources": list(ans.sources),
        "sinks": list(ans.sinks),
        "value": ans.value,
        "density": _density(ans),
        "timed_out": ans.timed_out,
        "maxflow_calls": ans.details.get("maxflow_calls"),
        "sizes": ans.details.get("sizes"),
        "per_wcc": ans.details.get("per_wcc", []),
    }
    if config.timings:
        report["elapsed_ms"] = round((time.perf_counter() - started) * 1000, 3)
    if config.trace:
        traces = ans.details.get("traces") or ([ans.details["trace"]] if "trace" in ans.details else [])
        Path(config.trace).write_text(_dumps({"algorithm": config.algo, "traces": traces}), encoding="utf-8")
    return report, (EXIT_BUDGET if ans.timed_out else EXIT_OK)


def cmd_stdf(args) -> int:
    config = RunConfig(
        input=args.input, window=args.window, query=args.query, algo=args.algo, k=args.k,
        budget=args.budget, exact_wcc_threshold=args.exact_wcc_threshold,
        time_limit_ms=args.time_limit_ms, out=args.out, trace=args.trace, seed=args.seed,
        timings=args.timings,
    )
    report, status = run(config)
    _emit(args, _dumps(report))
    return status


def cmd_bench(args) -> int:
    rng = random.Random(args.seed)
    if args.input:
        tfn = _load_network(args)
    else:
        tfn = synthetic_network(rng, args.vertices, args.edges, motif_density=args.motif_density)
        if args.window is not None:
            tfn = window(tfn, *args.window)
    rows = run_bench(
        tfn, rng, args.n, args.queries,
        time_limit_ms=args.time_limit_ms, exact_wcc_threshold=args.exact_wcc_threshold,
        timings=not args.no_timings,
    )
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _emit(args, buf.getvalue())
    return EXIT_OK


def cmd_oracle(args) -> int:
    tfn = _load_network(args)
    if args.query:
        ans = stdf_bruteforce(tfn, _load_query(args.query, None))
        doc = {"sources": list(ans.sources), "sinks": list(ans.sinks), "value": ans.value, "density": _density(ans)}
    elif args.source is not None and args.sink is not None:
        value = max_temporal_flow_lp(tfn, args.source, args.sink)
        doc = {"value": str(value)}
    else:
        raise QueryError("oracle needs --query or --source/--sink")
    _emit(args, _dumps(doc))
    return EXIT_OK


COMMANDS = {
    "transform": cmd_transform,
    "maxflow": cmd_maxflow,
    "stdf": cmd_stdf,
    "bench": cmd_bench,
    "oracle": cmd_oracle,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except StdfError as exc:
        return _fail(exc.code, str(exc), exc.exit_status)
    except OSError as exc:
        return _fail("EIO", str(exc), EXIT_IO)
    except ValueError as exc:
        return _fail("EINVALID", str(exc), EXIT_QUERY)


def _fail(code: str, message: str, status: int) -> int:
    sys.stderr.write(json.dumps({"error": code, "message": message}) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
