"""Command-line front door: generate, solve, eval, ingest, profile, serve.

Exit codes: 0 ok, 1 runtime error, 2 usage error, 3 infeasible instance.
Everything printed to stdout is machine-stable under fixed flags and seeds;
wall-clock timing goes to stderr (profile, whose job is timing, prints its
table to stdout).
"""

from __future__ import annotations

import argparse
import json
import random
import statistics
import sys
from typing import Optional

from . import __version__
from .evaluate import (
    EvalCase,
    OracleInfeasible,
    render_report,
    run_eval,
    write_report,
)
from .generator import (
    ConfigError,
    EmptyData,
    GeneratorConfig,
    InfeasibleRequest,
    PerturbationSpec,
    derive_seed,
    generate_dataset,
    ingest_flight_csv,
    iter_dataset,
    perturb_request,
)
from .model import EmptySegment, GridTooCoarse, to_lp_format
from .schema import (
    MalformedJson,
    SchemaViolation,
    parse_inventory,
    parse_request,
    request_from_dict,
)
from .solver import SolverParams, solve_request

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3


def _load_config(path: Optional[str]) -> GeneratorConfig:
    if path is None:
        return GeneratorConfig()
    with open(path, encoding="utf-8") as fh:
        return GeneratorConfig.from_dict(json.load(fh))


def _dollars(cents: int) -> str:
    return f"${cents / 100:,.2f}"


def _hhmm(dt) -> str:
    return dt.strftime("%H:%M")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_generate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    summary = generate_dataset(args.n, args.seed, config, args.out)
    print(f"wrote {summary['n']} pairs to {args.out}")
    print(f"one-way fraction: {summary['one_way_fraction']:.3f}")
    for name, key in (("airline constraint counts", "airline_constraint_counts"),
                      ("hotel constraint counts", "hotel_constraint_counts"),
                      ("city counts", "city_counts")):
        hist = summary[key]
        print(f"{name}: " + "  ".join(f"{k}:{v}" for k, v in hist.items()))
    return EXIT_OK


def _cmd_solve(args: argparse.Namespace) -> int:
    with open(args.request, encoding="utf-8") as fh:
        request = parse_request(fh.read())
    with open(args.inventory, encoding="utf-8") as fh:
        inventory = parse_inventory(fh.read())
    params = SolverParams(
        time_limit_ms=args.time_limit_ms,
        trace=(lambda s: print(f"[trace] {s}", file=sys.stderr))
        if args.trace else None,
    )
    try:
        model, result, itinerary = solve_request(
            request, inventory, args.objective, params)
    except EmptySegment as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if args.export_lp:
        with open(args.export_lp, "w", encoding="utf-8") as fh:
            fh.write(to_lp_format(model))
    if result.status != "optimal" or itinerary is None:
        print(f"no itinerary: {result.status}", file=sys.stderr)
        return EXIT_INFEASIBLE

    flights = {f.id: f for f in inventory.flights}
    hotels = {h.id: h for h in inventory.hotels}
    print(f"itinerary ({args.objective})  total {_dollars(itinerary.total_cost)}"
          f"  flights {_dollars(itinerary.flight_cost)}"
          f"  hotels {_dollars(itinerary.hotel_cost)}")
    print(f"{'seg':>3}  {'date':10}  {'route':8}  {'flight':>7}  {'cabin':13}"
          f"  {'dep':5}  {'arr':5}  {'price':>10}")
    for k, fid in enumerate(itinerary.chosen_flights):
        f = flights[fid]
        print(f"{k:>3}  {f.departure.date().isoformat():10}  "
              f"{f.origin}-{f.destination}  {f.airline}{f.flight_number:>5}  "
              f"{f.cabin:13}  {_hhmm(f.departure)}  {_hhmm(f.arrival)}  "
              f"{_dollars(f.price):>10}")
    if itinerary.hotel_stays:
        print(f"{'hotel':28}  {'city':4}  {'rating':6}  {'nights':6}  "
              f"{'nightly':>10}  {'subtotal':>10}")
        for stay in itinerary.hotel_stays:
            h = hotels[stay.hotel_id]
            print(f"{h.brand[:28]:28}  {h.city:4}  {h.rating:>6}  "
                  f"{stay.nights:>6}  {_dollars(h.nightly_price):>10}  "
                  f"{_dollars(stay.nights * h.nightly_price):>10}")
    print(f"objective value: {itinerary.objective_value} "
          f"(milli-cents, incl. soft-window penalties)")
    print(f"timing: load {result.load_ms:.1f} ms, solve {result.solve_ms:.1f} ms, "
          f"total {result.total_ms:.1f} ms ({result.node_count} nodes)",
          file=sys.stderr)
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    from .schema import inventory_from_dict

    with open(args.dataset, encoding="utf-8") as fh:
        raw_lines = [json.loads(ln) for ln in fh.read().splitlines()
                     if ln.strip()]
    pairs = [(request_from_dict(obj["request"]),
              inventory_from_dict(obj["inventory"])) for obj in raw_lines]
    inline = all("estimate" in obj for obj in raw_lines) and raw_lines

    cases: list[EvalCase] = []
    if args.perturb is not None:
        with open(args.perturb, encoding="utf-8") as fh:
            spec = PerturbationSpec.from_dict(json.load(fh))
        for i, (request, inventory) in enumerate(pairs):
            rng = random.Random(derive_seed(args.seed, i, 0xE7A1))
            estimate, changes = perturb_request(rng, request, spec)
            cases.append(EvalCase(request, estimate, inventory, tuple(changes)))
    elif args.estimates is not None:
        with open(args.estimates, encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln.strip()]
        if len(lines) != len(pairs):
            print(f"error: {len(lines)} estimates for {len(pairs)} dataset lines",
                  file=sys.stderr)
            return EXIT_ERROR
        for (request, inventory), line in zip(pairs, lines):
            estimate = request_from_dict(json.loads(line))
            cases.append(EvalCase(request, estimate, inventory))
    elif inline:
        # {request, estimate, inventory} triples carried in the dataset itself
        for obj, (request, inventory) in zip(raw_lines, pairs):
            estimate = request_from_dict(obj["estimate"])
            cases.append(EvalCase(request, estimate, inventory))
    else:
        print("error: provide --perturb or --estimates (or a dataset of "
              "{request, estimate, inventory} lines)", file=sys.stderr)
        return EXIT_USAGE

    try:
        report = run_eval(cases, k_subsets=args.k, jobs=args.jobs,
                          time_limit_ms=args.time_limit_ms)
    except OracleInfeasible as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    if args.out:
        write_report(report, args.out)
    sys.stdout.write(render_report(report))
    return EXIT_OK


def _cmd_ingest(args: argparse.Namespace) -> int:
    model, summary = ingest_flight_csv(args.csv)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(model.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"rows: {summary.rows_total} total, {summary.rows_used} used, "
          f"{summary.rows_skipped} skipped")
    for key, stats in sorted(summary.buckets.items()):
        print(f"  {key}: n={stats['n']} log_mean={stats['log_mean']:.4f} "
              f"log_sd={stats['log_sd']:.4f}")
    if summary.date_span:
        print(f"date span: {summary.date_span[0]} .. {summary.date_span[1]} "
              f"(tiled over generated dates)")
    return EXIT_OK


def _cmd_profile(args: argparse.Namespace) -> int:
    loads, solves, totals = [], [], []
    for i, (request, inventory) in enumerate(iter_dataset(args.dataset)):
        if args.limit is not None and i >= args.limit:
            break
        try:
            _, result, _ = solve_request(request, inventory, args.objective,
                                         SolverParams(time_limit_ms=args.time_limit_ms))
        except EmptySegment:
            continue
        loads.append(result.load_ms / 1000.0)
        solves.append(result.solve_ms / 1000.0)
        totals.append(result.total_ms / 1000.0)
    if not loads:
        print("error: no solvable instances in dataset", file=sys.stderr)
        return EXIT_ERROR

    def row(name: str, xs: list[float]) -> str:
        sd = statistics.pstdev(xs) if len(xs) > 1 else 0.0
        return f"  {name:22} {statistics.mean(xs):.3f}±{sd:.3f}"

    print(f"Response phase          Time (s)   [n={len(loads)}]")
    print(row("Loading constraints", loads))
    print(row("Solving", solves))
    print(row("Total", totals))
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ttg", description="symbolic travel planning toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic dataset")
    p.add_argument("--n", type=int, required=True, help="number of pairs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="generator config JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("solve", help="solve one request against an inventory")
    p.add_argument("--request", required=True)
    p.add_argument("--inventory", required=True)
    p.add_argument("--objective", default="min_cost",
                   choices=("min_cost", "better_hotel", "better_flight"))
    p.add_argument("--trace", action="store_true", help="node log to stderr")
    p.add_argument("--export-lp", help="write the compiled model in LP format")
    p.add_argument("--time-limit-ms", type=int)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("eval", help="score a translator over a dataset")
    p.add_argument("--dataset", required=True,
                   help="JSON-lines of {request, inventory} pairs "
                        "(or {request, estimate, inventory} triples)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--perturb", help="perturbation spec JSON")
    group.add_argument("--estimates", help="JSON-lines of estimated requests")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=8, help="subset count")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--time-limit-ms", type=int)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("ingest", help="fit a price model from a fares CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("profile", help="per-phase timing over a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--objective", default="min_cost",
                   choices=("min_cost", "better_hotel", "better_flight"))
    p.add_argument("--limit", type=int)
    p.add_argument("--time-limit-ms", type=int)
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int,
                   default=int(__import__("os").environ.get("TTG_PORT", 8080)))
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "generate" and args.n < 1:
        parser.error("--n must be >= 1")
    try:
        return args.func(args)
    except (SchemaViolation, MalformedJson, ConfigError, EmptyData,
            OracleInfeasible) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except InfeasibleRequest as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except GridTooCoarse as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
