"""Translator evaluation: exact match and the quality-ratio score.

Exact match compares canonical forms of the ground-truth request x and the
estimate x̂ and reports every differing field path.  The quality ratio
solves both requests against the same inventory and scores
f(s; x, G) / f(ŝ; x, G) with f the ground-truth min-cost objective (money
plus x's soft-window penalties); an estimate whose plan is infeasible or
violates any of x's constraints scores 0.

Report aggregation follows the k-equal-subset protocol (mean and standard
deviation of per-subset means, subsets taken in input order) with
breakdowns by airline-constraint count, hotel-constraint count and city
count, plus a histogram of error sources counted per differing field.
"""

from __future__ import annotations

import json
import re
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Optional, Sequence

from .generator import AppliedChange
from .model import EmptySegment, GridTooCoarse, ModelConfig, ground_truth_cost
from .schema import (
    Inventory,
    TravelRequest,
    check_feasibility,
    inventory_from_dict,
    inventory_to_dict,
    request_from_dict,
    request_to_dict,
)
from .solver import SolverParams, solve_request


class OracleInfeasible(RuntimeError):
    """The ground-truth request itself has no feasible plan: the dataset
    pair is broken and must not be scored silently."""


@dataclass(frozen=True)
class EvalCase:
    request: TravelRequest
    estimate: TravelRequest
    inventory: Inventory
    changes: tuple[AppliedChange, ...] = ()


@dataclass(frozen=True)
class CaseResult:
    index: int
    em: bool
    differing_fields: tuple[str, ...]
    score: float
    true_cost: int  # ground-truth objective of s, milli-cents
    est_cost: Optional[int]  # ground-truth objective of ŝ, when it exists
    zero_reason: Optional[str]  # "estimate_infeasible" | "constraint_violation"
    violated_fields: tuple[str, ...] = ()


@dataclass
class EvalReport:
    n_cases: int
    em_accuracy: float
    ratio_mean: float
    ratio_std: float
    subset_means: list[float]
    k_subsets: int
    non_em_ratio_mean: Optional[float]
    breakdowns: dict[str, dict[int, dict[str, float]]]
    error_histogram: dict[str, int]
    cases: list[CaseResult]
    error_counting: str = "per differing field"

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "n_cases": self.n_cases,
            "em_accuracy": self.em_accuracy,
            "quality_ratio": {
                "mean": self.ratio_mean,
                "std": self.ratio_std,
                "k_subsets": self.k_subsets,
                "subset_means": self.subset_means,
                "non_em_mean": self.non_em_ratio_mean,
            },
            "breakdowns": {
                name: {str(k): v for k, v in sorted(table.items())}
                for name, table in self.breakdowns.items()
            },
            "error_histogram": dict(sorted(self.error_histogram.items())),
            "error_counting": self.error_counting,
            "cases": [
                {
                    "index": c.index,
                    "em": c.em,
                    "differing_fields": list(c.differing_fields),
                    "score": c.score,
                    "true_cost": c.true_cost,
                    "est_cost": c.est_cost,
                    "zero_reason": c.zero_reason,
                    "violated_fields": list(c.violated_fields),
                }
                for c in self.cases
            ],
        }


# ---------------------------------------------------------------------------
# exact match
# ---------------------------------------------------------------------------

_MISSING = object()


def _diff(a: Any, b: Any, path: str, out: list[str]) -> None:
    a_dict, b_dict = isinstance(a, dict), isinstance(b, dict)
    if a_dict or b_dict:
        # a field absent on one side diffs at its own path, not the parent's
        da = a if a_dict else ({} if a is _MISSING else None)
        db = b if b_dict else ({} if b is _MISSING else None)
        if da is None or db is None:
            out.append(path)
            return
        for key in sorted(set(da) | set(db)):
            sub = f"{path}.{key}" if path else key
            _diff(da.get(key, _MISSING), db.get(key, _MISSING), sub, out)
        return
    if isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            out.append(path)
            return
        for i, (xa, xb) in enumerate(zip(a, b)):
            _diff(xa, xb, f"{path}[{i}]", out)
        return
    if a is _MISSING and b is _MISSING:
        return
    if a != b or (a is _MISSING) != (b is _MISSING):
        out.append(path)


def exact_match(x: TravelRequest, x_hat: TravelRequest
                ) -> tuple[bool, list[str]]:
    """Byte-level canonical equality, plus every mismatched field path.

    The request id is bookkeeping, not translated content, so it is left
    out of the comparison.
    """
    da = request_to_dict(x)
    db = request_to_dict(x_hat)
    for d in (da, db):
        d.pop("request_id", None)
        d.pop("schema_version", None)
    fields: list[str] = []
    _diff(da, db, "", fields)
    return (not fields, fields)


_INDEX_RE = re.compile(r"\[\d+\]")


def error_source(fieldpath: str) -> str:
    """Histogram key: the field path with list indices stripped."""
    return _INDEX_RE.sub("", fieldpath)


# ---------------------------------------------------------------------------
# quality ratio
# ---------------------------------------------------------------------------


def quality_ratio(x: TravelRequest, x_hat: TravelRequest, inventory: Inventory,
                  params: SolverParams = SolverParams(),
                  config: ModelConfig = ModelConfig(),
                  ) -> tuple[float, int, Optional[int], Optional[str], tuple[str, ...]]:
    """Score one case; returns (score, f(s), f(ŝ), zero_reason, violations)."""
    try:
        _, true_result, s = solve_request(x, inventory, "min_cost", params, config)
    except (EmptySegment, GridTooCoarse) as e:
        raise OracleInfeasible(f"ground-truth request unsolvable: {e}") from e
    if true_result.status != "optimal" or s is None:
        raise OracleInfeasible(
            f"ground-truth request unsolvable: {true_result.status}")
    f_true = ground_truth_cost(s, x, inventory)

    try:
        _, est_result, s_hat = solve_request(x_hat, inventory, "min_cost",
                                             params, config)
    except (EmptySegment, GridTooCoarse):
        return 0.0, f_true, None, "estimate_infeasible", ()
    if est_result.status != "optimal" or s_hat is None:
        return 0.0, f_true, None, "estimate_infeasible", ()

    report = check_feasibility(s_hat, x, inventory)
    f_est = ground_truth_cost(s_hat, x, inventory)
    if not report.feasible:
        fields = tuple(sorted({v.field for v in report.violations}))
        return 0.0, f_true, f_est, "constraint_violation", fields
    return f_true / f_est, f_true, f_est, None, ()


def _evaluate_case(args: tuple[int, dict, dict, dict, dict]) -> dict:
    """Worker-safe single-case evaluation over plain dicts."""
    index, req_d, est_d, inv_d, opt = args
    x = request_from_dict(req_d)
    x_hat = request_from_dict(est_d)
    inventory = inventory_from_dict(inv_d)
    params = SolverParams(time_limit_ms=opt.get("time_limit_ms"))
    config = ModelConfig(slot_minutes=opt.get("slot_minutes", 60))
    em, fields = exact_match(x, x_hat)
    try:
        if em:
            # same canonical constraints: both solves coincide by determinism
            try:
                _, res, s = solve_request(x, inventory, "min_cost", params,
                                          config)
            except (EmptySegment, GridTooCoarse) as e:
                raise OracleInfeasible(str(e)) from e
            if res.status != "optimal" or s is None:
                raise OracleInfeasible(res.status)
            f_true = ground_truth_cost(s, x, inventory)
            score, f_est, reason, violated = 1.0, f_true, None, ()
        else:
            score, f_true, f_est, reason, violated = quality_ratio(
                x, x_hat, inventory, params, config)
    except OracleInfeasible as e:
        raise OracleInfeasible(f"case {index}: {e}") from e
    return {
        "index": index, "em": em, "differing_fields": fields, "score": score,
        "true_cost": f_true, "est_cost": f_est, "zero_reason": reason,
        "violated_fields": violated,
    }


def run_eval(cases: Sequence[EvalCase], k_subsets: int = 8, jobs: int = 1,
             time_limit_ms: Optional[int] = None,
             slot_minutes: int = 60) -> EvalReport:
    """Evaluate every case and aggregate the report.

    Subsets are contiguous chunks in input order, so reports are
    reproducible.  Error sources are counted once per differing field.
    """
    if not cases:
        raise ValueError("empty dataset")
    opt = {"time_limit_ms": time_limit_ms, "slot_minutes": slot_minutes}
    work = [
        (i, request_to_dict(c.request), request_to_dict(c.estimate),
         inventory_to_dict(c.inventory), opt)
        for i, c in enumerate(cases)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            raw = list(pool.map(_evaluate_case, work, chunksize=4))
    else:
        raw = [_evaluate_case(w) for w in work]
    raw.sort(key=lambda r: r["index"])
    results = [
        CaseResult(index=r["index"], em=r["em"],
                   differing_fields=tuple(r["differing_fields"]),
                   score=r["score"], true_cost=r["true_cost"],
                   est_cost=r["est_cost"], zero_reason=r["zero_reason"],
                   violated_fields=tuple(r["violated_fields"]))
        for r in raw
    ]

    n = len(results)
    em_accuracy = sum(r.em for r in results) / n
    k = min(k_subsets, n)
    bounds = [round(i * n / k) for i in range(k + 1)]
    subset_means = [
        statistics.mean(r.score for r in results[bounds[i]:bounds[i + 1]])
        for i in range(k)
    ]
    ratio_mean = statistics.mean(subset_means)
    ratio_std = statistics.pstdev(subset_means)
    non_em = [r.score for r in results if not r.em]
    non_em_mean = statistics.mean(non_em) if non_em else None

    breakdowns: dict[str, dict[int, dict[str, float]]] = {
        "airline_constraints": {}, "hotel_constraints": {}, "cities": {}}
    for case, r in zip(cases, results):
        keys = {
            "airline_constraints": case.request.airline_constraints.count(),
            "hotel_constraints": case.request.hotel_constraints.count(),
            "cities": len(case.request.cities),
        }
        for name, key in keys.items():
            bucket = breakdowns[name].setdefault(
                key, {"em_accuracy": 0.0, "n_samples": 0})
            bucket["n_samples"] += 1
            bucket["em_accuracy"] += r.em
    for table in breakdowns.values():
        for bucket in table.values():
            bucket["em_accuracy"] /= bucket["n_samples"]

    histogram: dict[str, int] = {}
    for r in results:
        if r.em:
            continue
        for f in r.differing_fields:
            key = error_source(f)
            histogram[key] = histogram.get(key, 0) + 1

    return EvalReport(
        n_cases=n,
        em_accuracy=em_accuracy,
        ratio_mean=ratio_mean,
        ratio_std=ratio_std,
        subset_means=subset_means,
        k_subsets=k,
        non_em_ratio_mean=non_em_mean,
        breakdowns=breakdowns,
        error_histogram=histogram,
        cases=results,
    )


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def render_report(report: EvalReport) -> str:
    """Text table mirroring the count-bucket breakdown layout."""
    lines = [
        f"cases: {report.n_cases}",
        f"exact match accuracy: {report.em_accuracy:.3f}",
        f"quality ratio: {report.ratio_mean:.3f} +/- {report.ratio_std:.3f} "
        f"(over {report.k_subsets} subsets)",
    ]
    if report.non_em_ratio_mean is not None:
        lines.append(f"quality ratio (non-exact-match cases): "
                     f"{report.non_em_ratio_mean:.3f}")
    titles = {"hotel_constraints": "Hotel Constraints",
              "airline_constraints": "Airline Constraints",
              "cities": "Cities"}
    for name in ("hotel_constraints", "airline_constraints", "cities"):
        table = report.breakdowns[name]
        ks = sorted(table)
        lines.append("")
        lines.append(" | ".join([titles[name].ljust(20)] +
                                [str(k).rjust(7) for k in ks]))
        lines.append(" | ".join(["EM Accuracy".ljust(20)] +
                                [f"{table[k]['em_accuracy']:.1%}".rjust(7)
                                 for k in ks]))
        lines.append(" | ".join(["# samples".ljust(20)] +
                                [str(int(table[k]["n_samples"])).rjust(7)
                                 for k in ks]))
    if report.error_histogram:
        lines.append("")
        lines.append("error sources (per differing field):")
        width = max(len(k) for k in report.error_histogram)
        for key, count in sorted(report.error_histogram.items(),
                                 key=lambda kv: (-kv[1], kv[0])):
            lines.append(f"  {key.ljust(width)}  {count}")
    return "\n".join(lines) + "\n"


def write_report(report: EvalReport, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
