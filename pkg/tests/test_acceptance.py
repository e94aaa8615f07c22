"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and the timing table.
"""

import itertools
import json
import math
import random
import statistics
import subprocess
import sys
import time

import pytest

from bruteforce import solve_bruteforce
from ttg.evaluate import EvalCase, run_eval
from ttg.generator import (
    GeneratorConfig,
    Perturbation,
    PerturbationSpec,
    derive_seed,
    perturb_request,
    sample_pair,
    sample_request,
)
from ttg.model import MilpModel, add_conditional_equality, row_violation
from ttg.schema import check_feasibility
from ttg.solver import SolverParams, solve_request

DEMO_SCALE = GeneratorConfig(flights_per_segment=(45, 55),
                             hotels_per_city=(18, 22),
                             p_three_cities=1.0, p_one_way=0.0)

SMALL_SCALE = GeneratorConfig(flights_per_segment=(3, 6),
                              hotels_per_city=(2, 4),
                              nights_per_stop=(1, 2),
                              p_three_cities=0.0, p_one_way=0.15)


@pytest.fixture(scope="module")
def default_sweep():
    """100 solved default-scale instances, shared by several criteria."""
    out = []
    config = GeneratorConfig()
    for i in range(100):
        request, inventory = sample_pair(1, i, config)
        model, result, itinerary = solve_request(request, inventory, "min_cost")
        assert result.status == "optimal"
        out.append((request, inventory, model, result, itinerary))
    return out


def test_c1_big_m_truth_tables():
    """Conditional-equality rows enforce the implication exactly, over every
    binary assignment for 1, 2 and 3 guards, in under a second."""
    t0 = time.perf_counter()
    checked = 0
    for n_guards in (1, 2, 3):
        # variable y
        model = MilpModel()
        guards = [model.add_variable(f"z{i}", "binary", 0, 1, ("z", i))
                  for i in range(n_guards)]
        x = model.add_variable("x", "binary", 0, 1, ("x",))
        y = model.add_variable("y", "binary", 0, 1, ("y",))
        add_conditional_equality(model, guards, x, y, y_is_var=True)
        for bits in itertools.product((0.0, 1.0), repeat=n_guards + 2):
            ok = all(row_violation(r, list(bits)) <= 1e-9 for r in model.rows)
            zs, xv, yv = bits[:n_guards], bits[-2], bits[-1]
            assert ok == ((not all(zs)) or xv == yv), bits
            checked += 1
        # constant y
        for const in (0, 1):
            model = MilpModel()
            guards = [model.add_variable(f"z{i}", "binary", 0, 1, ("z", i))
                      for i in range(n_guards)]
            x = model.add_variable("x", "binary", 0, 1, ("x",))
            add_conditional_equality(model, guards, x, const)
            for bits in itertools.product((0.0, 1.0), repeat=n_guards + 1):
                ok = all(row_violation(r, list(bits)) <= 1e-9
                         for r in model.rows)
                zs, xv = bits[:n_guards], bits[-1]
                assert ok == ((not all(zs)) or xv == const), (bits, const)
                checked += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    print(f"PASS C1 big-M truth tables: {checked} assignments, "
          f"{elapsed * 1000:.0f} ms")


def test_c2_oracle_equivalence():
    """On 200 seeded small instances the solver's optimum equals exhaustive
    enumeration exactly, and every itinerary passes the checker.  Half the
    instances run with the root-enumeration bound disabled so the pure
    LP/branch-and-bound route is held to the same standard."""
    t0 = time.perf_counter()
    n_infeasible = 0
    tree_only = SolverParams(root_enumeration=False)
    for i in range(200):
        request, inventory = sample_pair(2, i, SMALL_SCALE)
        kind = ("min_cost", "better_hotel", "better_flight")[i % 3]
        params = SolverParams() if i % 2 == 0 else tree_only
        oracle = solve_bruteforce(request, inventory, kind)
        from ttg.model import EmptySegment
        try:
            _, result, itinerary = solve_request(request, inventory, kind,
                                                 params)
            got = (result.objective_value
                   if result.status == "optimal" else None)
        except EmptySegment:
            got, itinerary = None, None
        expected = oracle[0] if oracle else None
        assert got == expected, f"instance {i} ({kind}): {got} != {expected}"
        if itinerary is None:
            n_infeasible += 1
        else:
            assert check_feasibility(itinerary, request, inventory).feasible
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    print(f"PASS C2 oracle equivalence: 200/200 exact "
          f"({n_infeasible} infeasible on both sides), {elapsed:.1f} s")


def test_c3_quality_ratio_protocol():
    """Identity translator scores exactly EM 1.0 / ratio 1.0 +- 0.0; the
    drop/flip perturbation translator stays in [0, 1] and hits 0 exactly on
    the checker-violating cases."""
    config = GeneratorConfig()
    pairs = [sample_pair(3, i, config) for i in range(100)]

    identity = run_eval([EvalCase(r, r, inv) for r, inv in pairs], k_subsets=8)
    assert identity.em_accuracy == 1.0
    assert identity.ratio_mean == 1.0
    assert identity.ratio_std == 0.0

    spec = PerturbationSpec((
        Perturbation("drop_constraint", 0.1),
        Perturbation("flip_boolean", 0.1),
    ))
    cases = []
    for i, (request, inventory) in enumerate(pairs):
        rng = random.Random(derive_seed(4, i))
        estimate, changes = perturb_request(rng, request, spec)
        cases.append(EvalCase(request, estimate, inventory, tuple(changes)))
    report = run_eval(cases, k_subsets=8)
    zeros = 0
    for c in report.cases:
        assert 0.0 <= c.score <= 1.0
        assert (c.score == 0.0) == (c.zero_reason is not None), c
        zeros += c.score == 0.0
    assert len(report.subset_means) == 8
    print(f"PASS C3 quality-ratio protocol: identity em=1.0 ratio=1.0+-0.0; "
          f"perturbed em={report.em_accuracy:.2f} "
          f"ratio={report.ratio_mean:.3f}+-{report.ratio_std:.3f} "
          f"(8 subsets), {zeros} zero-score cases")


def test_c4_structural_invariants(default_sweep):
    """Every solved instance satisfies the schedule structure: one location
    per slot, continuity unless an event fires, the sleep minimum, one
    flight per segment, and every budget row."""
    for request, inventory, model, result, itinerary in default_sweep:
        x = result.assignment
        T = model.grid.T
        for t in range(T):
            total = sum(x[model.u_index[(loc, t)]] for loc in model.locations)
            assert abs(total - 1.0) < 1e-6, f"one-hot at t={t}"
        for t in range(T - 1):
            if round(x[model.e_index[t]]) == 0:
                for loc in model.locations:
                    assert round(x[model.u_index[(loc, t)]]) == \
                        round(x[model.u_index[(loc, t + 1)]]), \
                        f"teleport at t={t}"
        for night, slots in model.night_slots.items():
            asleep = sum(round(x[model.m_index[t]]) for t in slots)
            assert asleep >= model.L, f"night {night}: {asleep} < {model.L}"
        for group in model.candidates:
            assert sum(round(x[c.var]) for c in group) == 1
        for row in model.rows:
            if row.label.startswith(("budget:", "flightprice:")):
                assert row_violation(row, x) <= 1e-6, row.label
    print(f"PASS C4 structural invariants: {len(default_sweep)} instances, "
          f"zero violations")


def test_c5_latency_demo_scale():
    """Three-segment instances with ~50 flights/segment and ~20 hotels/city
    on the 60-minute grid: load under 0.5 s and proven optimality under 2 s,
    each, over 100 instances."""
    loads, solves, totals = [], [], []
    for i in range(100):
        request, inventory = sample_pair(5, i, DEMO_SCALE)
        _, result, _ = solve_request(request, inventory, "min_cost")
        assert result.status == "optimal"
        assert result.load_ms < 500.0, f"instance {i}: load {result.load_ms}"
        assert result.solve_ms < 2000.0, f"instance {i}: solve {result.solve_ms}"
        loads.append(result.load_ms / 1000)
        solves.append(result.solve_ms / 1000)
        totals.append(result.total_ms / 1000)

    def fmt(xs):
        return f"{statistics.mean(xs):.3f}±{statistics.pstdev(xs):.3f}"

    print("PASS C5 latency (n=100):")
    print("  Response phase          Time (s)")
    print(f"   - Loading constraints  {fmt(loads)}")
    print(f"   - Solving              {fmt(solves)}")
    print(f"   - Total                {fmt(totals)}")


def test_c6_objective_option_ordering():
    """min_cost's money total never exceeds the other options', and
    better_hotel's mean selected rating is at least min_cost's."""
    config = GeneratorConfig()
    ratings = {"min_cost": [], "better_hotel": []}
    for i in range(50):
        request, inventory = sample_pair(6, i, config)
        totals = {}
        for kind in ("min_cost", "better_hotel", "better_flight"):
            _, result, itinerary = solve_request(request, inventory, kind)
            assert result.status == "optimal"
            totals[kind] = itinerary.total_cost
            if kind in ratings and itinerary.hotel_stays:
                stay_ratings = [inventory.hotel(s.hotel_id).rating
                                for s in itinerary.hotel_stays]
                ratings[kind].append(statistics.mean(stay_ratings))
        assert totals["min_cost"] <= totals["better_hotel"], f"instance {i}"
        assert totals["min_cost"] <= totals["better_flight"], f"instance {i}"
    mean_mc = statistics.mean(ratings["min_cost"])
    mean_bh = statistics.mean(ratings["better_hotel"])
    assert mean_bh >= mean_mc
    print(f"PASS C6 option ordering: 50 instances, mean hotel rating "
          f"min_cost={mean_mc:.2f} better_hotel={mean_bh:.2f}")


def test_c7_generator_statistics():
    """10^4 defaults-config samples: under 5% one-way, constraint counts in
    the published ranges, each bucket within 3 binomial sigma."""
    config = GeneratorConfig()
    n = 10_000
    one_way = three_cities = 0
    airline_counts: dict[int, int] = {}
    hotel_counts: dict[int, int] = {}
    for i in range(n):
        request = sample_request(random.Random(derive_seed(7, i)), config)
        one_way += 0 if request.is_round_trip else 1
        three_cities += len(request.cities) == 3
        a = request.airline_constraints.count()
        h = request.hotel_constraints.count()
        airline_counts[a] = airline_counts.get(a, 0) + 1
        hotel_counts[h] = hotel_counts.get(h, 0) + 1

    assert one_way / n < 0.05
    assert set(airline_counts) <= set(range(4, 9))
    assert set(hotel_counts) <= {2, 3, 4}

    def check_bucket(observed, weights, label):
        total = sum(weights.values())
        for count, weight in weights.items():
            p = weight / total
            sigma = math.sqrt(p * (1 - p) / n)
            p_hat = observed.get(count, 0) / n
            assert abs(p_hat - p) <= 3 * sigma, (label, count, p_hat, p)

    check_bucket(airline_counts, config.airline_count_weights, "airline")
    check_bucket(hotel_counts, config.hotel_count_weights, "hotel")
    for p, p_hat, label in (
            (config.p_one_way, one_way / n, "one-way"),
            (config.p_three_cities, three_cities / n, "three-cities")):
        sigma = math.sqrt(p * (1 - p) / n)
        assert abs(p_hat - p) <= 3 * sigma, (label, p_hat, p)
    print(f"PASS C7 generator statistics: one-way {one_way / n:.3%}, "
          f"airline counts {sorted(airline_counts)}, "
          f"hotel counts {sorted(hotel_counts)}, all within 3 sigma")


def test_c8_cli_determinism(tmp_path):
    """Repeated generate and solve runs are byte-identical."""
    py = [sys.executable, "-m", "ttg.cli"]
    da, db = tmp_path / "a", tmp_path / "b"
    da.mkdir(), db.mkdir()
    for d in (da, db):
        r = subprocess.run(py + ["generate", "--n", "100", "--seed", "1",
                                 "--out", "ds.jsonl"],
                           cwd=d, capture_output=True, text=True)
        assert r.returncode == 0
    assert (da / "ds.jsonl").read_bytes() == (db / "ds.jsonl").read_bytes()

    line = json.loads((da / "ds.jsonl").read_text().splitlines()[0])
    (da / "request.json").write_text(json.dumps(line["request"]))
    (da / "inventory.json").write_text(json.dumps(line["inventory"]))
    outs = []
    for _ in range(2):
        r = subprocess.run(py + ["solve", "--request", "request.json",
                                 "--inventory", "inventory.json"],
                           cwd=da, capture_output=True, text=True)
        assert r.returncode == 0
        outs.append(r.stdout)
    assert outs[0] == outs[1]
    print("PASS C8 determinism: generate and solve byte-identical across runs")
