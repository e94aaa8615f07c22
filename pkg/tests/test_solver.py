import math
import random

import numpy as np
import pytest
from scipy.optimize import linprog

from bruteforce import solve_bruteforce
from ttg.generator import GeneratorConfig, sample_pair
from ttg.model import (
    EmptySegment,
    MilpModel,
    build_model,
    extract_itinerary,
)
from ttg.schema import check_feasibility
from ttg.solver import (
    LpSolution,
    SolverParams,
    profile_solve,
    rounding_heuristic,
    solve_lp,
    solve_milp,
    solve_request,
)


def _lp_model(c, rows, bounds):
    """Generic LP as a MilpModel: rows are (coeffs_list, sense, rhs)."""
    model = MilpModel()
    for j, (lo, hi) in enumerate(bounds):
        model.add_variable(f"x{j}", "continuous", lo, hi, ("x", j))
    for i, (coeffs, sense, rhs) in enumerate(rows):
        model.add_row({j: v for j, v in enumerate(coeffs) if v != 0},
                      sense, rhs, f"r{i}")
    for j, v in enumerate(c):
        if v:
            model.objective[j] = v
    return model


# ---------------------------------------------------------------------------
# LP engine
# ---------------------------------------------------------------------------


def test_lp_one_variable():
    model = _lp_model([1], [([1.0], ">=", 3.0)], [(0, 10)])
    sol = solve_lp(model)
    assert sol.status == "optimal"
    assert sol.values[0] == pytest.approx(3.0, abs=1e-7)
    assert sol.objective == pytest.approx(3.0, abs=1e-7)


def test_lp_infeasible():
    model = _lp_model([1], [([1.0], "<=", 1.0), ([1.0], ">=", 2.0)], [(0, 10)])
    assert solve_lp(model).status == "infeasible"


def test_lp_unbounded():
    model = _lp_model([-1], [([1.0], ">=", 0.0)], [(0, math.inf)])
    assert solve_lp(model).status == "unbounded"


def test_lp_negative_lower_bounds():
    model = _lp_model([1, 1], [([1.0, 1.0], ">=", -3.0)], [(-5, 5), (-5, 5)])
    sol = solve_lp(model)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(-3.0, abs=1e-6)


def _random_lp(rng: np.random.Generator, m=20, n=30):
    A = rng.uniform(-2, 2, size=(m, n))
    x_feas = rng.uniform(0, 3, size=n)
    b = A @ x_feas + rng.uniform(0, 2, size=m)  # guaranteed feasible
    c = rng.uniform(-1, 1, size=n)
    bounds = [(0.0, float(rng.uniform(3, 8))) for _ in range(n)]
    senses = rng.choice(["<=", ">=", "="], size=m, p=[0.6, 0.3, 0.1])
    rows = []
    for i in range(m):
        rhs = float(b[i]) if senses[i] == "<=" else float(A[i] @ x_feas * 0.5)
        rows.append((list(A[i]), str(senses[i]), rhs))
    return c, rows, bounds


def _scipy_solve(c, rows, bounds):
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for coeffs, sense, rhs in rows:
        if sense == "<=":
            A_ub.append(coeffs)
            b_ub.append(rhs)
        elif sense == ">=":
            A_ub.append([-v for v in coeffs])
            b_ub.append(-rhs)
        else:
            A_eq.append(coeffs)
            b_eq.append(rhs)
    res = linprog(c, A_ub=A_ub or None, b_ub=b_ub or None,
                  A_eq=A_eq or None, b_eq=b_eq or None, bounds=bounds,
                  method="highs")
    if res.status == 0:
        return "optimal", res.fun
    if res.status == 2:
        return "infeasible", None
    if res.status == 3:
        return "unbounded", None
    raise RuntimeError(res.message)


def test_lp_matches_scipy_on_random_instances():
    rng = np.random.default_rng(1234)
    agree = 0
    for trial in range(40):
        c, rows, bounds = _random_lp(rng)
        expected_status, expected_obj = _scipy_solve(list(c), rows, bounds)
        sol = solve_lp(_lp_model(list(c), rows, bounds))
        assert sol.status == expected_status, f"trial {trial}"
        if expected_status == "optimal":
            scale = max(1.0, abs(expected_obj))
            assert abs(sol.objective - expected_obj) / scale < 1e-6, \
                f"trial {trial}: {sol.objective} vs {expected_obj}"
            agree += 1
    assert agree > 20  # the sweep must actually exercise optimal instances


def test_lp_relaxation_of_travel_model():
    tiny = GeneratorConfig(flights_per_segment=(2, 3), hotels_per_city=(1, 2),
                           nights_per_stop=(1, 1), p_three_cities=0.0)
    request, inventory = sample_pair(0, 7, tiny)
    model = build_model(request, inventory, "min_cost")
    sol = solve_lp(model)
    assert sol.status == "optimal"
    result = solve_milp(model)
    # weak duality: the LP relaxation lower-bounds the integral optimum
    assert sol.objective <= result.objective_value + 1e-6


# ---------------------------------------------------------------------------
# branch and bound
# ---------------------------------------------------------------------------


def test_milp_picks_cheaper_flight():
    from datetime import datetime
    from ttg.schema import FlightOffer, Inventory, request_from_dict
    request = request_from_dict({
        "schema_version": 1, "request_id": "r",
        "segments": [{"origin": "DEN", "destination": "MIA",
                      "date": "2025-02-10"}],
    })

    def offer(i, price):
        return FlightOffer(
            id=f"f{i}", segment_index=0, origin="DEN", destination="MIA",
            airline="AA", flight_number=str(i), cabin="coach", price=price,
            departure=datetime(2025, 2, 10, 9 + i, 0),
            arrival=datetime(2025, 2, 10, 13 + i, 0),
            non_stop=True, aircraft="A320", refundable=True,
            is_basic_economy=False, is_red_eye=False, is_mixed_cabin=False)

    inventory = Inventory((offer(0, 10000), offer(1, 20000)), ())
    model = build_model(request, inventory, "min_cost")
    result = solve_milp(model)
    assert result.status == "optimal"
    it = extract_itinerary(model, result.assignment)
    assert it.chosen_flights == ("f0",)
    assert it.total_cost == 10000


def test_generator_instances_never_infeasible(default_config):
    for seed in range(10):
        request, inventory = sample_pair(seed, 5, default_config)
        _, result, it = solve_request(request, inventory, "min_cost")
        assert result.status == "optimal"
        assert check_feasibility(it, request, inventory).feasible


@pytest.mark.parametrize("params", [
    SolverParams(),  # production defaults (root enumeration on)
    SolverParams(root_enumeration=False),  # pure LP relaxation + tree search
], ids=["default", "tree_only"])
def test_oracle_equivalence_small(small_config, params):
    for seed in range(40):
        request, inventory = sample_pair(seed, 6, small_config)
        kind = ("min_cost", "better_hotel", "better_flight")[seed % 3]
        oracle = solve_bruteforce(request, inventory, kind)
        try:
            _, result, it = solve_request(request, inventory, kind, params)
            got = result.objective_value if result.status == "optimal" else None
        except EmptySegment:
            got = None
        expected = oracle[0] if oracle else None
        assert got == expected, f"seed {seed} {kind}"
        if it is not None:
            assert check_feasibility(it, request, inventory).feasible


def test_presolve_off_matches_presolve_on():
    """Every presolve reduction preserves the optimum: the raw time-grid
    model and its booking-core reduction agree (slow path, so kept tiny)."""
    tiny = GeneratorConfig(flights_per_segment=(2, 3), hotels_per_city=(1, 2),
                           nights_per_stop=(1, 1), p_three_cities=0.0,
                           p_one_way=0.3)
    for seed in range(4):
        request, inventory = sample_pair(seed, 7, tiny)
        model = build_model(request, inventory, "min_cost")
        fast = solve_milp(model, SolverParams(presolve=True))
        slow = solve_milp(model, SolverParams(presolve=False))
        assert fast.status == slow.status
        if fast.status == "optimal":
            assert fast.objective_value == slow.objective_value, f"seed {seed}"


def test_determinism_identical_nodes(default_config):
    request, inventory = sample_pair(0, 0, default_config)
    model = build_model(request, inventory, "min_cost")
    a = solve_milp(model)
    b = solve_milp(model)
    assert a.objective_value == b.objective_value
    assert a.node_count == b.node_count
    assert a.lp_iterations == b.lp_iterations
    assert a.assignment == b.assignment


def test_depth_first_and_pseudo_cost_agree(default_config):
    request, inventory = sample_pair(2, 8, default_config)
    model = build_model(request, inventory, "min_cost")
    base = solve_milp(model)
    dfs = solve_milp(model, SolverParams(node_order="depth_first"))
    pc = solve_milp(model, SolverParams(branching="pseudo_cost"))
    assert dfs.objective_value == base.objective_value
    assert pc.objective_value == base.objective_value


def test_time_limit_statuses(default_config):
    request, inventory = sample_pair(0, 0, default_config)
    model = build_model(request, inventory, "min_cost")
    result = solve_milp(model, SolverParams(time_limit_ms=0))
    assert result.status in ("time_limit_with_incumbent",
                             "time_limit_no_incumbent")
    if result.status == "time_limit_with_incumbent":
        assert result.bound <= result.objective_value


def test_bound_sandwich():
    tiny = GeneratorConfig(flights_per_segment=(2, 4), hotels_per_city=(1, 2),
                           nights_per_stop=(1, 1), p_three_cities=0.0)
    for seed in (0, 2, 8):
        request, inventory = sample_pair(seed, 7, tiny)
        model = build_model(request, inventory, "min_cost")
        lp = solve_lp(model)
        result = solve_milp(model)
        assert result.status == "optimal"
        assert lp.objective <= result.objective_value + 1e-6
        assert result.bound == result.objective_value


# ---------------------------------------------------------------------------
# rounding heuristic
# ---------------------------------------------------------------------------


def test_rounding_integral_passthrough(demo_pair):
    from ttg.model import schedule_assignment
    request, inventory = demo_pair
    model = build_model(request, inventory, "min_cost")
    plant_f = [c for g in model.candidates for c in g
               if c.offer.id.endswith("plant")]
    plant_h = [s for s in model.stays if "plant" in s.offer.id]
    x = schedule_assignment(model, plant_f, plant_h)
    sol = LpSolution("optimal", tuple(x), 0.0, 0)
    rounded = rounding_heuristic(sol, model)
    assert rounded is not None
    for c in plant_f:
        assert rounded[c.var] == 1.0


def test_rounding_argmax_rule(demo_pair):
    request, inventory = demo_pair
    model = build_model(request, inventory, "min_cost")
    x = [0.0] * model.n_vars
    for group in model.candidates:
        x[group[0].var] = 0.4
        x[group[1].var] = 0.6
    for bi in range(len(model.blocks)):
        stays = [s for s in model.stays if s.block == bi]
        x[stays[0].var] = 1.0
    rounded = rounding_heuristic(LpSolution("optimal", tuple(x), 0.0, 0), model)
    if rounded is not None:  # feasibility depends on the 0.6 picks
        for group in model.candidates:
            assert rounded[group[1].var] == 1.0


def test_rounding_returns_none_when_budget_breaks():
    from datetime import datetime
    from ttg.schema import FlightOffer, Inventory, request_from_dict
    request = request_from_dict({
        "schema_version": 1, "request_id": "r",
        "segments": [{"origin": "DEN", "destination": "MIA",
                      "date": "2025-02-10"}],
        "budget": {"flight_total_budget": 15000},
    })

    def offer(i, price):
        return FlightOffer(
            id=f"f{i}", segment_index=0, origin="DEN", destination="MIA",
            airline="AA", flight_number=str(i), cabin="coach", price=price,
            departure=datetime(2025, 2, 10, 9 + i, 0),
            arrival=datetime(2025, 2, 10, 13 + i, 0),
            non_stop=True, aircraft="A320", refundable=True,
            is_basic_economy=False, is_red_eye=False, is_mixed_cabin=False)

    inventory = Inventory((offer(0, 10000), offer(1, 20000)), ())
    model = build_model(request, inventory, "min_cost")
    x = [0.0] * model.n_vars
    x[model.candidates[0][0].var] = 0.4
    x[model.candidates[0][1].var] = 0.6  # argmax pick busts the budget
    assert rounding_heuristic(LpSolution("optimal", tuple(x), 0.0, 0),
                              model) is None


# ---------------------------------------------------------------------------
# profiling
# ---------------------------------------------------------------------------


def test_profile_timing_identity(default_config):
    request, inventory = sample_pair(1, 0, default_config)
    result = profile_solve(request, inventory, "min_cost")
    assert result.status == "optimal"
    assert result.total_ms == pytest.approx(
        result.load_ms + result.solve_ms, abs=1.0)


def test_added_hard_constraint_never_cheapens(small_config):
    """Monotonicity: tightening a request can only raise the optimum."""
    from ttg.schema import request_from_dict, request_to_dict
    checked = 0
    for seed in range(12):
        request, inventory = sample_pair(seed, 9, small_config)
        _, base, _ = solve_request(request, inventory, "min_cost")
        if base.status != "optimal":
            continue
        obj = request_to_dict(request)
        airline = obj.setdefault("airline_constraints", {})
        for extra in ("non_stop", "refundable", "must_not_basic_economy"):
            if extra not in airline:
                airline[extra] = True
                break
        else:
            continue
        tightened = request_from_dict(obj)
        try:
            _, restricted, _ = solve_request(tightened, inventory, "min_cost")
        except EmptySegment:
            checked += 1
            continue  # empty feasible set is the extreme non-decrease
        if restricted.status == "optimal":
            assert restricted.objective_value >= base.objective_value, seed
        checked += 1
    assert checked >= 8
