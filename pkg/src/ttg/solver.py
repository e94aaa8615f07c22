"""Exact MILP solving: bounded-variable primal simplex plus branch-and-bound.

The LP engine is a dense two-phase primal simplex over general bounds
(Dantzig pricing, Bland's rule fallback after a degenerate streak, explicit
basis inverse with periodic refactorization).  Branch-and-bound is
best-first with most-fractional branching by default, seeded by a rounding
heuristic, with every returned assignment re-verified row by row against
the full model before it is accepted.

A structure-aware presolve shrinks the compiled travel model from its
time-grid form (location/sleep/event variables over every slot) to its
booking core (flights, stays, evening sleep slots) using the location
timeline implied by chosen flights; postsolve reconstructs the full
schedule.  Every reduction preserves the optimum, which the test suite
checks against no-presolve runs; the row audit re-checks it on every solve.
"""

from __future__ import annotations

import heapq
import math
import time as _time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .model import (
    FlightCand,
    GridTooCoarse,
    MilpModel,
    ModelConfig,
    ObjectiveSpec,
    StayCand,
    audit_assignment,
    build_model,
    extract_itinerary,
    schedule_assignment,
)
from .schema import Inventory, Itinerary, TravelRequest


class NumericalBreakdown(RuntimeError):
    """The LP engine lost numerical control; reported, never a wrong answer."""


@dataclass(frozen=True)
class SolverParams:
    feas_tol: float = 1e-7
    opt_tol: float = 1e-7
    integrality_tol: float = 1e-6
    gap_tol: float = 0.0  # exact: integral objectives prune at 0.5 units
    time_limit_ms: Optional[int] = None
    branching: str = "most_fractional"  # or "pseudo_cost"
    node_order: str = "best_first"  # or "depth_first"
    presolve: bool = True
    root_enumeration: bool = True  # exact relaxation bound + seeds at the root
    max_nodes: int = 1_000_000
    trace: Optional[Callable[[str], None]] = None


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    values: tuple[float, ...]  # structural variables only
    objective: float
    iterations: int


@dataclass
class MilpResult:
    status: str  # optimal | infeasible | time_limit_with_incumbent | time_limit_no_incumbent
    assignment: Optional[list[float]]  # full model variable space
    objective_value: Optional[int]  # model objective units (milli-cents)
    bound: float
    node_count: int
    lp_iterations: int
    load_ms: float
    solve_ms: float
    total_ms: float
    presolve_log: list[str] = field(default_factory=list)
    rejected_candidates: int = 0  # integral nodes that failed postsolve audit


# ---------------------------------------------------------------------------
# bounded-variable primal simplex
# ---------------------------------------------------------------------------

_AT_LOWER, _AT_UPPER, _FREE, _BASIC = 0, 1, 2, 3
_PIV_TOL = 1e-9
_DEGEN_STREAK = 40
_REFACTOR_EVERY = 100


@dataclass
class _Arrays:
    """Standard-form LP: min c.x  s.t.  A x = b, lb <= x <= ub.

    Columns are the structural variables followed by one slack per row
    (slack bounds encode the row sense).  Rows are scaled by their largest
    coefficient magnitude, and the objective is normalized to unit infinity
    norm (obj_scale restores it) so the optimality tolerance is meaningful
    regardless of the model's cost units.
    """

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    n_struct: int
    obj_scale: float = 1.0


def _standardize(model: MilpModel,
                 bounds: Optional[dict[int, tuple[float, float]]] = None,
                 ) -> _Arrays:
    n, m = model.n_vars, len(model.rows)
    A = np.zeros((m, n + m))
    b = np.zeros(m)
    lb = np.zeros(n + m)
    ub = np.zeros(n + m)
    for j, v in enumerate(model.variables):
        lb[j], ub[j] = v.lb, v.ub
    if bounds:
        for j, (lo, hi) in bounds.items():
            lb[j], ub[j] = lo, hi
    for i, row in enumerate(model.rows):
        scale = 1.0
        if row.coeffs:
            scale = max(abs(cv) for cv in row.coeffs.values()) or 1.0
        for j, cv in row.coeffs.items():
            A[i, j] = cv / scale
        A[i, n + i] = 1.0 / scale
        b[i] = row.rhs / scale
        if row.sense == "<=":
            lb[n + i], ub[n + i] = 0.0, np.inf
        elif row.sense == ">=":
            lb[n + i], ub[n + i] = -np.inf, 0.0
        else:
            lb[n + i], ub[n + i] = 0.0, 0.0
    c = np.zeros(n + m)
    for j, coef in model.objective.items():
        c[j] = float(coef)
    obj_scale = float(np.abs(c).max()) or 1.0
    return _Arrays(A, b, c / obj_scale, lb, ub, n, obj_scale)


class _Simplex:
    """One bounded-variable primal simplex run over prepared arrays."""

    def __init__(self, arrays: _Arrays, params: SolverParams):
        self.ar = arrays
        self.params = params
        m, nt = arrays.A.shape
        self.m, self.nt = m, nt
        self.iterations = 0
        self.final_reduced_costs: Optional[np.ndarray] = None

    # -- initial point ------------------------------------------------------

    def _initial_nonbasic(self) -> tuple[np.ndarray, np.ndarray]:
        lb, ub = self.ar.lb, self.ar.ub
        status = np.full(self.nt, _AT_LOWER, dtype=np.int8)
        x = np.zeros(self.nt)
        finite_lb = np.isfinite(lb)
        finite_ub = np.isfinite(ub)
        x[finite_lb] = lb[finite_lb]
        only_ub = ~finite_lb & finite_ub
        status[only_ub] = _AT_UPPER
        x[only_ub] = ub[only_ub]
        status[~finite_lb & ~finite_ub] = _FREE
        return status, x

    # -- core pivoting over an arbitrary cost vector ------------------------

    def _core(self, A: np.ndarray, c: np.ndarray, lb: np.ndarray,
              ub: np.ndarray, basis: np.ndarray, status: np.ndarray,
              x: np.ndarray, allow_unbounded: bool) -> str:
        params = self.params
        m = self.m
        fixed = lb == ub
        max_iter = 2000 + 200 * (self.nt + m)
        try:
            Binv = np.linalg.inv(A[:, basis])
        except np.linalg.LinAlgError as e:
            raise NumericalBreakdown(f"singular starting basis: {e}") from e
        # anti-cycling: switch to Bland's rule after a stall (no measurable
        # objective progress), and stay there until progress resumes
        bland = False
        stall = 0
        since_refactor = 0

        while True:
            if self.iterations >= max_iter:
                raise NumericalBreakdown(
                    f"iteration limit {max_iter} reached (possible cycling)")
            self.iterations += 1
            since_refactor += 1
            if since_refactor >= _REFACTOR_EVERY:
                since_refactor = 0
                try:
                    Binv = np.linalg.inv(A[:, basis])
                except np.linalg.LinAlgError as e:
                    raise NumericalBreakdown(f"singular basis: {e}") from e
                resid = self.ar.b - A @ x
                x[basis] += Binv @ resid

            y = c[basis] @ Binv
            d = c - y @ A
            at_lower = (status == _AT_LOWER) & ~fixed & (d < -params.opt_tol)
            at_upper = (status == _AT_UPPER) & ~fixed & (d > params.opt_tol)
            free = (status == _FREE) & (np.abs(d) > params.opt_tol)
            eligible = at_lower | at_upper | free
            if not eligible.any():
                resid = self.ar.b - A @ x
                x[basis] += Binv @ resid
                self.final_reduced_costs = d
                return "optimal"

            if bland:
                q = int(np.flatnonzero(eligible)[0])
            else:
                score = np.where(eligible, np.abs(d), 0.0)
                q = int(np.argmax(score))
            sigma = 1.0 if (status[q] == _AT_LOWER
                            or (status[q] == _FREE and d[q] < 0)) else -1.0

            w = Binv @ A[:, q]
            denom = sigma * w
            xB = x[basis]
            lo_gap = xB - lb[basis]
            hi_gap = ub[basis] - xB

            limit = np.inf
            if np.isfinite(lb[q]) and np.isfinite(ub[q]):
                limit = ub[q] - lb[q]
            leave_pos = denom > _PIV_TOL
            leave_neg = denom < -_PIV_TOL
            ratios = np.full(m, np.inf)
            ratios[leave_pos] = lo_gap[leave_pos] / denom[leave_pos]
            ratios[leave_neg] = hi_gap[leave_neg] / (-denom[leave_neg])
            ratios = np.maximum(ratios, 0.0)
            min_ratio = ratios.min() if m else np.inf

            if min_ratio == np.inf and limit == np.inf:
                if allow_unbounded:
                    return "unbounded"
                raise NumericalBreakdown("phase-1 subproblem unbounded")

            if limit <= min_ratio:
                # entering variable runs bound to bound; basis unchanged
                delta = limit
                x[basis] = xB - sigma * delta * w
                x[q] += sigma * delta
                status[q] = _AT_UPPER if status[q] == _AT_LOWER else _AT_LOWER
            else:
                tie = np.flatnonzero(ratios <= min_ratio + 1e-9)
                r = int(tie[np.argmin(basis[tie])])
                delta = float(ratios[r])
                p = int(basis[r])
                x[basis] = xB - sigma * delta * w
                x[q] += sigma * delta
                if denom[r] > 0:
                    x[p] = lb[p]
                    status[p] = _AT_LOWER
                else:
                    x[p] = ub[p]
                    status[p] = _AT_UPPER
                basis[r] = q
                status[q] = _BASIC
                # eta update of the explicit inverse
                piv = w[r]
                if abs(piv) < _PIV_TOL:
                    raise NumericalBreakdown(f"pivot {piv:g} too small")
                row_r = Binv[r, :] / piv
                Binv -= np.outer(w, row_r)
                Binv[r, :] = row_r

            improvement = delta * abs(d[q])
            if improvement > 1e-9 * max(1.0, abs(float(c[basis] @ x[basis]))):
                stall = 0
                bland = False
            else:
                stall += 1
                if stall > _DEGEN_STREAK:
                    bland = True

    # -- two phases ----------------------------------------------------------

    def solve(self) -> tuple[str, np.ndarray]:
        ar = self.ar
        m = self.m
        status, x = self._initial_nonbasic()
        basis = np.arange(self.nt - m, self.nt)
        status[basis] = _BASIC
        B = ar.A[:, basis]  # diagonal by construction
        resid = ar.b - ar.A @ x + B @ x[basis]
        x[basis] = resid / np.diag(B)

        viol_lo = x[basis] < ar.lb[basis] - self.params.feas_tol
        viol_hi = x[basis] > ar.ub[basis] + self.params.feas_tol
        violated = np.flatnonzero(viol_lo | viol_hi)

        if violated.size:
            # phase 1: clamp violated slacks to their nearest bound and
            # cover the residual with artificial columns of unit cost
            n_art = violated.size
            A1 = np.hstack([ar.A, np.zeros((m, n_art))])
            lb1 = np.concatenate([ar.lb, np.zeros(n_art)])
            ub1 = np.concatenate([ar.ub, np.full(n_art, np.inf)])
            c1 = np.zeros(self.nt + n_art)
            status1 = np.concatenate([status, np.full(n_art, _BASIC, np.int8)])
            x1 = np.concatenate([x, np.zeros(n_art)])
            basis1 = basis.copy()
            for k, r in enumerate(violated):
                slack = int(basis[r])
                target = ar.lb[slack] if viol_lo[r] else ar.ub[slack]
                residual = x1[slack] - target
                x1[slack] = target
                status1[slack] = _AT_LOWER if viol_lo[r] else _AT_UPPER
                col = self.nt + k
                # pick the artificial's sign so that col * |residual| adds
                # exactly the contribution the clamped slack gave up
                A1[r, col] = math.copysign(1.0, residual) * ar.A[r, slack]
                x1[col] = abs(residual)
                c1[col] = 1.0
                basis1[r] = col

            saved = self.ar
            self.ar = _Arrays(A1, ar.b, c1, lb1, ub1, ar.n_struct)
            self.nt += n_art
            st = self._core(A1, c1, lb1, ub1, basis1, status1, x1,
                            allow_unbounded=False)
            phase1_obj = float(c1 @ x1)
            if st != "optimal" or phase1_obj > 1e-6 * max(1.0, abs(ar.b).max()):
                self.ar = saved
                self.nt -= n_art
                return "infeasible", x1[:self.nt]
            ub1[self.nt - n_art:] = 0.0  # artificials may linger basic at zero
            lb1[self.nt - n_art:] = 0.0
            c2 = np.concatenate([ar.c, np.zeros(n_art)])
            st = self._core(A1, c2, lb1, ub1, basis1, status1, x1,
                            allow_unbounded=True)
            self.ar = saved
            self.nt -= n_art
            return st, x1[:self.nt]

        st = self._core(ar.A, ar.c, ar.lb, ar.ub, basis, status, x,
                        allow_unbounded=True)
        return st, x


def _solve_arrays(arrays: _Arrays, params: SolverParams
                  ) -> tuple[str, np.ndarray, float, int, Optional[np.ndarray]]:
    sx = _Simplex(arrays, params)
    status, x = sx.solve()
    obj = float(arrays.c[:arrays.n_struct] @ x[:arrays.n_struct])
    duals = None
    if sx.final_reduced_costs is not None:
        duals = sx.final_reduced_costs[:arrays.n_struct] * arrays.obj_scale
    return status, x[:arrays.n_struct], obj * arrays.obj_scale, sx.iterations, duals


def solve_lp(model: MilpModel, params: SolverParams = SolverParams()
             ) -> LpSolution:
    """Solve the model with integrality relaxed (binaries become [0, 1])."""
    arrays = _standardize(model)
    status, x, obj, iters, _ = _solve_arrays(arrays, params)
    return LpSolution(status=status, values=tuple(float(v) for v in x),
                      objective=obj, iterations=iters)


# ---------------------------------------------------------------------------
# search problems: raw model or its presolved booking core
# ---------------------------------------------------------------------------


@dataclass
class _Problem:
    model: MilpModel
    arrays: _Arrays
    binaries: np.ndarray  # problem-space indices to branch on
    c_int: np.ndarray  # integer objective per problem variable
    unit: int  # gcd of objective coefficients; prune margin is unit/2
    to_full: Callable[[np.ndarray], Optional[list[float]]]
    log: list[str] = field(default_factory=list)
    # aggregate spend variables (integer cents): branching on these splits
    # subset-sum ties that single booking variables cannot resolve
    integers: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    # populated for the reduced problem, used by the rounding heuristic
    cand_vars: Optional[list[list[int]]] = None  # per segment
    stay_vars: Optional[list[list[int]]] = None  # per block
    var_of: dict[int, int] = field(default_factory=dict)  # model var -> ours

    def add_nogood(self, x: np.ndarray) -> None:
        """Exclude one binary assignment globally.  Safety valve: only ever
        used if an integral relaxation solution fails the full-model audit,
        which the reduction is designed to make impossible."""
        ar = self.arrays
        m, nt = ar.A.shape
        n = ar.n_struct
        coeffs = np.zeros(nt + 1)
        ones = 0
        for j in self.binaries:
            if round(float(x[j])) == 1:
                coeffs[j] = -1.0
                ones += 1
            else:
                coeffs[j] = 1.0
        coeffs[nt] = 1.0  # slack of the new >= row
        A = np.zeros((m + 1, nt + 1))
        A[:m, :nt] = ar.A
        A[m, :] = coeffs
        b = np.append(ar.b, 1.0 - ones)
        lb = np.concatenate([ar.lb, [-np.inf]])
        ub = np.concatenate([ar.ub, [0.0]])
        c = np.concatenate([ar.c, [0.0]])
        self.arrays = _Arrays(A, b, c, lb, ub, n, ar.obj_scale)


def _objective_unit(coeffs: Sequence[int]) -> int:
    g = 0
    for v in coeffs:
        g = math.gcd(g, abs(int(v)))
    return g or 1


def _raw_problem(model: MilpModel, params: SolverParams) -> _Problem:
    arrays = _standardize(model)
    c_int = np.zeros(model.n_vars, dtype=np.int64)
    for j, v in model.objective.items():
        c_int[j] = v
    return _Problem(
        model=model,
        arrays=arrays,
        binaries=np.array(model.binary_indices(), dtype=np.int64),
        c_int=c_int,
        unit=_objective_unit(list(model.objective.values())),
        to_full=lambda x: [float(v) for v in x],
    )


def _reduced_problem(model: MilpModel, params: SolverParams) -> _Problem:
    """Project the travel model onto (flights, stays, evening sleep slots).

    Location and event variables are eliminated through the flight timeline:
    the traveller is at a block's city from the chosen arriving flight's
    landing slot through the chosen departing flight's departure slot, so
    per-slot presence is a linear expression in the flight variables.
    Postsolve rebuilds the full schedule and the caller audits every
    original row.
    """
    log = []
    grid = model.grid
    var_of: dict[int, int] = {}  # model var -> problem var

    def pvar(model_var: int) -> int:
        if model_var not in var_of:
            var_of[model_var] = len(var_of)
        return var_of[model_var]

    cand_vars = [[pvar(c.var) for c in group] for group in model.candidates]
    stay_vars: list[list[int]] = [[] for _ in model.blocks]
    for s in model.stays:
        stay_vars[s.block].append(pvar(s.var))
    m_slots: dict[int, int] = {}
    if model.L >= 1:
        for night in sorted(model.night_slots):
            for t in model.night_slots[night]:
                if t not in m_slots:
                    m_slots[t] = pvar(model.m_index[t])
    n = len(var_of)
    log.append(f"presolve: {model.n_vars} vars -> {n} "
               f"(schedule eliminated via flight timeline)")

    rows: list[tuple[dict[int, float], str, float]] = []
    # one flight per segment
    for group in cand_vars:
        rows.append(({v: 1.0 for v in group}, "=", 1.0))
    if model.L >= 1:
        # some stay per block (sleep needs coverage)
        for bi, vs in enumerate(stay_vars):
            rows.append(({v: 1.0 for v in vs}, ">=", 1.0))
        # minimum sleep per night
        for night in sorted(model.night_slots):
            coeffs = {m_slots[t]: 1.0 for t in model.night_slots[night]}
            rows.append((coeffs, ">=", float(model.L)))
        # sleeping requires a covering booked stay ...
        stays_by_block: dict[int, list[StayCand]] = {}
        for s in model.stays:
            stays_by_block.setdefault(s.block, []).append(s)
        for bi, block in enumerate(model.blocks):
            arr_cands = model.candidates[block.arrival_segment]
            dep_cands = (model.candidates[block.departure_segment]
                         if block.departure_segment is not None else [])
            for night in block.nights:
                for t in model.night_slots[night]:
                    cover = {m_slots[t]: 1.0}
                    for s in stays_by_block.get(bi, []):
                        if s.t_ckin <= t < s.t_ckout:
                            cover[var_of[s.var]] = -1.0
                    rows.append((cover, "<=", 0.0))
                    # ... and presence at the block's city per the timeline
                    pres = {m_slots[t]: 1.0}
                    for c in arr_cands:
                        if c.t_land <= t:
                            pres[var_of[c.var]] = pres.get(var_of[c.var], 0.0) - 1.0
                    for c in dep_cands:
                        if c.t_dep < t:
                            pres[var_of[c.var]] = pres.get(var_of[c.var], 0.0) + 1.0
                    rows.append((pres, "<=", 0.0))
    # consecutive flights cannot overlap in time
    conflicts = 0
    for k in range(len(model.candidates) - 1):
        for a in model.candidates[k]:
            for b_ in model.candidates[k + 1]:
                if b_.t_dep < a.t_land:
                    rows.append(({var_of[a.var]: 1.0, var_of[b_.var]: 1.0},
                                 "<=", 1.0))
                    conflicts += 1
    if conflicts:
        log.append(f"presolve: {conflicts} flight-overlap conflict rows")
    # budget rows carry over verbatim (they touch only f/h variables)
    flight_coupling = hotel_coupling = False
    for row in model.rows:
        if row.label.startswith(("budget:", "flightprice:")):
            rows.append(({var_of[j]: cv for j, cv in row.coeffs.items()},
                         row.sense, row.rhs))
            if row.label.startswith(("flightprice:", "budget:flight_total",
                                     "budget:total")):
                flight_coupling = True
            if row.label.startswith(("budget:hotel_total", "budget:total",
                                     "budget:daily")):
                hotel_coupling = True

    # aggregate spend variables, integer-valued in cents for any integral
    # booking: branching on them resolves near-tie subset sums over prices
    # that single-variable branching cannot close
    agg_defs: list[tuple[dict[int, float], float, float]] = []
    if flight_coupling:
        for group in model.candidates:
            if len(group) < 2:
                continue
            coeffs = {var_of[c.var]: float(c.offer.price) for c in group}
            prices = [c.offer.price for c in group]
            agg_defs.append((coeffs, float(min(prices)), float(max(prices))))
    if hotel_coupling and len(model.stays) >= 2:
        coeffs = {var_of[s.var]: float(s.cost) for s in model.stays}
        agg_defs.append((coeffs, 0.0, float(sum(s.cost for s in model.stays))))
    n_book = n
    n += len(agg_defs)
    for i, (coeffs, lo_a, hi_a) in enumerate(agg_defs):
        row = {n_book + i: 1.0}
        for v, cv in coeffs.items():
            row[v] = -cv
        rows.append((row, "=", 0.0))
    if agg_defs:
        log.append(f"presolve: {len(agg_defs)} aggregate spend variables")
    log.append(f"presolve: {len(model.rows)} rows -> {len(rows)}")

    m = len(rows)
    A = np.zeros((m, n + m))
    b = np.zeros(m)
    lb = np.zeros(n + m)
    ub = np.ones(n + m)
    for i, (_, lo_a, hi_a) in enumerate(agg_defs):
        lb[n_book + i], ub[n_book + i] = lo_a, hi_a
    for i, (coeffs, sense, rhs) in enumerate(rows):
        scale = max(abs(cv) for cv in coeffs.values()) or 1.0
        for j, cv in coeffs.items():
            A[i, j] = cv / scale
        A[i, n + i] = 1.0 / scale
        b[i] = rhs / scale
        if sense == "<=":
            lb[n + i], ub[n + i] = 0.0, np.inf
        elif sense == ">=":
            lb[n + i], ub[n + i] = -np.inf, 0.0
        else:
            lb[n + i], ub[n + i] = 0.0, 0.0
    c = np.zeros(n + m)
    c_int = np.zeros(n, dtype=np.int64)
    for j, coef in model.objective.items():
        if j in var_of:
            c[var_of[j]] = float(coef)
            c_int[var_of[j]] = coef
    obj_scale = float(np.abs(c).max()) or 1.0
    c /= obj_scale

    def to_full(x: np.ndarray) -> Optional[list[float]]:
        chosen: list[FlightCand] = []
        for group in model.candidates:
            picked = [cd for cd in group if round(x[var_of[cd.var]]) == 1]
            if len(picked) != 1:
                return None
            chosen.append(picked[0])
        stays = [s for s in model.stays if round(x[var_of[s.var]]) == 1]
        return schedule_assignment(model, chosen, stays)

    return _Problem(
        model=model,
        arrays=_Arrays(A, b, c, lb, ub, n, obj_scale),
        binaries=np.arange(n_book, dtype=np.int64),
        c_int=c_int,
        unit=_objective_unit([int(v) for v in c_int]),
        to_full=to_full,
        log=log,
        integers=np.arange(n_book, n, dtype=np.int64),
        cand_vars=cand_vars,
        stay_vars=stay_vars,
        var_of=dict(var_of),
    )


# ---------------------------------------------------------------------------
# rounding heuristic
# ---------------------------------------------------------------------------


def rounding_heuristic(lp_solution: LpSolution, model: MilpModel
                       ) -> Optional[list[float]]:
    """Segment-wise argmax rounding of flights plus greedy hotel assignment,
    returned only if the completed schedule satisfies every model row."""
    x = lp_solution.values
    chosen: list[FlightCand] = []
    for group in model.candidates:
        best = max(group, key=lambda c: (x[c.var], -c.var))
        chosen.append(best)
    stays: list[StayCand] = []
    for bi in range(len(model.blocks)):
        block_stays = [s for s in model.stays if s.block == bi]
        if not block_stays:
            if model.L >= 1:
                return None
            continue
        stays.append(max(block_stays, key=lambda s: (x[s.var], -s.var)))
    full = schedule_assignment(model, chosen, stays)
    if full is None:
        return None
    if audit_assignment(model, full, tol=1e-6):
        return None
    return full


def _enumerate_relaxation(problem: _Problem, limit: int = 30
                          ) -> tuple[Optional[int], list[np.ndarray]]:
    """Exact optimum of the schedule-relaxed booking problem, plus seeds.

    Enumerates every (one flight per segment, one stay per block)
    combination against the flight-ordering and money rows, dropping only
    the sleep/presence coupling.  The returned value is therefore a valid
    global lower bound on the true optimum: when a schedule-checked
    incumbent matches it, branch and bound can stop at the root.  Returns
    (None, []) when the instance is too large to enumerate.
    """
    model = problem.model
    if problem.cand_vars is None or not model.candidates:
        return None, []
    shape = [len(g) for g in model.candidates]
    n_combo = 1
    for s in shape:
        n_combo *= s
    if n_combo > 600_000:
        return None, []

    prices, objs, deps, lands = [], [], [], []
    for group, pvars in zip(model.candidates, problem.cand_vars):
        prices.append(np.array([c.offer.price for c in group], dtype=np.int64))
        objs.append(np.array([problem.c_int[v] for v in pvars], dtype=np.int64))
        deps.append(np.array([c.t_dep for c in group], dtype=np.int64))
        lands.append(np.array([c.t_land for c in group], dtype=np.int64))
    # the pruning arguments below assume non-negative objective terms
    if any(int(o.min()) < 0 for o in objs if o.size) or any(
            problem.c_int[_pvar_of(problem, s.var)] < 0 for s in model.stays):
        return None, []

    grids = np.meshgrid(*[np.arange(s) for s in shape], indexing="ij")
    S = sum(p[g] for p, g in zip(prices, grids))
    O = sum(o[g] for o, g in zip(objs, grids))
    ok = np.ones(S.shape, dtype=bool)
    for k in range(len(shape) - 1):
        ok &= deps[k + 1][grids[k + 1]] >= lands[k][grids[k]]
    request = model.request
    ac, budget = request.airline_constraints, request.budget
    if ac.price_range is not None:
        ok &= (S >= ac.price_range[0]) & (S <= ac.price_range[1])
    if budget.flight_total_budget is not None:
        ok &= S <= budget.flight_total_budget
    if not ok.any():
        return None, []

    # hotel side: full product over per-block stay choices (money, obj)
    stay_lists: list[list[StayCand]] = [[] for _ in model.blocks]
    for s in model.stays:
        stay_lists[s.block].append(s)
    hotel_choices: list[tuple[int, int, tuple[StayCand, ...]]] = [(0, 0, ())]
    if model.L >= 1 and model.blocks:
        if any(not g for g in stay_lists):
            return None, []
        n_hotel = 1
        for g in stay_lists:
            n_hotel *= len(g)
        if n_hotel > 120_000:
            return None, []
        combos = [()]
        for group in stay_lists:
            combos = [prev + (s,) for prev in combos for s in group]
        hotel_choices = []
        for combo in combos:
            money = sum(s.cost for s in combo)
            if budget.hotel_total_budget is not None \
                    and money > budget.hotel_total_budget:
                continue
            obj = sum(problem.c_int[_pvar_of(problem, s.var)] for s in combo)
            hotel_choices.append((obj, money, combo))
        if not hotel_choices:
            return None, []

    # pairing under the trip-total cap: prefix minima over money-sorted stays
    by_money = sorted(hotel_choices, key=lambda t: (t[1], t[0]))
    moneys = [t[1] for t in by_money]
    prefix_best: list[tuple[int, int]] = []  # (obj, index into by_money)
    best_obj_so_far = None
    for i, (obj, money, _) in enumerate(by_money):
        if best_obj_so_far is None or obj < best_obj_so_far[0]:
            best_obj_so_far = (obj, i)
        prefix_best.append(best_obj_so_far)

    import bisect

    def best_hotel_within(cap: Optional[int]) -> Optional[tuple[int, int]]:
        if cap is None:
            return prefix_best[-1]
        k = bisect.bisect_right(moneys, cap) - 1
        if k < 0:
            return None
        return prefix_best[k]

    flat_obj = np.where(ok, O, np.iinfo(np.int64).max)
    order = np.argsort(flat_obj, axis=None, kind="stable")
    lower_bound: Optional[int] = None
    out: list[np.ndarray] = []
    for flat_idx in order:
        f_obj = int(flat_obj.flat[flat_idx])
        if f_obj == np.iinfo(np.int64).max:
            break
        combo_idx = np.unravel_index(flat_idx, S.shape)
        flight_money = int(S[combo_idx])
        cap = None
        if budget.total_budget is not None:
            cap = budget.total_budget - flight_money
        pick = best_hotel_within(cap)
        if pick is None:
            continue
        h_obj, h_i = pick
        total = f_obj + h_obj
        if lower_bound is None:
            lower_bound = total
        else:
            lower_bound = min(lower_bound, total)
            if f_obj > lower_bound:  # flights alone already exceed the best
                break
        if len(out) < limit:
            x = np.zeros(problem.arrays.n_struct)
            for k, pvars in enumerate(problem.cand_vars):
                x[pvars[int(combo_idx[k])]] = 1.0
            for s in by_money[h_i][2]:
                x[_pvar_of(problem, s.var)] = 1.0
            out.append(x)
    return lower_bound, out


def _pvar_of(problem: _Problem, model_var: int) -> int:
    return problem.var_of[model_var]


def _round_problem(problem: _Problem, x: np.ndarray) -> Optional[np.ndarray]:
    """Problem-space argmax rounding (reduced problems only).  Sleep slots
    stay zero here: they carry no objective weight and the incumbent check
    rebuilds the full schedule from the flight/stay picks anyway."""
    if problem.cand_vars is None:
        return None
    model = problem.model
    out = np.zeros(problem.arrays.n_struct)
    for group, pvars in zip(model.candidates, problem.cand_vars):
        best_i = max(range(len(group)), key=lambda i: (x[pvars[i]], -pvars[i]))
        out[pvars[best_i]] = 1.0
    if model.L >= 1:
        for pvars in problem.stay_vars:
            if not pvars:
                return None
            best_i = max(range(len(pvars)), key=lambda i: (x[pvars[i]], -pvars[i]))
            out[pvars[best_i]] = 1.0
    return out


# ---------------------------------------------------------------------------
# branch and bound
# ---------------------------------------------------------------------------


def _is_integral(x: np.ndarray, branch_vars: np.ndarray, tol: float) -> bool:
    frac = np.abs(x[branch_vars] - np.round(x[branch_vars]))
    return bool((frac <= tol).all())


def _most_fractional(x: np.ndarray, binaries: np.ndarray, tol: float) -> int:
    vals = x[binaries]
    frac = np.minimum(vals - np.floor(vals), np.ceil(vals) - vals)
    frac = np.where(np.abs(vals - np.round(vals)) <= tol, -1.0, frac)
    return int(binaries[int(np.argmax(frac))])


class _PseudoCosts:
    def __init__(self):
        self.up: dict[int, tuple[float, int]] = {}
        self.down: dict[int, tuple[float, int]] = {}

    def update(self, var: int, direction: str, degradation: float, frac: float):
        store = self.up if direction == "up" else self.down
        total, count = store.get(var, (0.0, 0))
        per_unit = degradation / max(frac, 1e-6)
        store[var] = (total + per_unit, count + 1)

    def score(self, var: int, frac: float) -> Optional[float]:
        if var not in self.up or var not in self.down:
            return None
        up_avg = self.up[var][0] / self.up[var][1]
        dn_avg = self.down[var][0] / self.down[var][1]
        return max(up_avg * (1 - frac), 1e-9) * max(dn_avg * frac, 1e-9)


def _pick_branch(problem: _Problem, x: np.ndarray, params: SolverParams,
                 pseudo: _PseudoCosts) -> int:
    tol = params.integrality_tol
    # aggregate spend variables first: splitting a fractional price sum
    # prunes whole families of tied booking combinations at once
    if problem.integers.size:
        vals = x[problem.integers]
        frac = np.minimum(vals - np.floor(vals), np.ceil(vals) - vals)
        frac = np.where(np.abs(vals - np.round(vals)) <= 1e-4, -1.0, frac)
        best = int(np.argmax(frac))
        if frac[best] > 0:
            return int(problem.integers[best])
    if params.branching == "pseudo_cost":
        best_var, best_score = -1, -1.0
        for j in problem.binaries:
            v = x[j]
            frac = min(v - math.floor(v), math.ceil(v) - v)
            if abs(v - round(v)) <= tol:
                continue
            s = pseudo.score(int(j), frac)
            if s is None:
                s = frac  # fall back to fractionality until history exists
            if s > best_score + 1e-12:
                best_var, best_score = int(j), s
        if best_var >= 0:
            return best_var
    return _most_fractional(x, problem.binaries, tol)


def _solve_node(problem: _Problem, node_bounds: dict[int, tuple[float, float]],
                params: SolverParams) -> tuple[str, np.ndarray, float, int]:
    ar = problem.arrays
    if node_bounds:
        lb = ar.lb.copy()
        ub = ar.ub.copy()
        for j, (lo, hi) in node_bounds.items():
            lb[j], ub[j] = lo, hi
        ar = _Arrays(ar.A, ar.b, ar.c, lb, ub, ar.n_struct, ar.obj_scale)
    return _solve_arrays(ar, params)


def _branch_and_bound(problem: _Problem, params: SolverParams,
                      deadline: Optional[float]) -> MilpResult:
    trace = params.trace or (lambda s: None)
    t0 = _time.perf_counter()
    best_x: Optional[np.ndarray] = None
    best_full: Optional[list[float]] = None
    best_obj: Optional[int] = None
    margin = max(problem.unit * 0.5, params.gap_tol)
    pseudo = _PseudoCosts()
    nodes_popped = 0
    lp_iters = 0
    rejected = 0
    next_id = 0

    def exact_obj(x: np.ndarray) -> int:
        xi = np.round(x[:problem.arrays.n_struct]).astype(np.int64)
        return int(problem.c_int @ xi)

    ACCEPTED, WORSE, INVALID = 0, 1, 2

    def try_incumbent(x: np.ndarray) -> int:
        nonlocal best_x, best_full, best_obj
        full = problem.to_full(np.asarray(x))
        if full is None:
            return INVALID
        bad = audit_assignment(problem.model, full, tol=max(params.feas_tol, 1e-6))
        if bad:
            return INVALID
        obj = exact_obj(x)
        if best_obj is None or obj < best_obj:
            best_x, best_full, best_obj = x.copy(), full, obj
            trace(f"incumbent {obj}")
            return ACCEPTED
        return WORSE

    heap: list[tuple[float, int, dict]] = []
    stack: list[tuple[float, int, dict]] = []

    def push(bound: float, bounds: dict):
        nonlocal next_id
        if params.node_order == "best_first":
            heapq.heappush(heap, (bound, next_id, bounds))
        else:
            stack.append((bound, next_id, bounds))
        next_id += 1

    def pop() -> tuple[float, dict]:
        bound, _, bounds = (heapq.heappop(heap) if params.node_order == "best_first"
                            else stack.pop())
        return bound, bounds

    def open_bound() -> float:
        open_nodes = heap if params.node_order == "best_first" else stack
        if not open_nodes:
            return math.inf
        return min(e[0] for e in open_nodes)

    push(-math.inf, {})
    status = "optimal"
    while heap or stack:
        if nodes_popped >= params.max_nodes:
            raise NumericalBreakdown(f"node limit {params.max_nodes} reached")
        if deadline is not None and _time.perf_counter() > deadline:
            status = "time_limit"
            break
        est_bound, bounds = pop()
        if best_obj is not None and est_bound >= best_obj - margin:
            continue
        nodes_popped += 1

        # solve the node relaxation, interleaved with reduced-cost fixing:
        # every fixing round removes bookings that cannot appear in a better
        # solution, which lifts the next relaxation's bound
        disposition = "branch"
        for tighten_round in range(8):
            lp_status, x, lp_obj, iters, duals = _solve_node(
                problem, bounds, params)
            lp_iters += iters
            if lp_status == "infeasible":
                disposition = "pruned"
                break
            if lp_status == "unbounded":
                raise NumericalBreakdown(
                    "relaxation unbounded in a bounded model")
            if params.root_enumeration and nodes_popped == 1 \
                    and tighten_round == 0:
                enum_bound, seeds = _enumerate_relaxation(problem)
                for seed in seeds:
                    try_incumbent(seed)
                if enum_bound is not None and best_obj is not None \
                        and best_obj - margin <= enum_bound:
                    # the schedule-relaxed optimum is already matched by a
                    # fully audited incumbent: proven optimal at the root
                    trace(f"root proof via relaxation bound {enum_bound}")
                    disposition = "pruned"
                    break
            if best_obj is not None and lp_obj >= best_obj - margin:
                disposition = "pruned"
                break
            if _is_integral(x, problem.binaries, params.integrality_tol):
                xi = np.round(x)
                if try_incumbent(xi) == INVALID:
                    # the relaxation's integral optimum admits no schedule:
                    # cut that assignment off and revisit this subtree
                    rejected += 1
                    problem.add_nogood(xi)
                    push(lp_obj, bounds)
                disposition = "pruned"
                break
            if tighten_round == 0 and (nodes_popped == 1
                                       or nodes_popped % 8 == 0):
                rounded = _round_problem(problem, x)
                if rounded is not None:
                    try_incumbent(rounded)
            if best_obj is None or duals is None:
                break
            gap = (best_obj - margin) - lp_obj
            eps = 1e-6 * problem.arrays.obj_scale
            fixed_here = {}
            for j in problem.binaries:
                if j in bounds and bounds[j][0] == bounds[j][1]:
                    continue
                dj = float(duals[j])
                if x[j] <= params.integrality_tol and dj >= gap + eps:
                    fixed_here[int(j)] = (0.0, 0.0)
                elif x[j] >= 1 - params.integrality_tol and -dj >= gap + eps:
                    fixed_here[int(j)] = (1.0, 1.0)
            if not fixed_here:
                break
            bounds = {**bounds, **fixed_here}
        if disposition == "pruned":
            continue
        var = _pick_branch(problem, x, params, pseudo)
        z = float(x[var])
        frac = z - math.floor(z)
        if var in problem.integers:
            cur_lo, cur_hi = bounds.get(
                var, (float(problem.arrays.lb[var]),
                      float(problem.arrays.ub[var])))
            children = [("down", (cur_lo, math.floor(z))),
                        ("up", (math.ceil(z), cur_hi))]
        else:
            children = [("down", (0.0, 0.0)), ("up", (1.0, 1.0))]
        for direction, (lo, hi) in children:
            child = dict(bounds)
            child[var] = (lo, hi)
            push(lp_obj, child)
        if params.branching == "pseudo_cost" and var not in problem.integers:
            # probe both children cheaply to learn degradations
            for direction, (lo, hi) in children:
                child = dict(bounds)
                child[var] = (lo, hi)
                st, _, child_obj, it2, _ = _solve_node(problem, child, params)
                lp_iters += it2
                if st == "optimal":
                    pseudo.update(var, direction, max(child_obj - lp_obj, 0.0),
                                  frac if direction == "up" else 1 - frac)

    elapsed = (_time.perf_counter() - t0) * 1000
    if status == "time_limit":
        final = ("time_limit_with_incumbent" if best_obj is not None
                 else "time_limit_no_incumbent")
        bound = min(open_bound(), best_obj if best_obj is not None else math.inf)
        return MilpResult(final, best_full, best_obj,
                          bound if math.isfinite(bound) else -math.inf,
                          nodes_popped, lp_iters, 0.0, elapsed, elapsed,
                          list(problem.log), rejected)
    if best_obj is None:
        return MilpResult("infeasible", None, None, math.inf, nodes_popped,
                          lp_iters, 0.0, elapsed, elapsed,
                          list(problem.log), rejected)
    return MilpResult("optimal", best_full, best_obj, float(best_obj),
                      nodes_popped, lp_iters, 0.0, elapsed, elapsed,
                      list(problem.log), rejected)


def solve_milp(model: MilpModel, params: SolverParams = SolverParams()
               ) -> MilpResult:
    """Exact branch-and-bound over the compiled model.

    With gap_tol 0 and no time limit, returns a provably optimal integral
    assignment (full model variable space) or an infeasible verdict.
    Deterministic for fixed inputs and params.
    """
    t0 = _time.perf_counter()
    problem = (_reduced_problem(model, params) if params.presolve
               else _raw_problem(model, params))
    load_ms = (_time.perf_counter() - t0) * 1000
    deadline = (t0 + params.time_limit_ms / 1000.0
                if params.time_limit_ms is not None else None)
    result = _branch_and_bound(problem, params, deadline)
    result.load_ms = load_ms
    result.total_ms = load_ms + result.solve_ms
    return result


# ---------------------------------------------------------------------------
# pipeline helpers
# ---------------------------------------------------------------------------


def solve_request(request: TravelRequest, inventory: Inventory,
                  objective: ObjectiveSpec | str = "min_cost",
                  params: SolverParams = SolverParams(),
                  config: ModelConfig = ModelConfig(),
                  ) -> tuple[MilpModel, MilpResult, Optional[Itinerary]]:
    """Build and solve, retrying once on a 30-minute grid if the default
    granularity is too coarse for some candidate flight."""
    t0 = _time.perf_counter()
    try:
        model = build_model(request, inventory, objective, config=config)
    except GridTooCoarse:
        fine = replace(config, slot_minutes=30)
        model = build_model(request, inventory, objective, config=fine)
    build_ms = (_time.perf_counter() - t0) * 1000

    result = solve_milp(model, params)
    result.load_ms += build_ms
    result.total_ms = result.load_ms + result.solve_ms
    itinerary = None
    if result.assignment is not None:
        itinerary = extract_itinerary(model, result.assignment,
                                      params.integrality_tol,
                                      max(params.feas_tol, 1e-6))
    return model, result, itinerary


def profile_solve(request: TravelRequest, inventory: Inventory,
                  objective: ObjectiveSpec | str = "min_cost",
                  params: SolverParams = SolverParams(),
                  config: ModelConfig = ModelConfig()) -> MilpResult:
    """Solve with the per-phase timing split: load covers model building and
    presolve, solve covers branch-and-bound."""
    _, result, _ = solve_request(request, inventory, objective, params, config)
    return result
