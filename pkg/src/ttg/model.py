"""Compilation of (request, inventory) into a time-discretized MILP.

The travel span is discretized into T equal slots.  Binary variables:

  u_<city>(t)  traveller is at that location (cities plus a distinguished
               in-flight location) during slot t,
  m(t)         traveller sleeps during slot t,
  e(t)         an event (flight departure/landing) happens during slot t,
  f_j          candidate flight j is taken,
  h_j          candidate hotel stay j is booked.

Constraint families: one location at a time, location continuity unless an
event happens, a minimum number of sleep slots per away night, guarded
flight/hotel rows linking schedule to bookings (conditional equalities
linearized with per-row big-M constants), segment and budget rows.

Objective coefficients are scaled integers (milli-cents) so optima are
exactly comparable between the solver and enumeration oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta
from typing import Optional, Sequence

from .schema import (
    AwayBlock,
    FlightOffer,
    HotelOffer,
    HotelStay,
    Inventory,
    Itinerary,
    TravelRequest,
    away_blocks,
    soft_window_penalty,
)

AIR = "AIR"

CABIN_QUALITY = {"basic_economy": 0, "coach": 1, "business": 2, "first": 3}

OBJECTIVE_SCALE = 1000  # objective units are milli-cents


class GridTooCoarse(ValueError):
    """A candidate flight spans fewer than two slots; retry on a finer grid."""


class EmptySegment(ValueError):
    """No candidate flight survives filtering for some segment."""


class UnboundedVariable(ValueError):
    """No finite big-M exists for a conditional constraint."""


class FractionalAssignment(ValueError):
    """Assignment is not integral within tolerance."""


class InconsistentAssignment(ValueError):
    """Assignment violates a model row."""


@dataclass(frozen=True)
class ObjectiveSpec:
    """One of the three itinerary options, as an objective.

    min_cost minimizes money plus soft-window penalties.  better_hotel
    discounts hotel spend by lambda and charges a rating-shortfall penalty
    (equivalent ranking to a rating bonus, but keeps coefficients
    non-negative); better_flight does the same with cabin quality.
    """

    kind: str = "min_cost"
    lambda_milli: int = 300  # 0.3 on a 0..1000 scale
    hotel_rating_value: int = 150_000  # cents across the 1..5 rating span
    flight_quality_value: int = 120_000  # cents across the cabin-quality span
    window_penalty_per_minute: int = 5  # cents per minute outside a soft window

    def flight_coeff(self, price_plus_penalty: int, cabin: str) -> int:
        if self.kind == "better_flight":
            shortfall = 3 - CABIN_QUALITY[cabin]
            return ((OBJECTIVE_SCALE - self.lambda_milli) * price_plus_penalty
                    + self.lambda_milli * self.flight_quality_value * shortfall // 3)
        return OBJECTIVE_SCALE * price_plus_penalty

    def hotel_coeff(self, stay_cost: int, rating: int) -> int:
        if self.kind == "better_hotel":
            shortfall = 5 - rating
            return ((OBJECTIVE_SCALE - self.lambda_milli) * stay_cost
                    + self.lambda_milli * self.hotel_rating_value * shortfall // 4)
        return OBJECTIVE_SCALE * stay_cost


@dataclass(frozen=True)
class ModelConfig:
    slot_minutes: int = 60
    min_sleep_minutes: int = 360  # L = this / slot_minutes slots per night
    evening_start: int = 22 * 60  # minutes of day; window wraps midnight
    evening_end: int = 7 * 60

    @property
    def sleep_slots(self) -> int:
        return self.min_sleep_minutes // self.slot_minutes


# ---------------------------------------------------------------------------
# time grid
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TimeGrid:
    start: datetime
    slot_minutes: int
    T: int

    @classmethod
    def for_request(cls, request: TravelRequest, slot_minutes: int = 60) -> "TimeGrid":
        """Grid over the travel span: first segment date through the end of
        the last segment's arrival-day padding."""
        start = datetime.combine(request.segments[0].date, time(0, 0))
        end = datetime.combine(request.segments[-1].date + timedelta(days=1),
                               time(0, 0))
        span = int((end - start).total_seconds() // 60)
        return cls(start=start, slot_minutes=slot_minutes,
                   T=math.ceil(span / slot_minutes))

    def slot_of(self, dt: datetime) -> int:
        return int((dt - self.start).total_seconds() // 60) // self.slot_minutes

    def datetime_of(self, slot: int) -> datetime:
        return self.start + timedelta(minutes=slot * self.slot_minutes)

    def contains(self, slot: int) -> bool:
        return 0 <= slot < self.T

    def evening_slots(self, night: date, config: ModelConfig) -> list[int]:
        """Slots of the sleep window for the given night, clipped to the grid."""
        w_start = datetime.combine(night, time(0, 0)) + timedelta(
            minutes=config.evening_start)
        w_end = datetime.combine(night + timedelta(days=1), time(0, 0)) + timedelta(
            minutes=config.evening_end)
        first = self.slot_of(w_start)
        last = self.slot_of(w_end - timedelta(minutes=1))
        return [t for t in range(first, last + 1) if self.contains(t)]


# ---------------------------------------------------------------------------
# model containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str  # "binary" or "continuous"
    lb: float
    ub: float
    tag: tuple  # semantic tag, e.g. ("u", "DEN", 42) or ("f", 7)


@dataclass(frozen=True)
class Row:
    coeffs: dict[int, float]  # var index -> coefficient
    sense: str  # "<=", "=", ">="
    rhs: float
    label: str


@dataclass(frozen=True)
class FlightCand:
    var: int
    offer: FlightOffer
    segment: int
    t_dep: int
    t_land: int
    penalty: int  # soft-window penalty, cents


@dataclass(frozen=True)
class StayCand:
    var: int
    offer: HotelOffer
    block: int
    t_ckin: int
    t_ckout: int
    cost: int  # nights * nightly_price, cents


@dataclass
class MilpModel:
    """Compiled model plus the structural metadata the solver's presolve,
    postsolve and itinerary extraction rely on.  Treated as immutable once
    build_model returns."""

    variables: list[Variable] = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)
    objective: dict[int, int] = field(default_factory=dict)  # milli-cents
    L: int = 6
    M_registry: list[tuple[int, float]] = field(default_factory=list)

    # structural metadata
    request: Optional[TravelRequest] = None
    inventory: Optional[Inventory] = None
    objective_spec: ObjectiveSpec = field(default_factory=ObjectiveSpec)
    config: ModelConfig = field(default_factory=ModelConfig)
    grid: Optional[TimeGrid] = None
    locations: tuple[str, ...] = ()
    home: str = ""
    u_index: dict[tuple[str, int], int] = field(default_factory=dict)
    m_index: dict[int, int] = field(default_factory=dict)
    e_index: dict[int, int] = field(default_factory=dict)
    candidates: list[list[FlightCand]] = field(default_factory=list)  # per segment
    stays: list[StayCand] = field(default_factory=list)
    blocks: list[AwayBlock] = field(default_factory=list)
    night_slots: dict[date, list[int]] = field(default_factory=dict)

    def add_variable(self, name: str, kind: str, lb: float, ub: float,
                     tag: tuple) -> int:
        self.variables.append(Variable(name, kind, lb, ub, tag))
        return len(self.variables) - 1

    def add_row(self, coeffs: dict[int, float], sense: str, rhs: float,
                label: str) -> int:
        self.rows.append(Row(dict(coeffs), sense, rhs, label))
        return len(self.rows) - 1

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    def binary_indices(self) -> list[int]:
        return [i for i, v in enumerate(self.variables) if v.kind == "binary"]

    def flight_cand(self, var: int) -> FlightCand:
        for seg in self.candidates:
            for c in seg:
                if c.var == var:
                    return c
        raise KeyError(var)


# ---------------------------------------------------------------------------
# conditional constraints (big-M linearization)
# ---------------------------------------------------------------------------


def add_conditional_equality(model: MilpModel, guards: Sequence[int], x: int,
                             y: int | float, *, y_is_var: bool = False,
                             label: str = "cond") -> None:
    """Append rows enforcing: all guards = 1  =>  x = y.

    Emits x <= y + M*sum(1 - z) and y <= x + M*sum(1 - z) with the tightest
    valid M, recorded in the model's M registry.
    """
    if not guards:
        raise ValueError("guards must be non-empty")
    vx = model.variables[x]
    if y_is_var:
        vy = model.variables[int(y)]
        if math.isinf(vx.ub) or math.isinf(vx.lb) or math.isinf(vy.ub) \
                or math.isinf(vy.lb):
            raise UnboundedVariable(f"{vx.name} vs {vy.name}")
        m_up = vx.ub - vy.lb  # largest possible x - y
        m_dn = vy.ub - vx.lb
    else:
        if math.isinf(vx.ub) or math.isinf(vx.lb):
            raise UnboundedVariable(vx.name)
        m_up = vx.ub - float(y)
        m_dn = float(y) - vx.lb
    g = len(guards)

    # x - y - M*sum(1-z) <= 0   ->   x - y + M*sum(z) <= M*g
    m1 = max(m_up, 0.0)
    coeffs: dict[int, float] = {x: 1.0}
    if y_is_var:
        coeffs[int(y)] = coeffs.get(int(y), 0.0) - 1.0
        rhs = m1 * g
    else:
        rhs = m1 * g + float(y)
    for z in guards:
        coeffs[z] = coeffs.get(z, 0.0) + m1
    idx = model.add_row(coeffs, "<=", rhs, f"{label}:up")
    model.M_registry.append((idx, m1))

    # y - x - M*sum(1-z) <= 0
    m2 = max(m_dn, 0.0)
    coeffs = {x: -1.0}
    if y_is_var:
        coeffs[int(y)] = coeffs.get(int(y), 0.0) + 1.0
        rhs = m2 * g
    else:
        rhs = m2 * g - float(y)
    for z in guards:
        coeffs[z] = coeffs.get(z, 0.0) + m2
    idx = model.add_row(coeffs, "<=", rhs, f"{label}:dn")
    model.M_registry.append((idx, m2))


def add_conditional_geq(model: MilpModel, guards: Sequence[int], x: int,
                        y: int, label: str = "cond") -> None:
    """Append a row enforcing: all guards = 1  =>  x >= y (both variables)."""
    if not guards:
        raise ValueError("guards must be non-empty")
    vx, vy = model.variables[x], model.variables[y]
    if math.isinf(vy.ub) or math.isinf(vx.lb):
        raise UnboundedVariable(f"{vx.name} vs {vy.name}")
    m = max(vy.ub - vx.lb, 0.0)
    coeffs = {y: 1.0, x: -1.0}
    for z in guards:
        coeffs[z] = coeffs.get(z, 0.0) + m
    idx = model.add_row(coeffs, "<=", m * len(guards), f"{label}:geq")
    model.M_registry.append((idx, m))


# ---------------------------------------------------------------------------
# offer filtering
# ---------------------------------------------------------------------------


def _flight_passes(request: TravelRequest, f: FlightOffer) -> bool:
    ac = request.airline_constraints
    if ac.cabin_class is not None and f.cabin != ac.cabin_class:
        return False
    if ac.refundable and not f.refundable:
        return False
    if ac.non_stop and not f.non_stop:
        return False
    if ac.must_not_basic_economy and f.is_basic_economy:
        return False
    if ac.no_mixed_cabin and f.is_mixed_cabin:
        return False
    if ac.avoid_red_eye and f.is_red_eye:
        return False
    if ac.avoided_airlines is not None and f.airline in ac.avoided_airlines:
        return False
    if ac.plane_type is not None and f.aircraft not in ac.plane_type:
        return False
    if ac.price_range is not None and f.price > ac.price_range[1]:
        return False  # cannot fit under the total cap on its own
    k = f.segment_index
    for kind, when in (("departure_window", f.departure),
                       ("arrival_window", f.arrival)):
        windows = getattr(ac, kind)
        if windows is None or k >= len(windows) or windows[k] is None:
            continue
        w = windows[k]
        if w.soft:
            continue
        minutes = when.hour * 60 + when.minute
        if not w.earliest <= minutes <= w.latest:
            return False
    return True


def _hotel_passes(request: TravelRequest, h: HotelOffer) -> bool:
    hc = request.hotel_constraints
    if hc.rating_min is not None and h.rating < hc.rating_min:
        return False
    if hc.avoided_brands is not None and h.brand in hc.avoided_brands:
        return False
    if hc.price_range is not None:
        lo, hi = hc.price_range
        if not lo <= h.nightly_price <= hi:
            return False
    b = request.budget
    if b.hotel_daily_budget is not None and h.nightly_price > b.hotel_daily_budget:
        return False
    return True


def filter_offers(request: TravelRequest, inventory: Inventory) -> Inventory:
    """Presolve the inventory: drop offers violating any hard per-offer
    constraint.  Soft windows never remove an offer."""
    flights = tuple(f for f in inventory.flights
                    if 0 <= f.segment_index < len(request.segments)
                    and _flight_passes(request, f))
    hotels = tuple(h for h in inventory.hotels if _hotel_passes(request, h))
    return Inventory(flights, hotels)


# ---------------------------------------------------------------------------
# model building
# ---------------------------------------------------------------------------


def _candidate_flights(request: TravelRequest, filtered: Inventory,
                       grid: TimeGrid) -> list[list[FlightOffer]]:
    """Group date-matching, grid-fitting offers per segment; a flight shorter
    than two slots is a grid-granularity error, not a silent drop."""
    per_segment: list[list[FlightOffer]] = [[] for _ in request.segments]
    for f in filtered.flights:
        seg = request.segments[f.segment_index]
        if (f.origin, f.destination) != (seg.origin, seg.destination):
            continue
        if f.departure.date() != seg.date:
            continue
        t_dep, t_land = grid.slot_of(f.departure), grid.slot_of(f.arrival)
        if not grid.contains(t_land):
            continue  # lands beyond the padded span; unusable on this grid
        if t_land < t_dep + 2:
            raise GridTooCoarse(
                f"flight {f.id} spans {t_land - t_dep} slot(s) at "
                f"{grid.slot_minutes}-minute granularity")
        per_segment[f.segment_index].append(f)
    return per_segment


def _candidate_stays(request: TravelRequest, filtered: Inventory,
                     blocks: list[AwayBlock], grid: TimeGrid
                     ) -> list[tuple[int, HotelOffer, int, int]]:
    out = []
    for bi, block in enumerate(blocks):
        for h in filtered.hotels:
            if h.city != block.city:
                continue
            if not (h.available_from <= block.check_in
                    and block.check_out <= h.available_to + timedelta(days=1)):
                continue
            ckin = datetime.combine(block.check_in, time(0, 0)) + timedelta(
                minutes=h.checkin_earliest)
            ckout = datetime.combine(block.check_out, time(0, 0)) + timedelta(
                minutes=h.checkout_latest)
            t_ckin = max(0, grid.slot_of(ckin))
            t_ckout = min(grid.T, grid.slot_of(ckout - timedelta(minutes=1)) + 1)
            if t_ckin >= t_ckout:
                continue
            out.append((bi, h, t_ckin, t_ckout))
    return out


def build_model(request: TravelRequest, inventory: Inventory,
                objective: ObjectiveSpec | str = "min_cost",
                grid: Optional[TimeGrid] = None,
                config: ModelConfig = ModelConfig()) -> MilpModel:
    """Compile the full time-grid MILP for one request/inventory pair."""
    if isinstance(objective, str):
        objective = ObjectiveSpec(kind=objective)
    grid = grid or TimeGrid.for_request(request, config.slot_minutes)
    filtered = filter_offers(request, inventory)
    per_segment = _candidate_flights(request, filtered, grid)
    for k, cands in enumerate(per_segment):
        if not cands:
            seg = request.segments[k]
            raise EmptySegment(
                f"segment {k} ({seg.origin}->{seg.destination} on {seg.date}) "
                f"has no usable flight")

    blocks = away_blocks(request.segments)
    raw_stays = _candidate_stays(request, filtered, blocks, grid)

    model = MilpModel(request=request, inventory=inventory,
                      objective_spec=objective, config=config, grid=grid,
                      L=config.sleep_slots)
    home = request.segments[0].origin
    locations = tuple(list(request.cities) + [AIR])
    model.home = home
    model.locations = locations
    model.blocks = blocks
    model.night_slots = {
        night: grid.evening_slots(night, config)
        for block in blocks for night in block.nights
    }
    T = grid.T

    for loc in locations:
        for t in range(T):
            model.u_index[(loc, t)] = model.add_variable(
                f"u_{loc}_t{t}", "binary", 0, 1, ("u", loc, t))
    for t in range(T):
        model.m_index[t] = model.add_variable(f"m_t{t}", "binary", 0, 1, ("m", t))
    for t in range(T):
        model.e_index[t] = model.add_variable(f"e_t{t}", "binary", 0, 1, ("e", t))

    fi = 0
    for k, cands in enumerate(per_segment):
        group = []
        for f in cands:
            var = model.add_variable(f"f_{fi}", "binary", 0, 1, ("f", fi))
            pen = soft_window_penalty(request, f, k,
                                      objective.window_penalty_per_minute)
            group.append(FlightCand(var, f, k, grid.slot_of(f.departure),
                                    grid.slot_of(f.arrival), pen))
            fi += 1
        model.candidates.append(group)
    for si, (bi, h, t_ckin, t_ckout) in enumerate(raw_stays):
        var = model.add_variable(f"h_{si}", "binary", 0, 1, ("h", si))
        nights = len(blocks[bi].nights)
        model.stays.append(StayCand(var, h, bi, t_ckin, t_ckout,
                                    nights * h.nightly_price))

    # start pinned at home
    model.add_row({model.u_index[(home, 0)]: 1.0}, "=", 1.0, "start:home")

    # (a) one location at a time
    for t in range(T):
        model.add_row({model.u_index[(loc, t)]: 1.0 for loc in locations},
                      "=", 1.0, f"onehot:t{t}")

    # (b) continuity: location may change only when an event happens
    for loc in locations:
        for t in range(T - 1):
            a, b, e = (model.u_index[(loc, t)], model.u_index[(loc, t + 1)],
                       model.e_index[t])
            model.add_row({b: 1.0, a: -1.0, e: -1.0}, "<=", 0.0,
                          f"cont:{loc}:t{t}:up")
            model.add_row({a: 1.0, b: -1.0, e: -1.0}, "<=", 0.0,
                          f"cont:{loc}:t{t}:dn")

    # (c) minimum sleep per away night
    if model.L >= 1:
        for night, slots in model.night_slots.items():
            model.add_row({model.m_index[t]: 1.0 for t in slots}, ">=",
                          float(model.L), f"sleep:{night.isoformat()}")

    # (d) flight rows: guarded schedule pins
    for group in model.candidates:
        for c in group:
            src, dst = c.offer.origin, c.offer.destination
            pins = (
                (model.u_index[(src, c.t_dep)], "src"),
                (model.u_index[(AIR, c.t_dep + 1)], "air+"),
                (model.u_index[(dst, c.t_land)], "dst"),
                (model.u_index[(AIR, c.t_land - 1)], "air-"),
                (model.e_index[c.t_dep], "edep"),
                (model.e_index[c.t_land - 1], "eland"),
            )
            for var, name in pins:
                add_conditional_equality(model, [c.var], var, 1,
                                         label=f"flight:{c.offer.id}:{name}")

    # (e) exactly one flight per segment
    for k, group in enumerate(model.candidates):
        model.add_row({c.var: 1.0 for c in group}, "=", 1.0, f"segment:{k}")

    # events happen only when a chosen flight departs or lands
    events: dict[int, list[int]] = {t: [] for t in range(T)}
    for group in model.candidates:
        for c in group:
            events[c.t_dep].append(c.var)
            events[c.t_land - 1].append(c.var)
    for t in range(T):
        coeffs = {model.e_index[t]: 1.0}
        for var in events[t]:
            coeffs[var] = coeffs.get(var, 0.0) - 1.0
        model.add_row(coeffs, "<=", 0.0, f"ecover:t{t}")

    # (f) hotel rows: sleeping requires being at the booked hotel's city,
    # and is only allowed in slots covered by some booked stay
    for s in model.stays:
        city = s.offer.city
        for t in range(s.t_ckin, s.t_ckout):
            add_conditional_geq(model, [s.var], model.u_index[(city, t)],
                                model.m_index[t], label=f"stay:{s.offer.id}:t{t}")
    covering: dict[int, list[int]] = {t: [] for t in range(T)}
    for s in model.stays:
        for t in range(s.t_ckin, s.t_ckout):
            covering[t].append(s.var)
    for t in range(T):
        coeffs = {model.m_index[t]: 1.0}
        for var in covering[t]:
            coeffs[var] = coeffs.get(var, 0.0) - 1.0
        model.add_row(coeffs, "<=", 0.0, f"mcover:t{t}")

    # (g) budget rows (money in cents)
    b = request.budget
    ac = request.airline_constraints
    all_f = [c for group in model.candidates for c in group]
    if ac.price_range is not None:
        model.add_row({c.var: float(c.offer.price) for c in all_f}, ">=",
                      float(ac.price_range[0]), "flightprice:min")
        model.add_row({c.var: float(c.offer.price) for c in all_f}, "<=",
                      float(ac.price_range[1]), "flightprice:max")
    if b.flight_total_budget is not None:
        model.add_row({c.var: float(c.offer.price) for c in all_f}, "<=",
                      float(b.flight_total_budget), "budget:flight_total")
    if b.hotel_total_budget is not None and model.stays:
        model.add_row({s.var: float(s.cost) for s in model.stays}, "<=",
                      float(b.hotel_total_budget), "budget:hotel_total")
    if b.hotel_daily_budget is not None:
        for bi, block in enumerate(blocks):
            for night in block.nights:
                coeffs = {s.var: float(s.offer.nightly_price)
                          for s in model.stays if s.block == bi}
                if coeffs:
                    model.add_row(coeffs, "<=", float(b.hotel_daily_budget),
                                  f"budget:daily:{night.isoformat()}")
    if b.total_budget is not None:
        coeffs = {c.var: float(c.offer.price) for c in all_f}
        for s in model.stays:
            coeffs[s.var] = float(s.cost)
        model.add_row(coeffs, "<=", float(b.total_budget), "budget:total")

    # (h) objective
    for c in all_f:
        model.objective[c.var] = objective.flight_coeff(
            c.offer.price + c.penalty, c.offer.cabin)
    for s in model.stays:
        model.objective[s.var] = objective.hotel_coeff(s.cost, s.offer.rating)

    return model


# ---------------------------------------------------------------------------
# assignments: audit, schedule construction, itinerary extraction
# ---------------------------------------------------------------------------


def row_violation(row: Row, x: Sequence[float]) -> float:
    lhs = sum(c * x[i] for i, c in row.coeffs.items())
    if row.sense == "<=":
        return max(0.0, lhs - row.rhs)
    if row.sense == ">=":
        return max(0.0, row.rhs - lhs)
    return abs(lhs - row.rhs)


def audit_assignment(model: MilpModel, x: Sequence[float],
                     tol: float = 1e-6) -> list[tuple[str, float]]:
    """All rows violated beyond tol, as (label, violation) pairs."""
    bad = []
    for row in model.rows:
        v = row_violation(row, x)
        if v > tol:
            bad.append((row.label, v))
    return bad


def schedule_assignment(model: MilpModel, chosen: list[FlightCand],
                        stays: list[StayCand]) -> Optional[list[float]]:
    """Extend an integral (flights, stays) choice to a full variable
    assignment via the implied location timeline, or None when the choice
    admits no feasible schedule (slot conflicts or too little sleep)."""
    grid, T = model.grid, model.grid.T
    loc = [model.home] * T
    for c in sorted(chosen, key=lambda c: c.segment):
        for t in range(c.t_dep + 1, c.t_land):
            loc[t] = AIR
        for t in range(c.t_land, T):
            loc[t] = c.offer.destination

    events = set()
    for c in chosen:
        events.add(c.t_dep)
        events.add(c.t_land - 1)
        # verify the pins survived overlaps with other chosen flights
        if loc[c.t_dep] != c.offer.origin or loc[c.t_land] != c.offer.destination:
            return None
        if loc[c.t_dep + 1] != AIR or loc[c.t_land - 1] != AIR:
            return None
    for t in range(T - 1):
        if loc[t + 1] != loc[t] and t not in events:
            return None

    stay_by_block = {s.block: s for s in stays}
    m = [0.0] * T
    if model.L >= 1:
        for bi, block in enumerate(model.blocks):
            s = stay_by_block.get(bi)
            if s is None:
                return None
            for night in block.nights:
                avail = [t for t in model.night_slots[night]
                         if loc[t] == block.city and s.t_ckin <= t < s.t_ckout]
                if len(avail) < model.L:
                    return None
                for t in avail:
                    m[t] = 1.0

    x = [0.0] * model.n_vars
    for t in range(T):
        x[model.u_index[(loc[t], t)]] = 1.0
        x[model.m_index[t]] = m[t]
        if t in events:
            x[model.e_index[t]] = 1.0
    for c in chosen:
        x[c.var] = 1.0
    for s in stays:
        x[s.var] = 1.0
    return x


def extract_itinerary(model: MilpModel, assignment: Sequence[float],
                      integrality_tol: float = 1e-6,
                      feas_tol: float = 1e-6) -> Itinerary:
    """Read the booking variables out of a solved assignment, recomputing
    costs from inventory prices (the objective may carry quality terms)."""
    for i in model.binary_indices():
        if abs(assignment[i] - round(assignment[i])) > integrality_tol:
            raise FractionalAssignment(
                f"{model.variables[i].name} = {assignment[i]}")
    bad = audit_assignment(model, assignment, feas_tol)
    if bad:
        label, v = bad[0]
        raise InconsistentAssignment(f"row {label} violated by {v:g} "
                                     f"({len(bad)} rows total)")

    chosen: list[FlightCand] = []
    for group in model.candidates:
        picked = [c for c in group if round(assignment[c.var]) == 1]
        if len(picked) != 1:
            raise InconsistentAssignment(
                f"segment {group[0].segment} selects {len(picked)} flights")
        chosen.append(picked[0])
    stays = [s for s in model.stays if round(assignment[s.var]) == 1]

    flight_cost = sum(c.offer.price for c in chosen)
    hotel_cost = sum(s.cost for s in stays)
    objective_value = sum(coef * int(round(assignment[i]))
                          for i, coef in model.objective.items())
    return Itinerary(
        chosen_flights=tuple(c.offer.id for c in chosen),
        hotel_stays=tuple(
            HotelStay(s.offer.id, model.blocks[s.block].check_in,
                      model.blocks[s.block].check_out)
            for s in sorted(stays, key=lambda s: s.block)),
        flight_cost=flight_cost,
        hotel_cost=hotel_cost,
        total_cost=flight_cost + hotel_cost,
        objective_kind=model.objective_spec.kind,
        objective_value=objective_value,
    )


def ground_truth_cost(itinerary: Itinerary, request: TravelRequest,
                      inventory: Inventory,
                      spec: ObjectiveSpec = ObjectiveSpec()) -> int:
    """min_cost objective (milli-cents) of an itinerary under a request's
    soft windows, computed directly from inventory prices."""
    pen = 0
    for k, fid in enumerate(itinerary.chosen_flights):
        pen += soft_window_penalty(request, inventory.flight(fid), k,
                                   spec.window_penalty_per_minute)
    money = itinerary.total_cost
    return OBJECTIVE_SCALE * (money + pen)


# ---------------------------------------------------------------------------
# LP-format export
# ---------------------------------------------------------------------------


def to_lp_format(model: MilpModel) -> str:
    """Serialize to CPLEX LP text for external cross-checking."""
    def term(coef: float, name: str) -> str:
        sign = "+" if coef >= 0 else "-"
        mag = abs(coef)
        mag_s = f"{int(mag)}" if mag == int(mag) else f"{mag!r}"
        return f"{sign} {mag_s} {name}"

    lines = ["\\ travel itinerary model", "Minimize", " obj:"]
    parts = [term(c, model.variables[i].name)
             for i, c in sorted(model.objective.items())]
    lines.append("  " + (" ".join(parts) if parts else "0 " + model.variables[0].name))
    lines.append("Subject To")
    sense_map = {"<=": "<=", ">=": ">=", "=": "="}
    for ri, row in enumerate(model.rows):
        parts = [term(c, model.variables[i].name)
                 for i, c in sorted(row.coeffs.items()) if c != 0]
        if not parts:
            continue
        rhs = row.rhs
        rhs_s = f"{int(rhs)}" if rhs == int(rhs) else f"{rhs!r}"
        lines.append(f" r{ri}: {' '.join(parts)} {sense_map[row.sense]} {rhs_s}")
    lines.append("Bounds")
    for v in model.variables:
        if v.kind == "binary":
            continue
        lo = "-inf" if math.isinf(v.lb) else f"{v.lb!r}"
        hi = "+inf" if math.isinf(v.ub) else f"{v.ub!r}"
        lines.append(f" {lo} <= {v.name} <= {hi}")
    lines.append("Binaries")
    binaries = [model.variables[i].name for i in model.binary_indices()]
    for i in range(0, len(binaries), 8):
        lines.append(" " + " ".join(binaries[i:i + 8]))
    lines.append("End")
    return "\n".join(lines) + "\n"
