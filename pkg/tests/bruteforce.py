"""Independent enumeration oracle for small travel instances.

Enumerates every (one flight per segment, one hotel stay per away-city
block) combination, judges feasibility with the schema checker plus its own
re-derivation of the schedule rules (grid fit, flight ordering, per-night
sleep slots), and scores with its own copy of the objective arithmetic.
Deliberately shares no code with the model compiler or the solver.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from datetime import datetime, time, timedelta
from typing import Optional

from ttg.schema import (
    HotelStay,
    Inventory,
    Itinerary,
    TravelRequest,
    away_blocks,
    check_feasibility,
)

CABIN_RANK = {"basic_economy": 0, "coach": 1, "business": 2, "first": 3}


@dataclass(frozen=True)
class OracleSettings:
    slot_minutes: int = 60
    sleep_slots: int = 6
    evening_start: int = 22 * 60
    evening_end: int = 7 * 60
    lambda_milli: int = 300
    hotel_rating_value: int = 150_000
    flight_quality_value: int = 120_000
    penalty_per_minute: int = 5


def _slot(grid_start: datetime, dt: datetime, slot_minutes: int) -> int:
    return int((dt - grid_start).total_seconds() // 60) // slot_minutes


def _window_penalty(request: TravelRequest, flight, seg_idx: int,
                    rate: int) -> int:
    pen = 0
    ac = request.airline_constraints
    for kind, when in (("departure_window", flight.departure),
                       ("arrival_window", flight.arrival)):
        windows = getattr(ac, kind)
        if windows is None or windows[seg_idx] is None or not windows[seg_idx].soft:
            continue
        w = windows[seg_idx]
        minutes = when.hour * 60 + when.minute
        pen += rate * (max(0, w.earliest - minutes) + max(0, minutes - w.latest))
    return pen


def _objective(request: TravelRequest, flights, stays_cost, stays,
               kind: str, s: OracleSettings) -> int:
    total = 0
    for k, f in enumerate(flights):
        base = f.price + _window_penalty(request, f, k, s.penalty_per_minute)
        if kind == "better_flight":
            total += ((1000 - s.lambda_milli) * base
                      + s.lambda_milli * s.flight_quality_value
                      * (3 - CABIN_RANK[f.cabin]) // 3)
        else:
            total += 1000 * base
    for cost, hotel in zip(stays_cost, stays):
        if kind == "better_hotel":
            total += ((1000 - s.lambda_milli) * cost
                      + s.lambda_milli * s.hotel_rating_value
                      * (5 - hotel.rating) // 4)
        else:
            total += 1000 * cost
    return total


def _sleep_ok(request: TravelRequest, flights, stay_map, s: OracleSettings,
              grid_start: datetime) -> bool:
    blocks = away_blocks(request.segments)
    for bi, block in enumerate(blocks):
        hotel, stay = stay_map[bi]
        arr_flight = flights[block.arrival_segment]
        t_arrive = _slot(grid_start, arr_flight.arrival, s.slot_minutes)
        if block.departure_segment is not None:
            dep_flight = flights[block.departure_segment]
            t_leave = _slot(grid_start, dep_flight.departure, s.slot_minutes)
        else:
            t_leave = 10 ** 9
        ckin_dt = datetime.combine(block.check_in, time(0, 0)) + timedelta(
            minutes=hotel.checkin_earliest)
        ckout_dt = datetime.combine(block.check_out, time(0, 0)) + timedelta(
            minutes=hotel.checkout_latest)
        t_ckin = _slot(grid_start, ckin_dt, s.slot_minutes)
        t_ckout = _slot(grid_start, ckout_dt - timedelta(minutes=1),
                        s.slot_minutes) + 1
        for night in block.nights:
            ev_start = datetime.combine(night, time(0, 0)) + timedelta(
                minutes=s.evening_start)
            ev_end = datetime.combine(night + timedelta(days=1), time(0, 0)
                                      ) + timedelta(minutes=s.evening_end)
            first = _slot(grid_start, ev_start, s.slot_minutes)
            last = _slot(grid_start, ev_end - timedelta(minutes=1), s.slot_minutes)
            lo = max(first, t_arrive, t_ckin)
            hi = min(last, t_leave, t_ckout - 1)
            if hi - lo + 1 < s.sleep_slots:
                return False
    return True


def solve_bruteforce(request: TravelRequest, inventory: Inventory,
                     objective_kind: str = "min_cost",
                     settings: OracleSettings = OracleSettings()
                     ) -> Optional[tuple[int, Itinerary]]:
    """Optimal (objective, itinerary) by exhaustive enumeration, or None."""
    s = settings
    grid_start = datetime.combine(request.segments[0].date, time(0, 0))
    grid_end = datetime.combine(request.segments[-1].date + timedelta(days=1),
                                time(0, 0))
    per_segment = [
        [f for f in inventory.flights if f.segment_index == k
         and f.arrival < grid_end
         and _slot(grid_start, f.arrival, s.slot_minutes)
         - _slot(grid_start, f.departure, s.slot_minutes) >= 2]
        for k in range(len(request.segments))
    ]
    if any(not g for g in per_segment):
        return None
    blocks = away_blocks(request.segments)
    per_block = [
        [h for h in inventory.hotels if h.city == block.city]
        for block in blocks
    ]
    if any(not g for g in per_block) and s.sleep_slots >= 1 and blocks:
        return None

    best: Optional[tuple[int, Itinerary]] = None
    stay_choices = itertools.product(*per_block) if blocks else [()]
    stay_choices = list(stay_choices)
    for flights in itertools.product(*per_segment):
        # flights must not overlap in time
        ok = True
        for k in range(len(flights) - 1):
            t_land = _slot(grid_start, flights[k].arrival, s.slot_minutes)
            t_dep = _slot(grid_start, flights[k + 1].departure, s.slot_minutes)
            if t_dep < t_land:
                ok = False
                break
        if not ok:
            continue
        for hotels in stay_choices:
            stays = tuple(HotelStay(h.id, b.check_in, b.check_out)
                          for h, b in zip(hotels, blocks))
            stays_cost = [len(b.nights) * h.nightly_price
                          for h, b in zip(hotels, blocks)]
            flight_cost = sum(f.price for f in flights)
            hotel_cost = sum(stays_cost)
            obj = _objective(request, flights, stays_cost, hotels,
                             objective_kind, s)
            if best is not None and obj >= best[0]:
                continue
            itinerary = Itinerary(
                chosen_flights=tuple(f.id for f in flights),
                hotel_stays=stays,
                flight_cost=flight_cost,
                hotel_cost=hotel_cost,
                total_cost=flight_cost + hotel_cost,
                objective_kind=objective_kind,
                objective_value=obj,
            )
            if not check_feasibility(itinerary, request, inventory).feasible:
                continue
            if s.sleep_slots >= 1 and not _sleep_ok(
                    request, flights, dict(enumerate(zip(hotels, stays))),
                    s, grid_start):
                continue
            best = (obj, itinerary)
    return best
