import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ttg.generator import GeneratorConfig, sample_pair, sample_request
from ttg.schema import (
    HotelStay,
    Itinerary,
    MalformedJson,
    SchemaViolation,
    UnknownOffer,
    away_blocks,
    away_nights,
    canonicalize,
    check_feasibility,
    is_red_eye,
    night_city,
    parse_request,
    request_from_dict,
    request_to_dict,
    serialize_request,
)

from conftest import make_pairs


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def test_parse_demo_request(demo_request):
    assert len(demo_request.segments) == 3
    assert demo_request.cities == ("DEN", "MIA", "JFK")
    assert demo_request.is_round_trip
    assert demo_request.budget.flight_total_budget == 138300
    assert demo_request.budget.hotel_daily_budget == 31700
    assert demo_request.budget.hotel_total_budget == 95200
    assert demo_request.airline_constraints.must_not_basic_economy is True
    assert demo_request.airline_constraints.no_mixed_cabin is True


def test_parse_rejects_empty_object():
    with pytest.raises(SchemaViolation) as e:
        parse_request("{}")
    assert "segments" in str(e.value) or "schema_version" in str(e.value)


def test_parse_rejects_non_json():
    with pytest.raises(MalformedJson):
        parse_request("not json {")


def test_parse_rejects_decreasing_dates():
    body = {
        "schema_version": 1,
        "request_id": "r",
        "segments": [
            {"origin": "DEN", "destination": "MIA", "date": "2025-01-17"},
            {"origin": "MIA", "destination": "DEN", "date": "2025-01-15"},
        ],
    }
    with pytest.raises(SchemaViolation) as e:
        request_from_dict(body)
    assert "non-decreasing" in str(e.value)


def test_parse_rejects_broken_chain():
    body = {
        "schema_version": 1,
        "request_id": "r",
        "segments": [
            {"origin": "DEN", "destination": "MIA", "date": "2025-01-15"},
            {"origin": "JFK", "destination": "DEN", "date": "2025-01-17"},
        ],
    }
    with pytest.raises(SchemaViolation) as e:
        request_from_dict(body)
    assert "chain" in str(e.value)


def test_parse_rejects_unknown_field():
    body = {
        "schema_version": 1,
        "request_id": "r",
        "segments": [{"origin": "DEN", "destination": "MIA",
                      "date": "2025-01-15"}],
        "mystery": 1,
    }
    with pytest.raises(SchemaViolation) as e:
        request_from_dict(body)
    assert "unknown field" in str(e.value)


def test_parse_rejects_overlapping_airline_sets():
    body = {
        "schema_version": 1,
        "request_id": "r",
        "segments": [{"origin": "DEN", "destination": "MIA",
                      "date": "2025-01-15"}],
        "airline_constraints": {"preferred_airlines": ["AA", "UA"],
                                "avoided_airlines": ["UA"]},
    }
    with pytest.raises(SchemaViolation):
        request_from_dict(body)


def test_parse_rejects_bad_price_range():
    body = {
        "schema_version": 1,
        "request_id": "r",
        "segments": [{"origin": "DEN", "destination": "MIA",
                      "date": "2025-01-15"}],
        "airline_constraints": {"price_range": [200, 100]},
    }
    with pytest.raises(SchemaViolation) as e:
        request_from_dict(body)
    assert "min exceeds max" in str(e.value)


# ---------------------------------------------------------------------------
# canonicalization
# ---------------------------------------------------------------------------


def test_canonical_ignores_key_order():
    a = json.dumps({
        "schema_version": 1, "request_id": "r",
        "segments": [{"origin": "DEN", "destination": "MIA",
                      "date": "2025-01-15"}],
        "budget": {"total_budget": 100000},
    })
    b = json.dumps({
        "budget": {"total_budget": 100000},
        "segments": [{"date": "2025-01-15", "destination": "MIA",
                      "origin": "DEN"}],
        "request_id": "r", "schema_version": 1,
    })
    assert canonicalize(parse_request(a)) == canonicalize(parse_request(b))


def test_canonical_sorts_set_fields():
    def body(airlines):
        return {
            "schema_version": 1, "request_id": "r",
            "segments": [{"origin": "DEN", "destination": "MIA",
                          "date": "2025-01-15"}],
            "airline_constraints": {"preferred_airlines": airlines},
        }
    a = request_from_dict(body(["UA", "AA"]))
    b = request_from_dict(body(["AA", "UA"]))
    assert canonicalize(a) == canonicalize(b)


def test_canonical_differs_on_values():
    def body(cabin):
        return {
            "schema_version": 1, "request_id": "r",
            "segments": [{"origin": "DEN", "destination": "MIA",
                          "date": "2025-01-15"}],
            "airline_constraints": {"cabin_class": cabin},
        }
    a = request_from_dict(body("coach"))
    b = request_from_dict(body("business"))
    assert canonicalize(a) != canonicalize(b)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_roundtrip_parse_serialize(seed):
    config = GeneratorConfig()
    request = sample_request(random.Random(seed), config)
    text = serialize_request(request)
    again = parse_request(text)
    assert canonicalize(again) == canonicalize(request)
    assert serialize_request(again) == text


# ---------------------------------------------------------------------------
# red-eye and away-night structure
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("dep,arr,expected", [
    (10 * 60, 13 * 60, False),
    (21 * 60, 23 * 60 + 30, True),     # departs in the late window
    (4 * 60 + 59, 8 * 60, True),       # departs before 05:00
    (5 * 60, 8 * 60, False),
    (22 * 60 + 30, 1 * 60 + 30, True), # arrives between 01:00 and 05:59
    (18 * 60, 5 * 60 + 59, True),
    (18 * 60, 6 * 60, False),
])
def test_red_eye_rule(dep, arr, expected):
    assert is_red_eye(dep, arr) == expected


def test_away_blocks_demo(demo_request):
    nights = away_nights(demo_request.segments)
    assert [n.isoformat() for n in nights] == [
        "2025-01-15", "2025-01-16", "2025-01-17"]
    assert night_city(demo_request.segments, nights[0]) == "MIA"
    assert night_city(demo_request.segments, nights[2]) == "JFK"
    blocks = away_blocks(demo_request.segments)
    assert [(b.city, b.check_in.isoformat(), b.check_out.isoformat())
            for b in blocks] == [
        ("MIA", "2025-01-15", "2025-01-17"),
        ("JFK", "2025-01-17", "2025-01-18"),
    ]
    assert blocks[0].arrival_segment == 0
    assert blocks[0].departure_segment == 1
    assert blocks[1].departure_segment == 2


def test_one_way_has_no_away_nights():
    body = {
        "schema_version": 1, "request_id": "r",
        "segments": [{"origin": "DEN", "destination": "MIA",
                      "date": "2025-01-15"}],
    }
    request = request_from_dict(body)
    assert away_nights(request.segments) == []
    assert away_blocks(request.segments) == []


# ---------------------------------------------------------------------------
# feasibility checker
# ---------------------------------------------------------------------------


def _plant_itinerary(request, inventory):
    blocks = away_blocks(request.segments)
    flights = tuple(f"f{k}-plant" for k in range(len(request.segments)))
    stays = tuple(HotelStay(f"h-{b.city}-plant{i}", b.check_in, b.check_out)
                  for i, b in enumerate(blocks))
    fc = sum(inventory.flight(f).price for f in flights)
    hc = sum(s.nights * inventory.hotel(s.hotel_id).nightly_price
             for s in stays)
    return Itinerary(flights, stays, fc, hc, fc + hc, "min_cost", 0)


def test_checker_accepts_plants(default_config):
    for request, inventory in make_pairs(default_config, 25):
        it = _plant_itinerary(request, inventory)
        report = check_feasibility(it, request, inventory)
        assert report.feasible, report.violations


def test_checker_flags_basic_economy(default_config):
    request, inventory = sample_pair(11, 0, default_config)
    obj = request_to_dict(request)
    obj.setdefault("airline_constraints", {})["must_not_basic_economy"] = True
    request = request_from_dict(obj)
    it = _plant_itinerary(request, inventory)
    flights = {f.id: f for f in inventory.flights}
    basic = next((f for f in inventory.flights
                  if f.is_basic_economy and "plant" not in f.id), None)
    assert basic is not None
    chosen = list(it.chosen_flights)
    chosen[basic.segment_index] = basic.id
    seg_plant = flights[it.chosen_flights[basic.segment_index]]
    fc = it.flight_cost - seg_plant.price + basic.price
    bad = Itinerary(tuple(chosen), it.hotel_stays, fc, it.hotel_cost,
                    fc + it.hotel_cost, "min_cost", 0)
    report = check_feasibility(bad, request, inventory)
    fields = {v.field for v in report.violations}
    assert "airline_constraints.must_not_basic_economy" in fields


def test_checker_flags_daily_budget(demo_pair):
    request, inventory = demo_pair
    it = _plant_itinerary(request, inventory)
    # a stay priced above the daily budget must be reported on that field
    pricey = next(h for h in inventory.hotels
                  if h.nightly_price > request.budget.hotel_daily_budget
                  and h.city == "MIA")
    stays = (HotelStay(pricey.id, it.hotel_stays[0].check_in,
                       it.hotel_stays[0].check_out), it.hotel_stays[1])
    hc = sum(s.nights * inventory.hotel(s.hotel_id).nightly_price
             for s in stays)
    bad = Itinerary(it.chosen_flights, stays, it.flight_cost, hc,
                    it.flight_cost + hc, "min_cost", 0)
    report = check_feasibility(bad, request, inventory)
    fields = {v.field for v in report.violations}
    assert "budget.hotel_daily_budget" in fields


def test_checker_reports_all_violations_not_first(demo_pair):
    request, inventory = demo_pair
    it = _plant_itinerary(request, inventory)
    bad = Itinerary(it.chosen_flights, (), it.flight_cost, 0, it.flight_cost,
                    "min_cost", 0)
    report = check_feasibility(bad, request, inventory)
    nights = {v.detail for v in report.violations
              if v.field == "itinerary.hotel_stays"}
    assert len(nights) == 3  # one violation per uncovered night


def test_checker_unknown_offer(demo_pair):
    request, inventory = demo_pair
    it = _plant_itinerary(request, inventory)
    ghost = Itinerary(("nope",) + it.chosen_flights[1:], it.hotel_stays,
                      it.flight_cost, it.hotel_cost, it.total_cost,
                      "min_cost", 0)
    with pytest.raises(UnknownOffer):
        check_feasibility(ghost, request, inventory)


def test_checker_deterministic(demo_pair):
    request, inventory = demo_pair
    it = _plant_itinerary(request, inventory)
    a = check_feasibility(it, request, inventory)
    b = check_feasibility(it, request, inventory)
    assert a == b
