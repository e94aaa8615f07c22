"""Symbolic travel data model: requests, inventories, itineraries.

Conventions used throughout the package:
  * money is integer cents,
  * times of day are integer minutes since midnight,
  * timestamps are ISO-8601 ("YYYY-MM-DDTHH:MM"), dates are "YYYY-MM-DD",
  * list-valued preference fields have set semantics and are kept sorted.

All types are frozen dataclasses and every operation here is a pure
function, so everything is safe for unrestricted concurrent use.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from typing import Any, Iterator, Optional

SCHEMA_VERSION = 1

CABINS = ("basic_economy", "coach", "business", "first")
OBJECTIVE_KINDS = ("min_cost", "better_hotel", "better_flight")

# Default red-eye definition: departs within [21:00, 05:00) local or
# arrives within [01:00, 06:00).  Both windows are minutes of day and the
# departure window wraps midnight.
RED_EYE_DEP_START = 21 * 60
RED_EYE_DEP_END = 5 * 60
RED_EYE_ARR_START = 1 * 60
RED_EYE_ARR_END = 6 * 60

_CITY_RE = re.compile(r"^[A-Z]{3}$")


class MalformedJson(ValueError):
    """Input is not valid JSON."""


class SchemaViolation(ValueError):
    """Input is JSON but breaks the schema; carries the offending field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


class UnknownOffer(KeyError):
    """An itinerary references a flight or hotel id absent from the inventory."""


def is_red_eye(dep_minutes: int, arr_minutes: int) -> bool:
    """Apply the red-eye definition to local departure/arrival minutes of day."""
    dep_red = dep_minutes >= RED_EYE_DEP_START or dep_minutes < RED_EYE_DEP_END
    arr_red = RED_EYE_ARR_START <= arr_minutes < RED_EYE_ARR_END
    return dep_red or arr_red


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    origin: str
    destination: str
    date: date


@dataclass(frozen=True)
class TimeWindow:
    earliest: int  # minutes of day
    latest: int
    soft: bool = True


@dataclass(frozen=True)
class AirlineConstraints:
    price_range: Optional[tuple[int, int]] = None  # total flight spend, cents
    departure_window: Optional[tuple[Optional[TimeWindow], ...]] = None  # per segment
    arrival_window: Optional[tuple[Optional[TimeWindow], ...]] = None
    cabin_class: Optional[str] = None
    refundable: Optional[bool] = None
    non_stop: Optional[bool] = None
    plane_type: Optional[tuple[str, ...]] = None
    preferred_airlines: Optional[tuple[str, ...]] = None
    avoided_airlines: Optional[tuple[str, ...]] = None
    must_not_basic_economy: Optional[bool] = None
    avoid_red_eye: Optional[bool] = None
    no_mixed_cabin: Optional[bool] = None

    FIELDS = (
        "price_range",
        "departure_window",
        "arrival_window",
        "cabin_class",
        "refundable",
        "non_stop",
        "plane_type",
        "preferred_airlines",
        "avoided_airlines",
        "must_not_basic_economy",
        "avoid_red_eye",
        "no_mixed_cabin",
    )

    def count(self) -> int:
        """Number of set fields — the request's airline constraint count."""
        return sum(getattr(self, f) is not None for f in self.FIELDS)


@dataclass(frozen=True)
class HotelConstraints:
    price_range: Optional[tuple[int, int]] = None  # nightly price, cents
    rating_min: Optional[int] = None
    preferred_brands: Optional[tuple[str, ...]] = None
    avoided_brands: Optional[tuple[str, ...]] = None

    FIELDS = ("price_range", "rating_min", "preferred_brands", "avoided_brands")

    def count(self) -> int:
        return sum(getattr(self, f) is not None for f in self.FIELDS)


@dataclass(frozen=True)
class BudgetConstraints:
    total_budget: Optional[int] = None
    flight_total_budget: Optional[int] = None
    hotel_total_budget: Optional[int] = None
    hotel_daily_budget: Optional[int] = None

    FIELDS = (
        "total_budget",
        "flight_total_budget",
        "hotel_total_budget",
        "hotel_daily_budget",
    )


@dataclass(frozen=True)
class TravelRequest:
    request_id: str
    segments: tuple[Segment, ...]
    airline_constraints: AirlineConstraints
    hotel_constraints: HotelConstraints
    budget: BudgetConstraints

    @property
    def cities(self) -> tuple[str, ...]:
        """Distinct visited cities, in first-appearance order."""
        seen: list[str] = []
        for seg in self.segments:
            for c in (seg.origin, seg.destination):
                if c not in seen:
                    seen.append(c)
        return tuple(seen)

    @property
    def is_round_trip(self) -> bool:
        return self.segments[-1].destination == self.segments[0].origin


@dataclass(frozen=True)
class FlightOffer:
    id: str
    segment_index: int
    origin: str
    destination: str
    airline: str
    flight_number: str
    cabin: str
    price: int  # cents
    departure: datetime
    arrival: datetime
    non_stop: bool
    aircraft: str
    refundable: bool
    is_basic_economy: bool
    is_red_eye: bool
    is_mixed_cabin: bool


@dataclass(frozen=True)
class HotelOffer:
    id: str
    city: str
    brand: str
    rating: int  # stars, 1..5
    nightly_price: int  # cents
    checkin_earliest: int  # minutes of day
    checkout_latest: int
    available_from: date
    available_to: date  # inclusive


@dataclass(frozen=True)
class Inventory:
    flights: tuple[FlightOffer, ...]
    hotels: tuple[HotelOffer, ...]

    def flight(self, offer_id: str) -> FlightOffer:
        for f in self.flights:
            if f.id == offer_id:
                return f
        raise UnknownOffer(offer_id)

    def hotel(self, offer_id: str) -> HotelOffer:
        for h in self.hotels:
            if h.id == offer_id:
                return h
        raise UnknownOffer(offer_id)


@dataclass(frozen=True)
class HotelStay:
    hotel_id: str
    check_in: date
    check_out: date

    @property
    def nights(self) -> int:
        return (self.check_out - self.check_in).days


@dataclass(frozen=True)
class Itinerary:
    chosen_flights: tuple[str, ...]  # one flight id per segment, in order
    hotel_stays: tuple[HotelStay, ...]
    flight_cost: int
    hotel_cost: int
    total_cost: int
    objective_kind: str
    objective_value: int  # scaled integer; see the model module


@dataclass(frozen=True)
class Violation:
    field: str  # constraint field path, e.g. "budget.hotel_daily_budget"
    detail: str


@dataclass(frozen=True)
class ConstraintReport:
    feasible: bool
    violations: tuple[Violation, ...]


# The contiguous block of away nights spent at one city; hotel stays are
# booked per block (check-out is the morning after the last night).
@dataclass(frozen=True)
class AwayBlock:
    city: str
    check_in: date
    check_out: date
    arrival_segment: int  # segment whose destination opens the block
    departure_segment: Optional[int]  # segment leaving the block, None at trip end

    @property
    def nights(self) -> tuple[date, ...]:
        n = (self.check_out - self.check_in).days
        return tuple(self.check_in + timedelta(days=i) for i in range(n))


def away_nights(segments: tuple[Segment, ...]) -> list[date]:
    """Nights the traveller spends away: every date in [first, last) segment date."""
    first = segments[0].date
    last = segments[-1].date
    return [first + timedelta(days=i) for i in range((last - first).days)]


def night_city(segments: tuple[Segment, ...], night: date) -> str:
    """City where the traveller spends the given night: destination of the
    last segment dated on or before it."""
    city = segments[0].origin
    for seg in segments:
        if seg.date <= night:
            city = seg.destination
    return city


def away_blocks(segments: tuple[Segment, ...]) -> list[AwayBlock]:
    """Group away nights into contiguous same-city blocks, one hotel stay each."""
    nights = away_nights(segments)
    blocks: list[AwayBlock] = []
    i = 0
    while i < len(nights):
        city = night_city(segments, nights[i])
        j = i
        while j + 1 < len(nights) and night_city(segments, nights[j + 1]) == city:
            j += 1
        check_in = nights[i]
        check_out = nights[j] + timedelta(days=1)
        arrival = max(
            k for k, seg in enumerate(segments)
            if seg.date <= check_in and seg.destination == city
        )
        departure = None
        for k, seg in enumerate(segments):
            if seg.origin == city and seg.date >= check_out:
                departure = k
                break
        blocks.append(AwayBlock(city, check_in, check_out, arrival, departure))
        i = j + 1
    return blocks


# ---------------------------------------------------------------------------
# json helpers
# ---------------------------------------------------------------------------


def _fail(path: str, msg: str) -> None:
    raise SchemaViolation(path, msg)


def _expect_object(v: Any, path: str) -> dict:
    if not isinstance(v, dict):
        _fail(path, f"expected object, got {type(v).__name__}")
    return v


def _expect_keys(obj: dict, path: str, allowed: tuple[str, ...]) -> None:
    for k in obj:
        if k not in allowed:
            _fail(f"{path}.{k}" if path else k, "unknown field")


def _get_int(obj: dict, path: str, key: str, minimum: int | None = None) -> int:
    v = obj.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        _fail(f"{path}.{key}", "expected integer")
    if minimum is not None and v < minimum:
        _fail(f"{path}.{key}", f"must be >= {minimum}")
    return v


def _get_str(obj: dict, path: str, key: str) -> str:
    v = obj.get(key)
    if not isinstance(v, str):
        _fail(f"{path}.{key}", "expected string")
    return v


def _get_bool(v: Any, path: str) -> bool:
    if not isinstance(v, bool):
        _fail(path, "expected boolean")
    return v


def _parse_date(s: Any, path: str) -> date:
    if not isinstance(s, str):
        _fail(path, "expected date string")
    try:
        return date.fromisoformat(s)
    except ValueError:
        _fail(path, f"not an ISO date: {s!r}")


def _parse_datetime(s: Any, path: str) -> datetime:
    if not isinstance(s, str):
        _fail(path, "expected datetime string")
    try:
        return datetime.fromisoformat(s)
    except ValueError:
        _fail(path, f"not an ISO datetime: {s!r}")


def _parse_city(s: Any, path: str) -> str:
    if not isinstance(s, str) or not _CITY_RE.match(s):
        _fail(path, f"expected an uppercase 3-letter city code, got {s!r}")
    return s


def _parse_minutes(v: Any, path: str) -> int:
    if not isinstance(v, int) or isinstance(v, bool) or not (0 <= v < 24 * 60):
        _fail(path, "expected minutes of day in [0, 1440)")
    return v


def _parse_string_set(v: Any, path: str) -> tuple[str, ...]:
    if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
        _fail(path, "expected list of strings")
    if len(set(v)) != len(v):
        _fail(path, "duplicate entries")
    return tuple(sorted(v))


def _parse_price_range(v: Any, path: str) -> tuple[int, int]:
    if not isinstance(v, list) or len(v) != 2:
        _fail(path, "expected [min, max]")
    lo, hi = v
    for x in (lo, hi):
        if not isinstance(x, int) or isinstance(x, bool) or x < 0:
            _fail(path, "expected non-negative integer cents")
    if lo > hi:
        _fail(path, "min exceeds max")
    return (lo, hi)


def _check_version(obj: dict, path: str) -> None:
    v = obj.get("schema_version")
    if v != SCHEMA_VERSION:
        _fail(f"{path}.schema_version" if path else "schema_version",
              f"expected {SCHEMA_VERSION}, got {v!r}")


# ---------------------------------------------------------------------------
# request parsing / serialization
# ---------------------------------------------------------------------------


def _parse_windows(v: Any, path: str, n_segments: int
                   ) -> tuple[Optional[TimeWindow], ...]:
    if not isinstance(v, list):
        _fail(path, "expected per-segment list of windows")
    if len(v) != n_segments:
        _fail(path, f"expected {n_segments} entries (one per segment), got {len(v)}")
    out: list[Optional[TimeWindow]] = []
    for i, w in enumerate(v):
        if w is None:
            out.append(None)
            continue
        wp = f"{path}[{i}]"
        w = _expect_object(w, wp)
        _expect_keys(w, wp, ("earliest", "latest", "soft"))
        earliest = _parse_minutes(w.get("earliest"), f"{wp}.earliest")
        latest = _parse_minutes(w.get("latest"), f"{wp}.latest")
        if earliest > latest:
            _fail(wp, "earliest exceeds latest")
        soft = _get_bool(w.get("soft", True), f"{wp}.soft")
        out.append(TimeWindow(earliest, latest, soft))
    if all(w is None for w in out):
        _fail(path, "all entries null; omit the field instead")
    return tuple(out)


def _parse_airline_constraints(obj: Any, path: str, n_segments: int
                               ) -> AirlineConstraints:
    obj = _expect_object(obj, path)
    _expect_keys(obj, path, AirlineConstraints.FIELDS)
    kw: dict[str, Any] = {}
    if "price_range" in obj:
        kw["price_range"] = _parse_price_range(obj["price_range"], f"{path}.price_range")
    for key in ("departure_window", "arrival_window"):
        if key in obj:
            kw[key] = _parse_windows(obj[key], f"{path}.{key}", n_segments)
    if "cabin_class" in obj:
        v = _get_str(obj, path, "cabin_class")
        if v not in CABINS:
            _fail(f"{path}.cabin_class", f"expected one of {CABINS}, got {v!r}")
        kw["cabin_class"] = v
    for key in ("refundable", "non_stop", "must_not_basic_economy",
                "avoid_red_eye", "no_mixed_cabin"):
        if key in obj:
            kw[key] = _get_bool(obj[key], f"{path}.{key}")
    for key in ("plane_type", "preferred_airlines", "avoided_airlines"):
        if key in obj:
            kw[key] = _parse_string_set(obj[key], f"{path}.{key}")
    c = AirlineConstraints(**kw)
    if c.preferred_airlines and c.avoided_airlines:
        overlap = set(c.preferred_airlines) & set(c.avoided_airlines)
        if overlap:
            _fail(f"{path}.preferred_airlines",
                  f"overlaps avoided_airlines: {sorted(overlap)}")
    return c


def _parse_hotel_constraints(obj: Any, path: str) -> HotelConstraints:
    obj = _expect_object(obj, path)
    _expect_keys(obj, path, HotelConstraints.FIELDS)
    kw: dict[str, Any] = {}
    if "price_range" in obj:
        kw["price_range"] = _parse_price_range(obj["price_range"], f"{path}.price_range")
    if "rating_min" in obj:
        v = _get_int(obj, path, "rating_min")
        if not 1 <= v <= 5:
            _fail(f"{path}.rating_min", "expected rating in 1..5")
        kw["rating_min"] = v
    for key in ("preferred_brands", "avoided_brands"):
        if key in obj:
            kw[key] = _parse_string_set(obj[key], f"{path}.{key}")
    c = HotelConstraints(**kw)
    if c.preferred_brands and c.avoided_brands:
        overlap = set(c.preferred_brands) & set(c.avoided_brands)
        if overlap:
            _fail(f"{path}.preferred_brands",
                  f"overlaps avoided_brands: {sorted(overlap)}")
    return c


def _parse_budget(obj: Any, path: str) -> BudgetConstraints:
    obj = _expect_object(obj, path)
    _expect_keys(obj, path, BudgetConstraints.FIELDS)
    kw = {}
    for key in BudgetConstraints.FIELDS:
        if key in obj:
            kw[key] = _get_int(obj, path, key, minimum=1)
    return BudgetConstraints(**kw)


def request_from_dict(obj: Any, path: str = "") -> TravelRequest:
    obj = _expect_object(obj, path or "request")
    top = path or ""
    _expect_keys(obj, top, ("schema_version", "request_id", "segments",
                            "airline_constraints", "hotel_constraints", "budget"))
    _check_version(obj, top)
    prefix = f"{top}." if top else ""
    request_id = _get_str(obj, top, "request_id")

    raw_segments = obj.get("segments")
    if not isinstance(raw_segments, list) or not raw_segments:
        _fail(f"{prefix}segments", "expected non-empty list")
    segments: list[Segment] = []
    for i, s in enumerate(raw_segments):
        sp = f"{prefix}segments[{i}]"
        s = _expect_object(s, sp)
        _expect_keys(s, sp, ("origin", "destination", "date"))
        segments.append(Segment(
            origin=_parse_city(s.get("origin"), f"{sp}.origin"),
            destination=_parse_city(s.get("destination"), f"{sp}.destination"),
            date=_parse_date(s.get("date"), f"{sp}.date"),
        ))
    for i, seg in enumerate(segments):
        if seg.origin == seg.destination:
            _fail(f"{prefix}segments[{i}]", "origin equals destination")
        if i > 0:
            if segments[i - 1].destination != seg.origin:
                _fail(f"{prefix}segments[{i}].origin",
                      f"does not chain from previous destination "
                      f"{segments[i - 1].destination}")
            if seg.date < segments[i - 1].date:
                _fail(f"{prefix}segments[{i}].date", "segment dates must be non-decreasing")

    airline = _parse_airline_constraints(
        obj.get("airline_constraints", {}), f"{prefix}airline_constraints", len(segments))
    hotel = _parse_hotel_constraints(
        obj.get("hotel_constraints", {}), f"{prefix}hotel_constraints")
    budget = _parse_budget(obj.get("budget", {}), f"{prefix}budget")
    return TravelRequest(request_id, tuple(segments), airline, hotel, budget)


def parse_request(json_text: str) -> TravelRequest:
    """Parse and validate a request JSON document."""
    try:
        obj = json.loads(json_text)
    except json.JSONDecodeError as e:
        raise MalformedJson(str(e)) from e
    return request_from_dict(obj)


def _window_to_dict(w: Optional[TimeWindow]) -> Optional[dict]:
    if w is None:
        return None
    return {"earliest": w.earliest, "latest": w.latest, "soft": w.soft}


def request_to_dict(req: TravelRequest) -> dict:
    """Canonical plain-dict form: sorted set fields, absent optionals omitted."""
    out: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "request_id": req.request_id,
        "segments": [
            {"origin": s.origin, "destination": s.destination, "date": s.date.isoformat()}
            for s in req.segments
        ],
    }
    ac: dict[str, Any] = {}
    for f in AirlineConstraints.FIELDS:
        v = getattr(req.airline_constraints, f)
        if v is None:
            continue
        if f in ("departure_window", "arrival_window"):
            ac[f] = [_window_to_dict(w) for w in v]
        elif f == "price_range":
            ac[f] = list(v)
        elif isinstance(v, tuple):
            ac[f] = sorted(v)
        else:
            ac[f] = v
    hc: dict[str, Any] = {}
    for f in HotelConstraints.FIELDS:
        v = getattr(req.hotel_constraints, f)
        if v is None:
            continue
        hc[f] = list(v) if f == "price_range" else (sorted(v) if isinstance(v, tuple) else v)
    bc = {f: getattr(req.budget, f) for f in BudgetConstraints.FIELDS
          if getattr(req.budget, f) is not None}
    if ac:
        out["airline_constraints"] = ac
    if hc:
        out["hotel_constraints"] = hc
    if bc:
        out["budget"] = bc
    return out


def canonicalize(req: TravelRequest) -> str:
    """Deterministic normal form; equal requests serialize byte-identically."""
    return json.dumps(request_to_dict(req), sort_keys=True, separators=(",", ":"))


def serialize_request(req: TravelRequest) -> str:
    return canonicalize(req)


# ---------------------------------------------------------------------------
# inventory parsing / serialization
# ---------------------------------------------------------------------------

_FLIGHT_KEYS = ("id", "segment_index", "origin", "destination", "airline",
                "flight_number", "cabin", "price", "departure", "arrival",
                "non_stop", "aircraft", "refundable", "is_basic_economy",
                "is_red_eye", "is_mixed_cabin")

_HOTEL_KEYS = ("id", "city", "brand", "rating", "nightly_price",
               "checkin_earliest", "checkout_latest", "available_from",
               "available_to")


def _flight_from_dict(obj: Any, path: str) -> FlightOffer:
    obj = _expect_object(obj, path)
    _expect_keys(obj, path, _FLIGHT_KEYS)
    dep = _parse_datetime(obj.get("departure"), f"{path}.departure")
    arr = _parse_datetime(obj.get("arrival"), f"{path}.arrival")
    if dep >= arr:
        _fail(f"{path}.arrival", "arrival must be after departure")
    cabin = _get_str(obj, path, "cabin")
    if cabin not in CABINS:
        _fail(f"{path}.cabin", f"expected one of {CABINS}, got {cabin!r}")
    offer = FlightOffer(
        id=_get_str(obj, path, "id"),
        segment_index=_get_int(obj, path, "segment_index", minimum=0),
        origin=_parse_city(obj.get("origin"), f"{path}.origin"),
        destination=_parse_city(obj.get("destination"), f"{path}.destination"),
        airline=_get_str(obj, path, "airline"),
        flight_number=_get_str(obj, path, "flight_number"),
        cabin=cabin,
        price=_get_int(obj, path, "price", minimum=1),
        departure=dep,
        arrival=arr,
        non_stop=_get_bool(obj.get("non_stop"), f"{path}.non_stop"),
        aircraft=_get_str(obj, path, "aircraft"),
        refundable=_get_bool(obj.get("refundable"), f"{path}.refundable"),
        is_basic_economy=_get_bool(obj.get("is_basic_economy"), f"{path}.is_basic_economy"),
        is_red_eye=_get_bool(obj.get("is_red_eye"), f"{path}.is_red_eye"),
        is_mixed_cabin=_get_bool(obj.get("is_mixed_cabin"), f"{path}.is_mixed_cabin"),
    )
    expected_red_eye = is_red_eye(dep.hour * 60 + dep.minute, arr.hour * 60 + arr.minute)
    if offer.is_red_eye != expected_red_eye:
        _fail(f"{path}.is_red_eye",
              f"inconsistent with departure/arrival times (expected {expected_red_eye})")
    return offer


def _hotel_from_dict(obj: Any, path: str) -> HotelOffer:
    obj = _expect_object(obj, path)
    _expect_keys(obj, path, _HOTEL_KEYS)
    rating = _get_int(obj, path, "rating")
    if not 1 <= rating <= 5:
        _fail(f"{path}.rating", "expected rating in 1..5")
    a_from = _parse_date(obj.get("available_from"), f"{path}.available_from")
    a_to = _parse_date(obj.get("available_to"), f"{path}.available_to")
    if a_from > a_to:
        _fail(f"{path}.available_to", "availability range is empty")
    return HotelOffer(
        id=_get_str(obj, path, "id"),
        city=_parse_city(obj.get("city"), f"{path}.city"),
        brand=_get_str(obj, path, "brand"),
        rating=rating,
        nightly_price=_get_int(obj, path, "nightly_price", minimum=1),
        checkin_earliest=_parse_minutes(obj.get("checkin_earliest"), f"{path}.checkin_earliest"),
        checkout_latest=_parse_minutes(obj.get("checkout_latest"), f"{path}.checkout_latest"),
        available_from=a_from,
        available_to=a_to,
    )


def inventory_from_dict(obj: Any, path: str = "inventory") -> Inventory:
    obj = _expect_object(obj, path)
    _expect_keys(obj, path, ("schema_version", "flights", "hotels"))
    _check_version(obj, path)
    raw_f = obj.get("flights")
    raw_h = obj.get("hotels")
    if not isinstance(raw_f, list):
        _fail(f"{path}.flights", "expected list")
    if not isinstance(raw_h, list):
        _fail(f"{path}.hotels", "expected list")
    flights = tuple(_flight_from_dict(f, f"{path}.flights[{i}]")
                    for i, f in enumerate(raw_f))
    hotels = tuple(_hotel_from_dict(h, f"{path}.hotels[{i}]")
                   for i, h in enumerate(raw_h))
    ids = [f.id for f in flights] + [h.id for h in hotels]
    if len(set(ids)) != len(ids):
        _fail(f"{path}", "duplicate offer ids")
    return Inventory(flights, hotels)


def parse_inventory(json_text: str) -> Inventory:
    try:
        obj = json.loads(json_text)
    except json.JSONDecodeError as e:
        raise MalformedJson(str(e)) from e
    return inventory_from_dict(obj)


def _dt(d: datetime) -> str:
    return d.strftime("%Y-%m-%dT%H:%M")


def inventory_to_dict(inv: Inventory) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "flights": [
            {
                "id": f.id, "segment_index": f.segment_index,
                "origin": f.origin, "destination": f.destination,
                "airline": f.airline, "flight_number": f.flight_number,
                "cabin": f.cabin, "price": f.price,
                "departure": _dt(f.departure), "arrival": _dt(f.arrival),
                "non_stop": f.non_stop, "aircraft": f.aircraft,
                "refundable": f.refundable, "is_basic_economy": f.is_basic_economy,
                "is_red_eye": f.is_red_eye, "is_mixed_cabin": f.is_mixed_cabin,
            }
            for f in inv.flights
        ],
        "hotels": [
            {
                "id": h.id, "city": h.city, "brand": h.brand, "rating": h.rating,
                "nightly_price": h.nightly_price,
                "checkin_earliest": h.checkin_earliest,
                "checkout_latest": h.checkout_latest,
                "available_from": h.available_from.isoformat(),
                "available_to": h.available_to.isoformat(),
            }
            for h in inv.hotels
        ],
    }


def serialize_inventory(inv: Inventory) -> str:
    return json.dumps(inventory_to_dict(inv), sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# itinerary parsing / serialization
# ---------------------------------------------------------------------------


def itinerary_from_dict(obj: Any, path: str = "itinerary") -> Itinerary:
    obj = _expect_object(obj, path)
    _expect_keys(obj, path, ("schema_version", "chosen_flights", "hotel_stays",
                             "flight_cost", "hotel_cost", "total_cost",
                             "objective_kind", "objective_value"))
    _check_version(obj, path)
    raw_cf = obj.get("chosen_flights")
    if not isinstance(raw_cf, list) or not all(isinstance(x, str) for x in raw_cf):
        _fail(f"{path}.chosen_flights", "expected list of flight ids")
    raw_stays = obj.get("hotel_stays")
    if not isinstance(raw_stays, list):
        _fail(f"{path}.hotel_stays", "expected list")
    stays = []
    for i, s in enumerate(raw_stays):
        sp = f"{path}.hotel_stays[{i}]"
        s = _expect_object(s, sp)
        _expect_keys(s, sp, ("hotel_id", "check_in", "check_out"))
        ci = _parse_date(s.get("check_in"), f"{sp}.check_in")
        co = _parse_date(s.get("check_out"), f"{sp}.check_out")
        if ci >= co:
            _fail(sp, "check_out must be after check_in")
        stays.append(HotelStay(_get_str(s, sp, "hotel_id"), ci, co))
    kind = _get_str(obj, path, "objective_kind")
    if kind not in OBJECTIVE_KINDS:
        _fail(f"{path}.objective_kind", f"expected one of {OBJECTIVE_KINDS}")
    it = Itinerary(
        chosen_flights=tuple(raw_cf),
        hotel_stays=tuple(stays),
        flight_cost=_get_int(obj, path, "flight_cost", minimum=0),
        hotel_cost=_get_int(obj, path, "hotel_cost", minimum=0),
        total_cost=_get_int(obj, path, "total_cost", minimum=0),
        objective_kind=kind,
        objective_value=_get_int(obj, path, "objective_value"),
    )
    if it.total_cost != it.flight_cost + it.hotel_cost:
        _fail(f"{path}.total_cost", "must equal flight_cost + hotel_cost")
    return it


def parse_itinerary(json_text: str) -> Itinerary:
    try:
        obj = json.loads(json_text)
    except json.JSONDecodeError as e:
        raise MalformedJson(str(e)) from e
    return itinerary_from_dict(obj)


def itinerary_to_dict(it: Itinerary) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "chosen_flights": list(it.chosen_flights),
        "hotel_stays": [
            {"hotel_id": s.hotel_id, "check_in": s.check_in.isoformat(),
             "check_out": s.check_out.isoformat()}
            for s in it.hotel_stays
        ],
        "flight_cost": it.flight_cost,
        "hotel_cost": it.hotel_cost,
        "total_cost": it.total_cost,
        "objective_kind": it.objective_kind,
        "objective_value": it.objective_value,
    }


def serialize_itinerary(it: Itinerary) -> str:
    return json.dumps(itinerary_to_dict(it), sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# feasibility checker
# ---------------------------------------------------------------------------


def _minutes_of_day(dt: datetime) -> int:
    return dt.hour * 60 + dt.minute


def _flight_violations(req: TravelRequest, flights: list[FlightOffer]
                       ) -> Iterator[Violation]:
    ac = req.airline_constraints
    for k, f in enumerate(flights):
        where = f"flight {f.id} (segment {k})"
        if ac.cabin_class is not None and f.cabin != ac.cabin_class:
            yield Violation("airline_constraints.cabin_class",
                            f"{where} is {f.cabin}, requested {ac.cabin_class}")
        if ac.refundable and not f.refundable:
            yield Violation("airline_constraints.refundable", f"{where} is non-refundable")
        if ac.non_stop and not f.non_stop:
            yield Violation("airline_constraints.non_stop", f"{where} has stops")
        if ac.must_not_basic_economy and f.is_basic_economy:
            yield Violation("airline_constraints.must_not_basic_economy",
                            f"{where} is basic economy")
        if ac.no_mixed_cabin and f.is_mixed_cabin:
            yield Violation("airline_constraints.no_mixed_cabin", f"{where} mixes cabins")
        if ac.avoid_red_eye and f.is_red_eye:
            yield Violation("airline_constraints.avoid_red_eye", f"{where} is a red-eye")
        if ac.avoided_airlines is not None and f.airline in ac.avoided_airlines:
            yield Violation("airline_constraints.avoided_airlines",
                            f"{where} operated by avoided airline {f.airline}")
        if ac.plane_type is not None and f.aircraft not in ac.plane_type:
            yield Violation("airline_constraints.plane_type",
                            f"{where} uses {f.aircraft}, not in {sorted(ac.plane_type)}")
        for kind in ("departure_window", "arrival_window"):
            windows = getattr(ac, kind)
            if windows is None or windows[k] is None:
                continue
            w = windows[k]
            if w.soft:
                continue  # soft windows are objective penalties, never violations
            t = _minutes_of_day(f.departure if kind == "departure_window" else f.arrival)
            if not w.earliest <= t <= w.latest:
                yield Violation(f"airline_constraints.{kind}",
                                f"{where} at {t} min outside hard window "
                                f"[{w.earliest}, {w.latest}]")
    if ac.price_range is not None:
        total = sum(f.price for f in flights)
        lo, hi = ac.price_range
        if not lo <= total <= hi:
            yield Violation("airline_constraints.price_range",
                            f"flight total {total} outside [{lo}, {hi}]")


def _hotel_violations(req: TravelRequest, stays: list[tuple[HotelStay, HotelOffer]]
                      ) -> Iterator[Violation]:
    hc = req.hotel_constraints
    for stay, offer in stays:
        where = f"hotel {offer.id}"
        if hc.rating_min is not None and offer.rating < hc.rating_min:
            yield Violation("hotel_constraints.rating_min",
                            f"{where} rated {offer.rating} < {hc.rating_min}")
        if hc.avoided_brands is not None and offer.brand in hc.avoided_brands:
            yield Violation("hotel_constraints.avoided_brands",
                            f"{where} is an avoided brand ({offer.brand})")
        if hc.price_range is not None:
            lo, hi = hc.price_range
            if not lo <= offer.nightly_price <= hi:
                yield Violation("hotel_constraints.price_range",
                                f"{where} nightly {offer.nightly_price} outside [{lo}, {hi}]")
        if not (offer.available_from <= stay.check_in
                and stay.check_out <= offer.available_to + timedelta(days=1)):
            yield Violation("itinerary.hotel_stays",
                            f"{where} not available {stay.check_in}..{stay.check_out}")


def _budget_violations(req: TravelRequest, flight_cost: int,
                       stays: list[tuple[HotelStay, HotelOffer]]) -> Iterator[Violation]:
    b = req.budget
    hotel_cost = sum(s.nights * o.nightly_price for s, o in stays)
    if b.flight_total_budget is not None and flight_cost > b.flight_total_budget:
        yield Violation("budget.flight_total_budget",
                        f"flight total {flight_cost} > {b.flight_total_budget}")
    if b.hotel_total_budget is not None and hotel_cost > b.hotel_total_budget:
        yield Violation("budget.hotel_total_budget",
                        f"hotel total {hotel_cost} > {b.hotel_total_budget}")
    if b.total_budget is not None and flight_cost + hotel_cost > b.total_budget:
        yield Violation("budget.total_budget",
                        f"trip total {flight_cost + hotel_cost} > {b.total_budget}")
    if b.hotel_daily_budget is not None:
        for stay, offer in stays:
            if offer.nightly_price > b.hotel_daily_budget:
                yield Violation("budget.hotel_daily_budget",
                                f"hotel {offer.id} nightly {offer.nightly_price} > "
                                f"{b.hotel_daily_budget}")
                break


def check_feasibility(itinerary: Itinerary, request: TravelRequest,
                      inventory: Inventory) -> ConstraintReport:
    """Judge an itinerary against every hard constraint of the request.

    Returns all violations, not just the first.  Soft time windows are
    objective penalties and never appear here.  Raises UnknownOffer if the
    itinerary references an id missing from the inventory.
    """
    violations: list[Violation] = []

    flights = [inventory.flight(fid) for fid in itinerary.chosen_flights]
    stays = [(s, inventory.hotel(s.hotel_id)) for s in itinerary.hotel_stays]

    # structure: one flight per segment, matching that segment
    if len(flights) != len(request.segments):
        violations.append(Violation(
            "itinerary.chosen_flights",
            f"expected {len(request.segments)} flights, got {len(flights)}"))
    else:
        for k, (seg, f) in enumerate(zip(request.segments, flights)):
            if f.segment_index != k:
                violations.append(Violation(
                    "itinerary.chosen_flights",
                    f"flight {f.id} indexed for segment {f.segment_index}, used for {k}"))
            elif (f.origin, f.destination) != (seg.origin, seg.destination):
                violations.append(Violation(
                    "itinerary.chosen_flights",
                    f"flight {f.id} flies {f.origin}->{f.destination}, segment {k} "
                    f"is {seg.origin}->{seg.destination}"))
            elif f.departure.date() != seg.date:
                violations.append(Violation(
                    "itinerary.chosen_flights",
                    f"flight {f.id} departs {f.departure.date()}, segment {k} "
                    f"dated {seg.date}"))

    # structure: every away night covered by a stay at the right city
    for night in away_nights(request.segments):
        city = night_city(request.segments, night)
        covering = [(s, o) for s, o in stays if s.check_in <= night < s.check_out]
        if not covering:
            violations.append(Violation(
                "itinerary.hotel_stays", f"night {night} at {city} not covered"))
            continue
        for s, o in covering:
            if o.city != city:
                violations.append(Violation(
                    "itinerary.hotel_stays",
                    f"hotel {o.id} is in {o.city}, night {night} is at {city}"))

    if len(flights) == len(request.segments):
        violations.extend(_flight_violations(request, flights))
    violations.extend(_hotel_violations(request, stays))
    flight_cost = sum(f.price for f in flights)
    violations.extend(_budget_violations(request, flight_cost, stays))

    return ConstraintReport(feasible=not violations, violations=tuple(violations))


def soft_window_penalty(request: TravelRequest, flight: FlightOffer,
                        segment_index: int, cents_per_minute: int) -> int:
    """Penalty in cents for a flight landing outside the request's soft windows."""
    ac = request.airline_constraints
    penalty = 0
    for kind, when in (("departure_window", flight.departure),
                       ("arrival_window", flight.arrival)):
        windows = getattr(ac, kind)
        if windows is None or windows[segment_index] is None:
            continue
        w = windows[segment_index]
        if not w.soft:
            continue
        t = _minutes_of_day(when)
        outside = max(0, w.earliest - t) + max(0, t - w.latest)
        penalty += cents_per_minute * outside
    return penalty
