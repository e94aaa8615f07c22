"""Synthetic travel request and inventory sampling.

Requests are drawn factor-by-factor from configurable distributions; the
matching inventory is built around a planted compliant itinerary (one
in-budget flight per segment, one in-budget hotel per away-city block) so
every generated pair is solvable, then padded with unconstrained distractor
offers.  All sampling is reproducible from (seed, sample index).

A deterministic perturbation translator stands in for an imperfect
NL-to-symbolic translator: it damages a request field-by-field and records
every change it made out, so evaluation runs can be replayed and audited.
"""

from __future__ import annotations

import csv
import json
import math
import random
from dataclasses import dataclass, field, replace
from datetime import date, datetime, time, timedelta
from typing import Any, Iterator, Optional

from .schema import (
    AirlineConstraints,
    BudgetConstraints,
    CABINS,
    FlightOffer,
    HotelConstraints,
    HotelOffer,
    Inventory,
    Segment,
    TimeWindow,
    TravelRequest,
    away_blocks,
    inventory_from_dict,
    inventory_to_dict,
    is_red_eye,
    request_from_dict,
    request_to_dict,
)


class ConfigError(ValueError):
    """Generator configuration is unusable (e.g. empty city pool)."""


class InfeasibleRequest(ValueError):
    """Request budgets sit below the configured price floors; no compliant
    inventory can be planted."""


class EmptyData(ValueError):
    """CSV ingestion found zero usable rows."""


# ---------------------------------------------------------------------------
# price model
# ---------------------------------------------------------------------------

DISTANCE_BUCKETS = ("short", "medium", "long")  # <800mi, <2000mi, rest

_DEFAULT_AIRPORTS = {
    "DEN": (39.86, -104.67), "MIA": (25.79, -80.29), "JFK": (40.64, -73.78),
    "LAX": (33.94, -118.41), "SFO": (37.62, -122.38), "SEA": (47.45, -122.31),
    "ORD": (41.97, -87.91), "ATL": (33.64, -84.43), "BOS": (42.36, -71.01),
    "DFW": (32.90, -97.04), "PHX": (33.44, -112.01), "LAS": (36.08, -115.15),
    "MCO": (28.43, -81.31), "IAH": (29.99, -95.34), "MSP": (44.88, -93.22),
    "DTW": (42.21, -83.35), "PHL": (39.87, -75.24), "CLT": (35.21, -80.94),
    "SLC": (40.79, -111.98), "SAN": (32.73, -117.19),
}

_DEFAULT_AIRLINES = {"AA": 22, "UA": 18, "DL": 20, "WN": 16, "AS": 8,
                     "B6": 7, "NK": 5, "F9": 4}
_DEFAULT_AIRCRAFT = ("A320", "A321", "A350", "B737", "B757", "B787", "E175")
_DEFAULT_BRANDS = ("Best Western", "Four Seasons", "Hampton Inn", "Hilton",
                   "Holiday Inn", "Hyatt", "Marriott", "Radisson", "Sheraton",
                   "Westin")

# hour-of-day departure histogram, hours 5..23
_DEFAULT_DEP_HOURS = {h: w for h, w in zip(range(5, 24),
                      (2, 4, 6, 8, 8, 7, 6, 6, 6, 6, 6, 7, 7, 6, 5, 4, 3, 2, 1))}

_CABIN_MULT = {"basic_economy": 0.8, "coach": 1.0, "business": 2.6, "first": 3.8}


def haversine_miles(a: tuple[float, float], b: tuple[float, float]) -> float:
    lat1, lon1, lat2, lon2 = map(math.radians, (a[0], a[1], b[0], b[1]))
    h = (math.sin((lat2 - lat1) / 2) ** 2
         + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2)
    return 3958.8 * 2 * math.asin(math.sqrt(h))


def distance_bucket(miles: float) -> str:
    if miles < 800:
        return "short"
    if miles < 2000:
        return "medium"
    return "long"


def _default_flight_params() -> dict[str, dict[str, tuple[float, float]]]:
    base = {"short": (math.log(18000), 0.35),
            "medium": (math.log(28000), 0.35),
            "long": (math.log(40000), 0.40)}
    out: dict[str, dict[str, tuple[float, float]]] = {}
    for cabin in CABINS:
        mult = _CABIN_MULT[cabin]
        out[cabin] = {b: (mu + math.log(mult), sd) for b, (mu, sd) in base.items()}
    return out


def _default_hotel_params() -> dict[int, tuple[float, float]]:
    means = {1: 7000, 2: 10000, 3: 15000, 4: 22000, 5: 35000}
    return {r: (math.log(m), 0.30 if r < 5 else 0.35) for r, m in means.items()}


@dataclass(frozen=True)
class PriceModel:
    """Statistical model the generator samples offers from.

    Flight prices are log-normal per (cabin, route-distance bucket); hotel
    nightly prices are log-normal per star rating.  Histograms are raw
    weights, normalized at sampling time.
    """

    flight_price: dict[str, dict[str, tuple[float, float]]] = field(
        default_factory=_default_flight_params)
    hotel_price: dict[int, tuple[float, float]] = field(
        default_factory=_default_hotel_params)
    airline_weights: dict[str, float] = field(
        default_factory=lambda: dict(_DEFAULT_AIRLINES))
    aircraft: tuple[str, ...] = _DEFAULT_AIRCRAFT
    brands: tuple[str, ...] = _DEFAULT_BRANDS
    star_weights: dict[int, float] = field(
        default_factory=lambda: {1: 8, 2: 20, 3: 34, 4: 26, 5: 12})
    dep_hour_weights: dict[int, float] = field(
        default_factory=lambda: dict(_DEFAULT_DEP_HOURS))

    def typical_flight_price(self, bucket: str, cabin: str = "coach") -> int:
        mu, _ = self.flight_price[cabin][bucket]
        return int(round(math.exp(mu)))

    def typical_nightly(self, rating: int = 3) -> int:
        mu, _ = self.hotel_price[rating]
        return int(round(math.exp(mu)))

    def sample_flight_price(self, rng: random.Random, bucket: str, cabin: str) -> int:
        mu, sd = self.flight_price[cabin][bucket]
        return max(1, int(round(rng.lognormvariate(mu, sd))))

    def sample_nightly(self, rng: random.Random, rating: int) -> int:
        mu, sd = self.hotel_price[rating]
        return max(1, int(round(rng.lognormvariate(mu, sd))))

    def sample_dep_minutes(self, rng: random.Random) -> int:
        hours = sorted(self.dep_hour_weights)
        weights = [self.dep_hour_weights[h] for h in hours]
        hour = rng.choices(hours, weights=weights)[0]
        return hour * 60 + 5 * rng.randrange(12)

    def to_dict(self) -> dict:
        return {
            "flight_price": {c: {b: list(p) for b, p in bk.items()}
                             for c, bk in self.flight_price.items()},
            "hotel_price": {str(r): list(p) for r, p in self.hotel_price.items()},
            "airline_weights": dict(self.airline_weights),
            "aircraft": list(self.aircraft),
            "brands": list(self.brands),
            "star_weights": {str(r): w for r, w in self.star_weights.items()},
            "dep_hour_weights": {str(h): w for h, w in self.dep_hour_weights.items()},
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "PriceModel":
        return cls(
            flight_price={c: {b: (float(p[0]), float(p[1])) for b, p in bk.items()}
                          for c, bk in obj["flight_price"].items()},
            hotel_price={int(r): (float(p[0]), float(p[1]))
                         for r, p in obj["hotel_price"].items()},
            airline_weights={k: float(v) for k, v in obj["airline_weights"].items()},
            aircraft=tuple(obj["aircraft"]),
            brands=tuple(obj["brands"]),
            star_weights={int(r): float(w) for r, w in obj["star_weights"].items()},
            dep_hour_weights={int(h): float(w)
                              for h, w in obj["dep_hour_weights"].items()},
        )


# ---------------------------------------------------------------------------
# generator configuration
# ---------------------------------------------------------------------------

# Table-style count weights: how many optional constraint fields a request sets.
_AIRLINE_COUNT_WEIGHTS = {4: 4974, 5: 9777, 6: 5555, 7: 1299, 8: 173}
_HOTEL_COUNT_WEIGHTS = {2: 3345, 3: 10438, 4: 8001}

AIRLINE_FIELD_POOL = AirlineConstraints.FIELDS
HOTEL_FIELD_POOL = HotelConstraints.FIELDS


@dataclass(frozen=True)
class GeneratorConfig:
    rng_seed: int = 0
    city_pool: dict[str, tuple[float, float]] = field(
        default_factory=lambda: dict(_DEFAULT_AIRPORTS))
    p_one_way: float = 0.04  # keep below 5%
    p_three_cities: float = 0.128
    airline_count_weights: dict[int, float] = field(
        default_factory=lambda: dict(_AIRLINE_COUNT_WEIGHTS))
    hotel_count_weights: dict[int, float] = field(
        default_factory=lambda: dict(_HOTEL_COUNT_WEIGHTS))
    budget_field_probs: dict[str, float] = field(default_factory=lambda: {
        "total_budget": 0.35, "flight_total_budget": 0.65,
        "hotel_total_budget": 0.60, "hotel_daily_budget": 0.55})
    p_soft_window: float = 0.9
    flights_per_segment: tuple[int, int] = (40, 60)
    hotels_per_city: tuple[int, int] = (15, 25)
    nights_per_stop: tuple[int, int] = (1, 4)
    date_start: date = date(2025, 1, 5)
    date_span_days: int = 300
    min_flight_price: int = 4000  # cents; plant floor
    min_nightly_price: int = 3000
    min_flight_minutes: int = 125  # keeps every offer at least two 60-min slots long
    price_model: PriceModel = field(default_factory=PriceModel)

    def validate(self) -> None:
        if not self.city_pool:
            raise ConfigError("city pool is empty")
        for name in ("p_one_way", "p_three_cities", "p_soft_window"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {v}")
        for name in ("flights_per_segment", "hotels_per_city", "nights_per_stop"):
            lo, hi = getattr(self, name)
            if lo < 1 or hi < lo:
                raise ConfigError(f"{name} range invalid: ({lo}, {hi})")
        for p in self.budget_field_probs.values():
            if not 0.0 <= p <= 1.0:
                raise ConfigError("budget field probability outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "rng_seed": self.rng_seed,
            "city_pool": {c: list(ll) for c, ll in self.city_pool.items()},
            "p_one_way": self.p_one_way,
            "p_three_cities": self.p_three_cities,
            "airline_count_weights": {str(k): v for k, v in
                                      self.airline_count_weights.items()},
            "hotel_count_weights": {str(k): v for k, v in
                                    self.hotel_count_weights.items()},
            "budget_field_probs": dict(self.budget_field_probs),
            "p_soft_window": self.p_soft_window,
            "flights_per_segment": list(self.flights_per_segment),
            "hotels_per_city": list(self.hotels_per_city),
            "nights_per_stop": list(self.nights_per_stop),
            "date_start": self.date_start.isoformat(),
            "date_span_days": self.date_span_days,
            "min_flight_price": self.min_flight_price,
            "min_nightly_price": self.min_nightly_price,
            "min_flight_minutes": self.min_flight_minutes,
            "price_model": self.price_model.to_dict(),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "GeneratorConfig":
        defaults = cls()
        kw: dict[str, Any] = {}
        for key in obj:
            if key == "city_pool":
                kw[key] = {c: (float(ll[0]), float(ll[1]))
                           for c, ll in obj[key].items()}
            elif key in ("airline_count_weights", "hotel_count_weights"):
                kw[key] = {int(k): float(v) for k, v in obj[key].items()}
            elif key in ("flights_per_segment", "hotels_per_city", "nights_per_stop"):
                kw[key] = tuple(obj[key])
            elif key == "date_start":
                kw[key] = date.fromisoformat(obj[key])
            elif key == "price_model":
                kw[key] = PriceModel.from_dict(obj[key])
            elif hasattr(defaults, key):
                kw[key] = obj[key]
            else:
                raise ConfigError(f"unknown config field: {key}")
        cfg = replace(defaults, **kw)
        cfg.validate()
        return cfg


def derive_seed(seed: int, *indices: int) -> int:
    """Stable per-sample seed: splitmix-style mixing of (seed, indices)."""
    x = seed & 0xFFFFFFFFFFFFFFFF
    for idx in indices:
        x = (x ^ (idx + 0x9E3779B97F4A7C15)) & 0xFFFFFFFFFFFFFFFF
        x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        x ^= x >> 31
    return x


def _round_dollars(cents: float) -> int:
    return max(100, int(round(cents / 100.0)) * 100)


# ---------------------------------------------------------------------------
# request sampling
# ---------------------------------------------------------------------------


def _trip_bucket(config: GeneratorConfig, cities: list[str]) -> str:
    """Dominant distance bucket for budget estimation."""
    legs = list(zip(cities, cities[1:] + cities[:1]))
    dists = [haversine_miles(config.city_pool[a], config.city_pool[b])
             for a, b in legs if a in config.city_pool and b in config.city_pool]
    if not dists:
        return "medium"
    return distance_bucket(sum(dists) / len(dists))


def _sample_window(rng: random.Random, soft: bool, arrival: bool) -> TimeWindow:
    if arrival:
        earliest = 30 * rng.randrange(16, 26)  # 08:00 .. 12:30
        width = 30 * rng.randrange(12, 22)     # 6h .. 10.5h
    else:
        earliest = 30 * rng.randrange(10, 23)  # 05:00 .. 11:00
        width = 30 * rng.randrange(8, 21)      # 4h .. 10h
    latest = min(earliest + width, 22 * 60)
    return TimeWindow(earliest, latest, soft)


def _sample_airline_constraints(rng: random.Random, config: GeneratorConfig,
                                n_segments: int, bucket: str) -> AirlineConstraints:
    model = config.price_model
    counts = sorted(config.airline_count_weights)
    c = rng.choices(counts, weights=[config.airline_count_weights[k]
                                     for k in counts])[0]
    chosen = sorted(rng.sample(AIRLINE_FIELD_POOL, c),
                    key=AIRLINE_FIELD_POOL.index)
    kw: dict[str, Any] = {}
    airlines = sorted(model.airline_weights)
    shuffled = airlines[:]
    rng.shuffle(shuffled)
    for f in chosen:
        if f == "price_range":
            typ = model.typical_flight_price(bucket) * n_segments
            lo = _round_dollars(typ * rng.uniform(0.35, 0.7))
            hi = _round_dollars(typ * rng.uniform(1.4, 2.4))
            kw[f] = (min(lo, hi), max(lo, hi))
        elif f == "departure_window":
            w = _sample_window(rng, rng.random() < config.p_soft_window, arrival=False)
            kw[f] = tuple([w] * n_segments)
        elif f == "arrival_window":
            w = _sample_window(rng, rng.random() < config.p_soft_window, arrival=True)
            kw[f] = tuple([w] * n_segments)
        elif f == "cabin_class":
            kw[f] = rng.choices(CABINS, weights=(10, 60, 20, 10))[0]
        elif f in ("refundable", "non_stop"):
            kw[f] = rng.random() < 0.75
        elif f in ("must_not_basic_economy", "avoid_red_eye", "no_mixed_cabin"):
            kw[f] = rng.random() < 0.8
        elif f == "plane_type":
            kw[f] = tuple(sorted(rng.sample(model.aircraft, rng.randint(2, 3))))
        elif f == "preferred_airlines":
            kw[f] = tuple(sorted(shuffled[:rng.randint(1, 3)]))
        elif f == "avoided_airlines":
            kw[f] = tuple(sorted(shuffled[-rng.randint(1, 2):]))
    if kw.get("cabin_class") == "basic_economy" and kw.get("must_not_basic_economy"):
        kw["cabin_class"] = "coach"  # contradictory draw; repair deterministically
    return AirlineConstraints(**kw)


def _sample_hotel_constraints(rng: random.Random, config: GeneratorConfig
                              ) -> HotelConstraints:
    model = config.price_model
    counts = sorted(config.hotel_count_weights)
    c = rng.choices(counts, weights=[config.hotel_count_weights[k]
                                     for k in counts])[0]
    chosen = sorted(rng.sample(HOTEL_FIELD_POOL, c), key=HOTEL_FIELD_POOL.index)
    kw: dict[str, Any] = {}
    brands = list(model.brands)
    rng.shuffle(brands)
    for f in chosen:
        if f == "price_range":
            typ = model.typical_nightly(3)
            lo = _round_dollars(typ * rng.uniform(0.25, 0.5))
            hi = _round_dollars(typ * rng.uniform(1.5, 3.0))
            kw[f] = (min(lo, hi), max(lo, hi))
        elif f == "rating_min":
            kw[f] = rng.choices((2, 3, 4), weights=(30, 45, 25))[0]
        elif f == "preferred_brands":
            kw[f] = tuple(sorted(brands[:rng.randint(1, 3)]))
        elif f == "avoided_brands":
            kw[f] = tuple(sorted(brands[-rng.randint(1, 2):]))
    return HotelConstraints(**kw)


def _sample_budget(rng: random.Random, config: GeneratorConfig, bucket: str,
                   n_segments: int, n_nights: int) -> BudgetConstraints:
    model = config.price_model
    flight_est = model.typical_flight_price(bucket) * n_segments
    nightly_est = model.typical_nightly(3)
    kw: dict[str, Any] = {}
    probs = config.budget_field_probs
    if rng.random() < probs.get("flight_total_budget", 0):
        kw["flight_total_budget"] = _round_dollars(flight_est * rng.uniform(1.1, 1.8))
    if n_nights > 0 and rng.random() < probs.get("hotel_total_budget", 0):
        kw["hotel_total_budget"] = _round_dollars(
            nightly_est * n_nights * rng.uniform(1.1, 1.8))
    if n_nights > 0 and rng.random() < probs.get("hotel_daily_budget", 0):
        kw["hotel_daily_budget"] = _round_dollars(nightly_est * rng.uniform(1.05, 1.6))
    if rng.random() < probs.get("total_budget", 0):
        kw["total_budget"] = _round_dollars(
            (flight_est + nightly_est * n_nights) * rng.uniform(1.2, 1.9))
    return BudgetConstraints(**kw)


def sample_request(rng: random.Random, config: GeneratorConfig,
                   request_id: str = "req-0") -> TravelRequest:
    """Draw one travel request; every Table-style factor appears with its
    configured probability."""
    config.validate()
    pool = sorted(config.city_pool)
    n_cities = 3 if rng.random() < config.p_three_cities else 2
    one_way = rng.random() < config.p_one_way
    cities = rng.sample(pool, n_cities)
    route = cities if one_way else cities + [cities[0]]

    start = config.date_start + timedelta(days=rng.randrange(config.date_span_days))
    dates = [start]
    for _ in range(len(route) - 2):
        dates.append(dates[-1] + timedelta(days=rng.randint(*config.nights_per_stop)))

    segments = tuple(
        Segment(origin=route[i], destination=route[i + 1], date=dates[i])
        for i in range(len(route) - 1)
    )
    n_nights = (dates[-1] - dates[0]).days
    bucket = _trip_bucket(config, cities)
    return TravelRequest(
        request_id=request_id,
        segments=segments,
        airline_constraints=_sample_airline_constraints(
            rng, config, len(segments), bucket),
        hotel_constraints=_sample_hotel_constraints(rng, config),
        budget=_sample_budget(rng, config, bucket, len(segments), n_nights),
    )


# ---------------------------------------------------------------------------
# inventory sampling with feasibility planting
# ---------------------------------------------------------------------------

_INF = 10 ** 12


def _plant_flight_budget(request: TravelRequest, config: GeneratorConfig,
                         hotel_floor: int) -> tuple[int, int]:
    """[lo, hi] the planted flights' total must land in; raises if empty."""
    ac, b = request.airline_constraints, request.budget
    k = len(request.segments)
    lo = k * config.min_flight_price
    hi = _INF
    if ac.price_range is not None:
        lo = max(lo, ac.price_range[0])
        hi = min(hi, ac.price_range[1])
    if b.flight_total_budget is not None:
        hi = min(hi, b.flight_total_budget)
    if b.total_budget is not None:
        hi = min(hi, b.total_budget - hotel_floor)
    if lo > hi:
        raise InfeasibleRequest(
            f"flight budget window empty: needs >= {lo}, caps allow {hi}")
    return lo, hi


def _plant_hotel_caps(request: TravelRequest, config: GeneratorConfig,
                      n_nights: int, flight_total: int) -> tuple[int, int, int]:
    """(nightly_lo, nightly_hi, total_hi) for planted hotels; raises if empty."""
    hc, b = request.hotel_constraints, request.budget
    lo = config.min_nightly_price
    nightly_hi = _INF
    total_hi = _INF
    if hc.price_range is not None:
        lo = max(lo, hc.price_range[0])
        nightly_hi = min(nightly_hi, hc.price_range[1])
    if b.hotel_daily_budget is not None:
        nightly_hi = min(nightly_hi, b.hotel_daily_budget)
    if b.hotel_total_budget is not None:
        total_hi = min(total_hi, b.hotel_total_budget)
    if b.total_budget is not None:
        total_hi = min(total_hi, b.total_budget - flight_total)
    if lo > nightly_hi or (n_nights and lo * n_nights > total_hi):
        raise InfeasibleRequest(
            f"hotel budget window empty: nightly floor {lo}, nightly cap "
            f"{nightly_hi}, total cap {total_hi} over {n_nights} nights")
    return lo, nightly_hi, total_hi


def _fit_total(prices: list[int], lo: int, hi: int, floor: int) -> list[int]:
    """Scale integer prices so their sum lands in [lo, hi], respecting floor."""
    total = sum(prices)
    if total > hi:
        scaled = [max(floor, int(p * hi / total)) for p in prices]
        while sum(scaled) > hi:
            i = scaled.index(max(scaled))
            scaled[i] = max(floor, scaled[i] - (sum(scaled) - hi))
        prices = scaled
    total = sum(prices)
    if total < lo:
        prices = prices[:]
        prices[0] += lo - total
    return prices


def _segment_distance(config: GeneratorConfig, seg: Segment) -> float:
    a = config.city_pool.get(seg.origin)
    b = config.city_pool.get(seg.destination)
    if a is None or b is None:
        return 1000.0
    return haversine_miles(a, b)


def _flight_minutes(rng: random.Random, config: GeneratorConfig,
                    miles: float) -> int:
    base = miles / 460.0 * 60 + 40
    noisy = base * rng.uniform(0.92, 1.08)
    return max(config.min_flight_minutes, 5 * int(round(noisy / 5)))


def _segment_window(request: TravelRequest, kind: str,
                    seg_index: int) -> Optional[TimeWindow]:
    windows = getattr(request.airline_constraints, kind)
    return windows[seg_index] if windows is not None else None


def _pick_plant_dep_minutes(rng: random.Random, request: TravelRequest,
                            seg_index: int, duration: int,
                            not_before: int | None) -> int:
    """Mid-day departure honoring any stated windows; keeps the plant landing
    the same day with the evening free for sleep."""
    dep_w = _segment_window(request, "departure_window", seg_index)
    arr_w = _segment_window(request, "arrival_window", seg_index)

    hard_lo, hard_hi = 0, 24 * 60 - 1 - duration  # must land the same day
    if dep_w is not None and not dep_w.soft:
        hard_lo, hard_hi = max(hard_lo, dep_w.earliest), min(hard_hi, dep_w.latest)
    if arr_w is not None and not arr_w.soft:
        hard_lo = max(hard_lo, arr_w.earliest - duration)
        hard_hi = min(hard_hi, arr_w.latest - duration)
    if not_before is not None:
        hard_lo = max(hard_lo, not_before)
    if hard_lo > hard_hi:
        raise InfeasibleRequest(
            f"stated hard windows leave no same-day slot for segment {seg_index}")

    # inside soft windows and landing before 22:00, when that is possible
    pref_lo, pref_hi = max(hard_lo, 8 * 60), min(hard_hi, 14 * 60)
    for w, shift in ((dep_w, 0), (arr_w, -duration)):
        if w is not None:
            pref_lo = max(pref_lo, w.earliest + shift)
            pref_hi = min(pref_hi, w.latest + shift)
    pref_hi = min(pref_hi, 22 * 60 - duration)
    lo, hi = (pref_lo, pref_hi) if pref_lo <= pref_hi else (hard_lo, hard_hi)
    return lo + 30 * rng.randrange(max(1, (hi - lo) // 30 + 1)) if hi > lo else lo


def _plant_flights(rng: random.Random, request: TravelRequest,
                   config: GeneratorConfig, lo: int, hi: int) -> list[FlightOffer]:
    model = config.price_model
    ac = request.airline_constraints
    cabin = ac.cabin_class or "coach"
    airlines = sorted(model.airline_weights)
    allowed = [a for a in airlines if not (ac.avoided_airlines
                                           and a in ac.avoided_airlines)]
    if ac.preferred_airlines:
        preferred = [a for a in ac.preferred_airlines if a in allowed]
        if preferred:
            allowed = preferred
    if not allowed:
        raise InfeasibleRequest("every known airline is avoided")
    aircraft_pool = list(ac.plane_type) if ac.plane_type else list(model.aircraft)

    prices = []
    for seg in request.segments:
        bucket = distance_bucket(_segment_distance(config, seg))
        prices.append(max(config.min_flight_price,
                          model.sample_flight_price(rng, bucket, cabin)))
    prices = _fit_total(prices, lo, hi, config.min_flight_price)

    offers = []
    prev_arrival: Optional[datetime] = None
    for k, seg in enumerate(request.segments):
        duration = _flight_minutes(rng, config,
                                   _segment_distance(config, seg))
        not_before = None
        if prev_arrival is not None and prev_arrival.date() == seg.date:
            not_before = prev_arrival.hour * 60 + prev_arrival.minute + 90
        dep_min = _pick_plant_dep_minutes(rng, request, k, duration, not_before)
        dep = datetime.combine(seg.date, time(dep_min // 60, dep_min % 60))
        arr = dep + timedelta(minutes=duration)
        if arr.date() != seg.date:
            raise InfeasibleRequest(
                f"cannot schedule a same-day compliant flight for segment {k}")
        offers.append(FlightOffer(
            id=f"f{k}-plant",
            segment_index=k,
            origin=seg.origin,
            destination=seg.destination,
            airline=rng.choice(allowed),
            flight_number=f"{rng.randrange(100, 999)}",
            cabin=cabin,
            price=prices[k],
            departure=dep,
            arrival=arr,
            non_stop=True,
            aircraft=rng.choice(sorted(aircraft_pool)),
            refundable=True,
            is_basic_economy=cabin == "basic_economy",
            is_red_eye=is_red_eye(dep_min, arr.hour * 60 + arr.minute),
            is_mixed_cabin=False,
        ))
        prev_arrival = arr
    if any(f.is_red_eye for f in offers) and ac.avoid_red_eye:
        raise InfeasibleRequest("stated windows force a red-eye plant")
    return offers


def _distractor_flight(rng: random.Random, request: TravelRequest,
                       config: GeneratorConfig, k: int, i: int) -> FlightOffer:
    model = config.price_model
    seg = request.segments[k]
    cabin = rng.choices(CABINS, weights=(15, 55, 20, 10))[0]
    bucket = distance_bucket(_segment_distance(config, seg))
    duration = _flight_minutes(rng, config, _segment_distance(config, seg))
    dep_min = model.sample_dep_minutes(rng)
    dep = datetime.combine(seg.date, time(dep_min // 60, dep_min % 60))
    arr = dep + timedelta(minutes=duration)
    non_stop = rng.random() < 0.65
    airlines = sorted(model.airline_weights)
    return FlightOffer(
        id=f"f{k}-{i:03d}",
        segment_index=k,
        origin=seg.origin,
        destination=seg.destination,
        airline=rng.choices(airlines,
                            weights=[model.airline_weights[a] for a in airlines])[0],
        flight_number=f"{rng.randrange(100, 9999)}",
        cabin=cabin,
        price=model.sample_flight_price(rng, bucket, cabin),
        departure=dep,
        arrival=arr,
        non_stop=non_stop,
        aircraft=rng.choice(model.aircraft),
        refundable=rng.random() < 0.4,
        is_basic_economy=cabin == "basic_economy",
        is_red_eye=is_red_eye(dep_min, arr.hour * 60 + arr.minute),
        is_mixed_cabin=(not non_stop) and rng.random() < 0.3,
    )


def _plant_hotel(rng: random.Random, request: TravelRequest,
                 config: GeneratorConfig, city: str, idx: int,
                 nightly: int) -> HotelOffer:
    model = config.price_model
    hc = request.hotel_constraints
    rating = max(hc.rating_min or 1,
                 rng.choices(sorted(model.star_weights),
                             weights=[model.star_weights[r]
                                      for r in sorted(model.star_weights)])[0])
    brands = [b for b in model.brands
              if not (hc.avoided_brands and b in hc.avoided_brands)]
    if hc.preferred_brands:
        preferred = [b for b in hc.preferred_brands if b in brands]
        if preferred:
            brands = preferred
    if not brands:
        raise InfeasibleRequest("every known hotel brand is avoided")
    trip_start = request.segments[0].date
    trip_end = request.segments[-1].date
    return HotelOffer(
        id=f"h-{city}-plant{idx}",
        city=city,
        brand=rng.choice(brands),
        rating=rating,
        nightly_price=nightly,
        checkin_earliest=14 * 60,
        checkout_latest=11 * 60,
        available_from=trip_start - timedelta(days=2),
        available_to=trip_end + timedelta(days=2),
    )


def _distractor_hotel(rng: random.Random, request: TravelRequest,
                      config: GeneratorConfig, city: str, i: int) -> HotelOffer:
    model = config.price_model
    ratings = sorted(model.star_weights)
    rating = rng.choices(ratings, weights=[model.star_weights[r]
                                           for r in ratings])[0]
    trip_start = request.segments[0].date
    trip_end = request.segments[-1].date
    if rng.random() < 0.1:  # some distractors miss part of the trip
        available_from = trip_start + timedelta(days=rng.randint(1, 2))
        available_to = trip_end + timedelta(days=2)
    else:
        available_from = trip_start - timedelta(days=rng.randint(0, 5))
        available_to = trip_end + timedelta(days=rng.randint(0, 5))
    return HotelOffer(
        id=f"h-{city}-{i:03d}",
        city=city,
        brand=rng.choice(model.brands),
        rating=rating,
        nightly_price=model.sample_nightly(rng, rating),
        checkin_earliest=60 * rng.randint(13, 16),
        checkout_latest=60 * rng.randint(10, 12),
        available_from=available_from,
        available_to=available_to,
    )


def sample_inventory(rng: random.Random, request: TravelRequest,
                     config: GeneratorConfig) -> Inventory:
    """Build an inventory guaranteed to contain one compliant itinerary.

    Raises InfeasibleRequest when the request's budgets fall below the
    configured price floors, so no compliant plant exists.
    """
    config.validate()
    blocks = away_blocks(request.segments)
    n_nights = sum(len(b.nights) for b in blocks)
    hotel_floor = n_nights * config.min_nightly_price

    f_lo, f_hi = _plant_flight_budget(request, config, hotel_floor)
    plant_flights = _plant_flights(rng, request, config, f_lo, f_hi)
    flight_total = sum(f.price for f in plant_flights)

    plant_hotels: list[HotelOffer] = []
    if n_nights:
        lo, nightly_hi, total_hi = _plant_hotel_caps(
            request, config, n_nights, flight_total)
        nightly = [max(lo, min(nightly_hi,
                               config.price_model.sample_nightly(rng, 3)))
                   for _ in blocks]
        weights = [len(b.nights) for b in blocks]
        # shrink nightly prices until the weighted total fits
        while sum(n * w for n, w in zip(nightly, weights)) > total_hi:
            j = nightly.index(max(nightly))
            overshoot = sum(n * w for n, w in zip(nightly, weights)) - total_hi
            nightly[j] = max(lo, nightly[j] - max(1, overshoot // weights[j]))
            if nightly[j] == lo and all(n == lo for n in nightly):
                break
        plant_hotels = [
            _plant_hotel(rng, request, config, b.city, i, nightly[i])
            for i, b in enumerate(blocks)
        ]

    flights = list(plant_flights)
    for k in range(len(request.segments)):
        extra = rng.randint(*config.flights_per_segment) - 1
        flights.extend(_distractor_flight(rng, request, config, k, i)
                       for i in range(extra))
    hotels = list(plant_hotels)
    for city in dict.fromkeys(b.city for b in blocks):
        extra = rng.randint(*config.hotels_per_city) - 1
        hotels.extend(_distractor_hotel(rng, request, config, city, i)
                      for i in range(extra))
    return Inventory(tuple(flights), tuple(hotels))


def sample_pair(seed: int, index: int, config: GeneratorConfig,
                max_attempts: int = 20) -> tuple[TravelRequest, Inventory]:
    """Deterministic (request, inventory) pair for a dataset slot; resamples
    (still deterministically) when a draw's budgets are self-contradictory."""
    for attempt in range(max_attempts):
        rng = random.Random(derive_seed(seed, index, attempt))
        request = sample_request(rng, config, request_id=f"req-{index:06d}")
        try:
            inventory = sample_inventory(rng, request, config)
        except InfeasibleRequest:
            continue
        return request, inventory
    raise InfeasibleRequest(
        f"no plantable request after {max_attempts} attempts at index {index}")


def generate_dataset(n: int, seed: int, config: GeneratorConfig,
                     out_path: str) -> dict:
    """Write n JSON-lines {request, inventory} pairs; bit-identical for
    identical (n, seed, config).  Returns summary statistics."""
    if n < 1:
        raise ValueError("n must be >= 1")
    airline_hist: dict[int, int] = {}
    hotel_hist: dict[int, int] = {}
    city_hist: dict[int, int] = {}
    one_way = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        for i in range(n):
            request, inventory = sample_pair(seed, i, config)
            line = json.dumps(
                {"request": request_to_dict(request),
                 "inventory": inventory_to_dict(inventory)},
                sort_keys=True, separators=(",", ":"))
            fh.write(line + "\n")
            a = request.airline_constraints.count()
            h = request.hotel_constraints.count()
            airline_hist[a] = airline_hist.get(a, 0) + 1
            hotel_hist[h] = hotel_hist.get(h, 0) + 1
            c = len(request.cities)
            city_hist[c] = city_hist.get(c, 0) + 1
            one_way += 0 if request.is_round_trip else 1
    return {
        "n": n,
        "airline_constraint_counts": dict(sorted(airline_hist.items())),
        "hotel_constraint_counts": dict(sorted(hotel_hist.items())),
        "city_counts": dict(sorted(city_hist.items())),
        "one_way_fraction": one_way / n,
    }


def iter_dataset(path: str) -> Iterator[tuple[TravelRequest, Inventory]]:
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            request = request_from_dict(obj["request"])
            inventory = inventory_from_dict(obj["inventory"])
            yield request, inventory


def implied_presence_rates(config: GeneratorConfig) -> dict[str, float]:
    """Analytic per-field presence probability under uniform field choice."""
    rates: dict[str, float] = {}
    aw = config.airline_count_weights
    total = sum(aw.values())
    e_count = sum(k * w for k, w in aw.items()) / total
    for f in AIRLINE_FIELD_POOL:
        rates[f"airline_constraints.{f}"] = e_count / len(AIRLINE_FIELD_POOL)
    hw = config.hotel_count_weights
    total = sum(hw.values())
    e_count = sum(k * w for k, w in hw.items()) / total
    for f in HOTEL_FIELD_POOL:
        rates[f"hotel_constraints.{f}"] = e_count / len(HOTEL_FIELD_POOL)
    return rates


# ---------------------------------------------------------------------------
# perturbation translator
# ---------------------------------------------------------------------------

PERTURBATION_KINDS = ("drop_constraint", "flip_boolean", "shift_budget",
                      "shift_window", "shift_date", "change_city")

_BOOLEAN_FIELDS = ("airline_constraints.refundable", "airline_constraints.non_stop",
                   "airline_constraints.must_not_basic_economy",
                   "airline_constraints.avoid_red_eye",
                   "airline_constraints.no_mixed_cabin")

_DROPPABLE_FIELDS = tuple(
    [f"airline_constraints.{f}" for f in AIRLINE_FIELD_POOL]
    + [f"hotel_constraints.{f}" for f in HOTEL_FIELD_POOL]
    + [f"budget.{f}" for f in BudgetConstraints.FIELDS]
)


@dataclass(frozen=True)
class Perturbation:
    kind: str
    prob: float
    field: Optional[str] = None  # None = every eligible field independently
    rel_delta: float = -0.2  # shift_budget
    minutes: int = 60  # shift_window

    def __post_init__(self):
        if self.kind not in PERTURBATION_KINDS:
            raise ValueError(f"unknown perturbation kind: {self.kind}")
        if not 0.0 <= self.prob <= 1.0:
            raise ValueError(f"probability outside [0, 1]: {self.prob}")


@dataclass(frozen=True)
class PerturbationSpec:
    perturbations: tuple[Perturbation, ...] = ()

    @classmethod
    def from_dict(cls, obj: dict) -> "PerturbationSpec":
        items = []
        for p in obj.get("perturbations", []):
            items.append(Perturbation(
                kind=p["kind"], prob=float(p["prob"]), field=p.get("field"),
                rel_delta=float(p.get("rel_delta", -0.2)),
                minutes=int(p.get("minutes", 60))))
        return cls(tuple(items))

    def to_dict(self) -> dict:
        out = []
        for p in self.perturbations:
            d: dict[str, Any] = {"kind": p.kind, "prob": p.prob}
            if p.field is not None:
                d["field"] = p.field
            if p.kind == "shift_budget":
                d["rel_delta"] = p.rel_delta
            if p.kind == "shift_window":
                d["minutes"] = p.minutes
            out.append(d)
        return {"perturbations": out}


@dataclass(frozen=True)
class AppliedChange:
    kind: str
    field: str  # leaf path in the canonical JSON
    before: Any
    after: Any  # None = field removed


def _path_get(obj: Any, parts: list[Any]) -> Any:
    cur = obj
    for p in parts:
        if isinstance(p, int):
            cur = cur[p]
        else:
            if p not in cur:
                return None
            cur = cur[p]
    return cur


def _path_set(obj: Any, parts: list[Any], value: Any) -> None:
    cur = obj
    for p in parts[:-1]:
        cur = cur[p] if isinstance(p, int) else cur.setdefault(p, {})
    last = parts[-1]
    if value is None and not isinstance(last, int):
        cur.pop(last, None)
    else:
        cur[last] = value


def parse_path(path: str) -> list[Any]:
    """'segments[1].date' -> ['segments', 1, 'date']"""
    parts: list[Any] = []
    for token in path.split("."):
        while "[" in token:
            head, rest = token.split("[", 1)
            idx, token = rest.split("]", 1)
            if head:
                parts.append(head)
            parts.append(int(idx))
        if token:
            parts.append(token)
    return parts


def _eligible_fields(kind: str, explicit: Optional[str], obj: dict) -> list[str]:
    if explicit is not None:
        return [explicit]
    if kind == "drop_constraint":
        pool = _DROPPABLE_FIELDS
    elif kind == "flip_boolean":
        pool = _BOOLEAN_FIELDS
    elif kind == "shift_budget":
        pool = tuple(f"budget.{f}" for f in BudgetConstraints.FIELDS)
    else:
        return [""]  # structural kinds operate on the request as a whole
    return [f for f in pool if _path_get(obj, parse_path(f)) is not None]


def _apply_shift_window(rng: random.Random, obj: dict, minutes: int
                        ) -> list[AppliedChange]:
    changes = []
    delta = minutes if rng.random() < 0.5 else -minutes
    for key in ("departure_window", "arrival_window"):
        windows = obj.get("airline_constraints", {}).get(key)
        if windows is None:
            continue
        for i, w in enumerate(windows):
            if w is None:
                continue
            for bound in ("earliest", "latest"):
                old = w[bound]
                new = min(24 * 60 - 1, max(0, old + delta))
                if new != old:
                    w[bound] = new
                    changes.append(AppliedChange(
                        "shift_window",
                        f"airline_constraints.{key}[{i}].{bound}", old, new))
    return changes


def _apply_shift_date(rng: random.Random, obj: dict) -> list[AppliedChange]:
    segments = obj["segments"]
    k = rng.randrange(len(segments))
    old = date.fromisoformat(segments[k]["date"])
    older = date.fromisoformat(segments[k - 1]["date"]) if k else None
    newer = (date.fromisoformat(segments[k + 1]["date"])
             if k + 1 < len(segments) else None)
    options = []
    for delta in (-1, 1):
        cand = old + timedelta(days=delta)
        if older is not None and cand < older:
            continue
        if newer is not None and cand > newer:
            continue
        options.append(cand)
    if not options:
        return []
    new = rng.choice(options)
    segments[k]["date"] = new.isoformat()
    return [AppliedChange("shift_date", f"segments[{k}].date",
                          old.isoformat(), new.isoformat())]


def _apply_change_city(rng: random.Random, obj: dict,
                       pool: list[str]) -> list[AppliedChange]:
    segments = obj["segments"]
    in_trip = {s["origin"] for s in segments} | {s["destination"] for s in segments}
    candidates = [c for c in pool if c not in in_trip]
    if not candidates:
        return []
    new_city = rng.choice(sorted(candidates))
    # city "slots": destination of segment k, which is also origin of k+1
    k = rng.randrange(len(segments))
    changes = [AppliedChange("change_city", f"segments[{k}].destination",
                             segments[k]["destination"], new_city)]
    segments[k]["destination"] = new_city
    if k + 1 < len(segments):
        changes.append(AppliedChange("change_city", f"segments[{k + 1}].origin",
                                     segments[k + 1]["origin"], new_city))
        segments[k + 1]["origin"] = new_city
    return changes


def perturb_request(rng: random.Random, request: TravelRequest,
                    spec: PerturbationSpec,
                    city_pool: Optional[list[str]] = None
                    ) -> tuple[TravelRequest, list[AppliedChange]]:
    """Damage a request per the spec; the returned change list describes
    exactly every edit.  An empty spec returns the request unchanged."""
    obj = request_to_dict(request)
    pool = city_pool or sorted(_DEFAULT_AIRPORTS)
    changes: list[AppliedChange] = []
    for p in spec.perturbations:
        if p.kind in ("shift_window", "shift_date", "change_city"):
            if rng.random() >= p.prob:
                continue
            if p.kind == "shift_window":
                changes.extend(_apply_shift_window(rng, obj, p.minutes))
            elif p.kind == "shift_date":
                changes.extend(_apply_shift_date(rng, obj))
            else:
                changes.extend(_apply_change_city(rng, obj, pool))
            continue
        for fpath in _eligible_fields(p.kind, p.field, obj):
            if rng.random() >= p.prob:
                continue
            parts = parse_path(fpath)
            old = _path_get(obj, parts)
            if old is None:
                continue
            if p.kind == "drop_constraint":
                _path_set(obj, parts, None)
                changes.append(AppliedChange("drop_constraint", fpath, old, None))
            elif p.kind == "flip_boolean":
                _path_set(obj, parts, not old)
                changes.append(AppliedChange("flip_boolean", fpath, old, not old))
            elif p.kind == "shift_budget":
                new = max(100, int(round(old * (1.0 + p.rel_delta))))
                if new != old:
                    _path_set(obj, parts, new)
                    changes.append(AppliedChange("shift_budget", fpath, old, new))
    # drop now-empty constraint groups so the result stays canonical
    for group in ("airline_constraints", "hotel_constraints", "budget"):
        if group in obj and not obj[group]:
            del obj[group]
    return request_from_dict(obj), changes


def apply_changes(request: TravelRequest,
                  changes: list[AppliedChange]) -> TravelRequest:
    """Replay a recorded change list onto a request (for audits)."""
    obj = request_to_dict(request)
    for ch in changes:
        _path_set(obj, parse_path(ch.field), ch.after)
    for group in ("airline_constraints", "hotel_constraints", "budget"):
        if group in obj and not obj[group]:
            del obj[group]
    return request_from_dict(obj)


# ---------------------------------------------------------------------------
# flight-price CSV ingestion
# ---------------------------------------------------------------------------

_COLUMN_ALIASES = {
    "origin": ("origin", "startingairport", "origin_airport", "from"),
    "destination": ("destination", "destinationairport", "dest", "to"),
    "cabin": ("cabin", "cabincode", "segmentscabincode", "class"),
    "fare": ("totalfare", "fare", "total_fare", "price"),
    "departure": ("departure", "departuretime", "segmentsdeparturetimeraw",
                  "departure_timestamp", "dep_time"),
    "arrival": ("arrival", "arrivaltime", "segmentsarrivaltimeraw",
                "arrival_timestamp", "arr_time"),
    "airline": ("airline", "airlinecode", "segmentsairlinecode", "carrier"),
}

_CABIN_NORMALIZE = {
    "coach": "coach", "economy": "coach", "eco": "coach", "y": "coach",
    "basic economy": "basic_economy", "basiceconomy": "basic_economy",
    "basic_economy": "basic_economy",
    "business": "business", "premium": "business", "premium economy": "business",
    "first": "first",
}


@dataclass(frozen=True)
class IngestSummary:
    rows_total: int
    rows_used: int
    rows_skipped: int
    buckets: dict[str, dict[str, Any]]  # "cabin/bucket" -> {n, log_mean, log_sd}
    date_span: Optional[tuple[str, str]]

    def to_dict(self) -> dict:
        return {
            "rows_total": self.rows_total,
            "rows_used": self.rows_used,
            "rows_skipped": self.rows_skipped,
            "buckets": self.buckets,
            "date_span": list(self.date_span) if self.date_span else None,
        }


def _resolve_columns(header: list[str]) -> dict[str, str]:
    lower = {h.lower().strip(): h for h in header}
    resolved = {}
    for logical, aliases in _COLUMN_ALIASES.items():
        for a in aliases:
            if a in lower:
                resolved[logical] = lower[a]
                break
    missing = [k for k in ("origin", "destination", "cabin", "fare",
                           "departure", "arrival") if k not in resolved]
    if missing:
        raise EmptyData(f"CSV lacks required columns: {missing}")
    return resolved


def _parse_ts(raw: str) -> datetime:
    raw = raw.strip()
    if raw.endswith("Z"):
        raw = raw[:-1]
    # multi-leg exports join timestamps with "||"; use the first leg
    raw = raw.split("||")[0]
    return datetime.fromisoformat(raw)


def ingest_flight_csv(path: str, base: Optional[PriceModel] = None
                      ) -> tuple[PriceModel, IngestSummary]:
    """Fit flight-price distributions from a fares CSV.

    Rows with unparsable fares or timestamps are counted and skipped.  The
    ingested date coverage is treated as tiling over any requested horizon,
    so fitted prices apply to all generated dates.
    """
    base = base or PriceModel()
    samples: dict[tuple[str, str], list[float]] = {}
    dep_hours: dict[int, float] = {}
    airline_counts: dict[str, float] = {}
    dates: list[date] = []
    rows_total = rows_used = 0

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames:
            raise EmptyData("empty CSV")
        cols = _resolve_columns(list(reader.fieldnames))
        for row in reader:
            rows_total += 1
            try:
                fare_cents = int(round(float(row[cols["fare"]]) * 100))
                if fare_cents <= 0:
                    raise ValueError("non-positive fare")
                dep = _parse_ts(row[cols["departure"]])
                arr = _parse_ts(row[cols["arrival"]])
                if arr <= dep:
                    raise ValueError("arrival precedes departure")
                cabin = _CABIN_NORMALIZE[row[cols["cabin"]].strip().lower()]
                origin = row[cols["origin"]].strip().upper()
                dest = row[cols["destination"]].strip().upper()
            except (KeyError, ValueError, TypeError):
                continue
            if origin in _DEFAULT_AIRPORTS and dest in _DEFAULT_AIRPORTS:
                miles = haversine_miles(_DEFAULT_AIRPORTS[origin],
                                        _DEFAULT_AIRPORTS[dest])
            else:
                hours = (arr - dep).total_seconds() / 3600.0
                miles = max(100.0, (hours - 0.6) * 460.0)
            bucket = distance_bucket(miles)
            samples.setdefault((cabin, bucket), []).append(math.log(fare_cents))
            dep_hours[dep.hour] = dep_hours.get(dep.hour, 0) + 1
            if "airline" in cols and row.get(cols["airline"], "").strip():
                a = row[cols["airline"]].strip().upper().split("||")[0]
                airline_counts[a] = airline_counts.get(a, 0) + 1
            dates.append(dep.date())
            rows_used += 1

    if rows_used == 0:
        raise EmptyData("no usable rows")

    flight_price = {c: dict(bk) for c, bk in base.flight_price.items()}
    buckets_summary: dict[str, dict[str, Any]] = {}
    for (cabin, bucket), logs in sorted(samples.items()):
        mean = sum(logs) / len(logs)
        if len(logs) > 1:
            var = sum((x - mean) ** 2 for x in logs) / (len(logs) - 1)
            sd = math.sqrt(var)
        else:
            sd = base.flight_price[cabin][bucket][1]
        flight_price[cabin][bucket] = (mean, max(sd, 1e-6))
        buckets_summary[f"{cabin}/{bucket}"] = {
            "n": len(logs), "log_mean": mean, "log_sd": max(sd, 1e-6)}

    model = PriceModel(
        flight_price=flight_price,
        hotel_price=base.hotel_price,
        airline_weights=airline_counts or base.airline_weights,
        aircraft=base.aircraft,
        brands=base.brands,
        star_weights=base.star_weights,
        dep_hour_weights=dep_hours or base.dep_hour_weights,
    )
    span = (min(dates).isoformat(), max(dates).isoformat()) if dates else None
    summary = IngestSummary(rows_total, rows_used, rows_total - rows_used,
                            buckets_summary, span)
    return model, summary
