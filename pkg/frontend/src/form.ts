/** Form state and its lossless mapping to/from the request wire format.
 *  The form mirrors the schema invariants client side so invalid requests
 *  can never be submitted. */

import type {
  AirlineConstraints,
  BudgetConstraints,
  HotelConstraints,
  Segment,
  TimeWindow,
  TravelRequest,
} from "./types.js";

export interface WindowState {
  earliest: number; // minutes of day
  latest: number;
  soft: boolean;
}

/** Optional fields are null when the constraint is not stated. */
export interface FormState {
  requestId: string;
  segments: Segment[];
  // airline constraints
  flightPriceRange: [number, number] | null; // cents, total flight spend
  departureWindows: (WindowState | null)[] | null; // aligned to segments
  arrivalWindows: (WindowState | null)[] | null;
  cabinClass: string | null;
  refundable: boolean | null;
  nonStop: boolean | null;
  planeType: string[] | null;
  preferredAirlines: string[] | null;
  avoidedAirlines: string[] | null;
  mustNotBasicEconomy: boolean | null;
  avoidRedEye: boolean | null;
  noMixedCabin: boolean | null;
  // hotel constraints
  hotelPriceRange: [number, number] | null; // cents, nightly
  ratingMin: number | null;
  preferredBrands: string[] | null;
  avoidedBrands: string[] | null;
  // budgets, cents
  totalBudget: number | null;
  flightTotalBudget: number | null;
  hotelTotalBudget: number | null;
  hotelDailyBudget: number | null;
}

export function emptyForm(): FormState {
  return {
    requestId: "ui-request",
    segments: [{ origin: "", destination: "", date: "" }],
    flightPriceRange: null,
    departureWindows: null,
    arrivalWindows: null,
    cabinClass: null,
    refundable: null,
    nonStop: null,
    planeType: null,
    preferredAirlines: null,
    avoidedAirlines: null,
    mustNotBasicEconomy: null,
    avoidRedEye: null,
    noMixedCabin: null,
    hotelPriceRange: null,
    ratingMin: null,
    preferredBrands: null,
    avoidedBrands: null,
    totalBudget: null,
    flightTotalBudget: null,
    hotelTotalBudget: null,
    hotelDailyBudget: null,
  };
}

const CITY_RE = /^[A-Z]{3}$/;
const DATE_RE = /^\d{4}-\d{2}-\d{2}$/;

export interface ValidationIssue {
  field: string;
  message: string;
}

export function validateForm(form: FormState): ValidationIssue[] {
  const issues: ValidationIssue[] = [];
  if (form.segments.length === 0) {
    issues.push({ field: "segments", message: "add at least one segment" });
  }
  form.segments.forEach((seg, i) => {
    if (!CITY_RE.test(seg.origin)) {
      issues.push({
        field: `segments[${i}].origin`,
        message: "3-letter uppercase city code required",
      });
    }
    if (!CITY_RE.test(seg.destination)) {
      issues.push({
        field: `segments[${i}].destination`,
        message: "3-letter uppercase city code required",
      });
    }
    if (seg.origin && seg.origin === seg.destination) {
      issues.push({
        field: `segments[${i}].destination`,
        message: "origin and destination must differ",
      });
    }
    if (!DATE_RE.test(seg.date)) {
      issues.push({ field: `segments[${i}].date`, message: "date required" });
    }
    if (i > 0) {
      const prev = form.segments[i - 1];
      if (prev.destination && seg.origin && prev.destination !== seg.origin) {
        issues.push({
          field: `segments[${i}].origin`,
          message: `must chain from ${prev.destination}`,
        });
      }
      if (prev.date && seg.date && seg.date < prev.date) {
        issues.push({
          field: `segments[${i}].date`,
          message: "dates must be non-decreasing",
        });
      }
    }
  });
  const ranges: [string, [number, number] | null][] = [
    ["flight price range", form.flightPriceRange],
    ["hotel price range", form.hotelPriceRange],
  ];
  for (const [name, range] of ranges) {
    if (range && range[0] > range[1]) {
      issues.push({ field: name, message: "min exceeds max" });
    }
  }
  for (const windows of [form.departureWindows, form.arrivalWindows]) {
    for (const w of windows ?? []) {
      if (w && w.earliest > w.latest) {
        issues.push({ field: "window", message: "earliest exceeds latest" });
      }
    }
  }
  const overlap = (a: string[] | null, b: string[] | null) =>
    a && b && a.some((x) => b.includes(x));
  if (overlap(form.preferredAirlines, form.avoidedAirlines)) {
    issues.push({
      field: "preferred airlines",
      message: "overlaps avoided airlines",
    });
  }
  if (overlap(form.preferredBrands, form.avoidedBrands)) {
    issues.push({
      field: "preferred brands",
      message: "overlaps avoided brands",
    });
  }
  for (const [name, v] of [
    ["total budget", form.totalBudget],
    ["flight budget", form.flightTotalBudget],
    ["hotel budget", form.hotelTotalBudget],
    ["daily hotel budget", form.hotelDailyBudget],
  ] as const) {
    if (v !== null && v <= 0) {
      issues.push({ field: name, message: "must be positive" });
    }
  }
  return issues;
}

function windowsToWire(
  windows: (WindowState | null)[] | null,
  nSegments: number,
): (TimeWindow | null)[] | undefined {
  if (!windows || windows.every((w) => w === null)) return undefined;
  const out: (TimeWindow | null)[] = [];
  for (let i = 0; i < nSegments; i++) {
    const w = windows[i] ?? null;
    out.push(w ? { earliest: w.earliest, latest: w.latest, soft: w.soft } : null);
  }
  return out;
}

const sorted = (xs: string[]) => [...xs].sort();

export function formToRequest(form: FormState): TravelRequest {
  const airline: AirlineConstraints = {};
  if (form.flightPriceRange) airline.price_range = [...form.flightPriceRange];
  const dep = windowsToWire(form.departureWindows, form.segments.length);
  if (dep) airline.departure_window = dep;
  const arr = windowsToWire(form.arrivalWindows, form.segments.length);
  if (arr) airline.arrival_window = arr;
  if (form.cabinClass !== null) airline.cabin_class = form.cabinClass;
  if (form.refundable !== null) airline.refundable = form.refundable;
  if (form.nonStop !== null) airline.non_stop = form.nonStop;
  if (form.planeType) airline.plane_type = sorted(form.planeType);
  if (form.preferredAirlines)
    airline.preferred_airlines = sorted(form.preferredAirlines);
  if (form.avoidedAirlines)
    airline.avoided_airlines = sorted(form.avoidedAirlines);
  if (form.mustNotBasicEconomy !== null)
    airline.must_not_basic_economy = form.mustNotBasicEconomy;
  if (form.avoidRedEye !== null) airline.avoid_red_eye = form.avoidRedEye;
  if (form.noMixedCabin !== null) airline.no_mixed_cabin = form.noMixedCabin;

  const hotel: HotelConstraints = {};
  if (form.hotelPriceRange) hotel.price_range = [...form.hotelPriceRange];
  if (form.ratingMin !== null) hotel.rating_min = form.ratingMin;
  if (form.preferredBrands)
    hotel.preferred_brands = sorted(form.preferredBrands);
  if (form.avoidedBrands) hotel.avoided_brands = sorted(form.avoidedBrands);

  const budget: BudgetConstraints = {};
  if (form.totalBudget !== null) budget.total_budget = form.totalBudget;
  if (form.flightTotalBudget !== null)
    budget.flight_total_budget = form.flightTotalBudget;
  if (form.hotelTotalBudget !== null)
    budget.hotel_total_budget = form.hotelTotalBudget;
  if (form.hotelDailyBudget !== null)
    budget.hotel_daily_budget = form.hotelDailyBudget;

  const request: TravelRequest = {
    schema_version: 1,
    request_id: form.requestId,
    segments: form.segments.map((s) => ({ ...s })),
  };
  if (Object.keys(airline).length) request.airline_constraints = airline;
  if (Object.keys(hotel).length) request.hotel_constraints = hotel;
  if (Object.keys(budget).length) request.budget = budget;
  return request;
}

function windowsFromWire(
  windows: (TimeWindow | null)[] | undefined,
): (WindowState | null)[] | null {
  if (!windows) return null;
  return windows.map((w) =>
    w ? { earliest: w.earliest, latest: w.latest, soft: w.soft } : null,
  );
}

export function requestToForm(request: TravelRequest): FormState {
  const form = emptyForm();
  form.requestId = request.request_id;
  form.segments = request.segments.map((s) => ({ ...s }));
  const a = request.airline_constraints ?? {};
  form.flightPriceRange = a.price_range ? [...a.price_range] : null;
  form.departureWindows = windowsFromWire(a.departure_window);
  form.arrivalWindows = windowsFromWire(a.arrival_window);
  form.cabinClass = a.cabin_class ?? null;
  form.refundable = a.refundable ?? null;
  form.nonStop = a.non_stop ?? null;
  form.planeType = a.plane_type ? [...a.plane_type] : null;
  form.preferredAirlines = a.preferred_airlines
    ? [...a.preferred_airlines]
    : null;
  form.avoidedAirlines = a.avoided_airlines ? [...a.avoided_airlines] : null;
  form.mustNotBasicEconomy = a.must_not_basic_economy ?? null;
  form.avoidRedEye = a.avoid_red_eye ?? null;
  form.noMixedCabin = a.no_mixed_cabin ?? null;
  const h = request.hotel_constraints ?? {};
  form.hotelPriceRange = h.price_range ? [...h.price_range] : null;
  form.ratingMin = h.rating_min ?? null;
  form.preferredBrands = h.preferred_brands ? [...h.preferred_brands] : null;
  form.avoidedBrands = h.avoided_brands ? [...h.avoided_brands] : null;
  const b = request.budget ?? {};
  form.totalBudget = b.total_budget ?? null;
  form.flightTotalBudget = b.flight_total_budget ?? null;
  form.hotelTotalBudget = b.hotel_total_budget ?? null;
  form.hotelDailyBudget = b.hotel_daily_budget ?? null;
  return form;
}

/** Canonical-ish JSON for equality checks in tests: sorted keys. */
export function stableStringify(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(stableStringify).join(",")}]`;
  }
  if (value && typeof value === "object") {
    const entries = Object.entries(value as Record<string, unknown>)
      .filter(([, v]) => v !== undefined)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => `${JSON.stringify(k)}:${stableStringify(v)}`);
    return `{${entries.join(",")}}`;
  }
  return JSON.stringify(value);
}
