/** Wire types for the planner service (all money in integer cents,
 *  times of day in minutes, dates as YYYY-MM-DD strings). */

export interface Segment {
  origin: string;
  destination: string;
  date: string;
}

export interface TimeWindow {
  earliest: number;
  latest: number;
  soft: boolean;
}

export interface AirlineConstraints {
  price_range?: [number, number];
  departure_window?: (TimeWindow | null)[];
  arrival_window?: (TimeWindow | null)[];
  cabin_class?: string;
  refundable?: boolean;
  non_stop?: boolean;
  plane_type?: string[];
  preferred_airlines?: string[];
  avoided_airlines?: string[];
  must_not_basic_economy?: boolean;
  avoid_red_eye?: boolean;
  no_mixed_cabin?: boolean;
}

export interface HotelConstraints {
  price_range?: [number, number];
  rating_min?: number;
  preferred_brands?: string[];
  avoided_brands?: string[];
}

export interface BudgetConstraints {
  total_budget?: number;
  flight_total_budget?: number;
  hotel_total_budget?: number;
  hotel_daily_budget?: number;
}

export interface TravelRequest {
  schema_version: 1;
  request_id: string;
  segments: Segment[];
  airline_constraints?: AirlineConstraints;
  hotel_constraints?: HotelConstraints;
  budget?: BudgetConstraints;
}

export interface FlightOffer {
  id: string;
  segment_index: number;
  origin: string;
  destination: string;
  airline: string;
  flight_number: string;
  cabin: string;
  price: number;
  departure: string;
  arrival: string;
  non_stop: boolean;
  aircraft: string;
  refundable: boolean;
  is_basic_economy: boolean;
  is_red_eye: boolean;
  is_mixed_cabin: boolean;
}

export interface HotelOffer {
  id: string;
  city: string;
  brand: string;
  rating: number;
  nightly_price: number;
  checkin_earliest: number;
  checkout_latest: number;
  available_from: string;
  available_to: string;
}

export interface Inventory {
  schema_version: 1;
  flights: FlightOffer[];
  hotels: HotelOffer[];
}

export interface HotelStay {
  hotel_id: string;
  check_in: string;
  check_out: string;
}

export interface Itinerary {
  schema_version: 1;
  chosen_flights: string[];
  hotel_stays: HotelStay[];
  flight_cost: number;
  hotel_cost: number;
  total_cost: number;
  objective_kind: ObjectiveKind;
  objective_value: number;
}

export interface OptionTiming {
  translate_ms: number | null;
  load_ms: number;
  solve_ms: number;
  total_ms: number;
}

export interface SolveOption {
  status: "optimal" | "infeasible";
  itinerary?: Itinerary;
  offers?: { flights: FlightOffer[]; hotels: HotelOffer[] };
  detail?: string;
  timing: OptionTiming;
}

export type ObjectiveKind = "min_cost" | "better_hotel" | "better_flight";

export const OBJECTIVE_KINDS: ObjectiveKind[] = [
  "min_cost",
  "better_hotel",
  "better_flight",
];

export const OBJECTIVE_LABELS: Record<ObjectiveKind, string> = {
  min_cost: "Minimum Cost",
  better_hotel: "Better Hotel",
  better_flight: "Better Flight",
};

export interface SolveResponse {
  schema_version: 1;
  request: TravelRequest;
  options: Record<ObjectiveKind, SolveOption>;
}

export interface GenerateResponse {
  schema_version: 1;
  request: TravelRequest;
  inventory: Inventory;
}

export interface ApiErrorBody {
  error: string;
  detail: string;
  field?: string;
}
