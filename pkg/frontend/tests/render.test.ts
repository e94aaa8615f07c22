import { describe, expect, it } from "vitest";

import {
  dollars,
  renderComparison,
  renderErrorBanner,
  renderOption,
  renderOptions,
  renderRouteSvg,
  routeArcs,
  snapshotTotals,
} from "../src/render.js";
import type {
  FlightOffer,
  SolveOption,
  SolveResponse,
} from "../src/types.js";

function flight(i: number, origin: string, dest: string, price: number,
                date = "2025-01-15"): FlightOffer {
  return {
    id: `f${i}`,
    segment_index: i,
    origin,
    destination: dest,
    airline: "AA",
    flight_number: String(100 + i),
    cabin: "coach",
    price,
    departure: `${date}T09:00`,
    arrival: `${date}T13:00`,
    non_stop: true,
    aircraft: "A320",
    refundable: true,
    is_basic_economy: false,
    is_red_eye: false,
    is_mixed_cabin: false,
  };
}

function optimalOption(flightCost: number, hotelCost: number,
                       flights: FlightOffer[]): SolveOption {
  return {
    status: "optimal",
    itinerary: {
      schema_version: 1,
      chosen_flights: flights.map((f) => f.id),
      hotel_stays: [
        { hotel_id: "h1", check_in: "2025-01-15", check_out: "2025-01-17" },
      ],
      flight_cost: flightCost,
      hotel_cost: hotelCost,
      total_cost: flightCost + hotelCost,
      objective_kind: "min_cost",
      objective_value: 1000 * (flightCost + hotelCost),
    },
    offers: {
      flights,
      hotels: [
        {
          id: "h1",
          city: "MIA",
          brand: "Hilton",
          rating: 4,
          nightly_price: 15000,
          checkin_earliest: 840,
          checkout_latest: 660,
          available_from: "2025-01-10",
          available_to: "2025-01-20",
        },
      ],
    },
    timing: { translate_ms: null, load_ms: 10, solve_ms: 50, total_ms: 60 },
  };
}

function stubResponse(): SolveResponse {
  const flights = [
    flight(0, "DEN", "MIA", 21041),
    flight(1, "MIA", "JFK", 18900, "2025-01-17"),
    flight(2, "JFK", "DEN", 25500, "2025-01-18"),
  ];
  const flightCost = 21041 + 18900 + 25500;
  const base = optimalOption(flightCost, 30000, flights);
  return {
    schema_version: 1,
    request: {
      schema_version: 1,
      request_id: "r",
      segments: [
        { origin: "DEN", destination: "MIA", date: "2025-01-15" },
        { origin: "MIA", destination: "JFK", date: "2025-01-17" },
        { origin: "JFK", destination: "DEN", date: "2025-01-18" },
      ],
    },
    options: {
      min_cost: base,
      better_hotel: optimalOption(flightCost, 41000, flights),
      better_flight: optimalOption(flightCost + 9000, 30000, flights),
    },
  };
}

describe("option cards", () => {
  it("renders three cards with server-equal totals", () => {
    const response = stubResponse();
    const html = renderOptions(response);
    for (const kind of ["min_cost", "better_hotel", "better_flight"]) {
      expect(html).toContain(`data-kind="${kind}"`);
    }
    for (const option of Object.values(response.options)) {
      const it = option.itinerary!;
      expect(html).toContain(
        `data-field="total_cost">${dollars(it.total_cost)}`,
      );
      expect(html).toContain(
        `data-field="flight_cost">${dollars(it.flight_cost)}`,
      );
      expect(html).toContain(
        `data-field="hotel_cost">${dollars(it.hotel_cost)}`,
      );
    }
    expect(html).toContain("Minimum Cost");
    expect(html).toContain("Better Hotel");
    expect(html).toContain("Better Flight");
    expect(html).toContain("Hilton");
    expect(html).toContain("★★★★☆");
  });

  it("renders an infeasibility notice without an itinerary", () => {
    const option: SolveOption = {
      status: "infeasible",
      detail: "no itinerary satisfies every constraint",
      timing: { translate_ms: null, load_ms: 5, solve_ms: 2, total_ms: 7 },
    };
    const html = renderOption("min_cost", option);
    expect(html).toContain("No feasible itinerary");
    expect(html).not.toContain("data-field");
  });
});

describe("route view", () => {
  it("labels one arc per segment and their sum is the flight cost", () => {
    const response = stubResponse();
    const option = response.options.min_cost;
    const arcs = routeArcs(option.offers!.flights);
    expect(arcs).toHaveLength(3);
    const sum = arcs.reduce((acc, a) => acc + a.label, 0);
    expect(sum).toBe(option.itinerary!.flight_cost);
    const svg = renderRouteSvg(arcs);
    for (const arc of arcs) {
      expect(svg).toContain(dollars(arc.label));
    }
    // round trip: three arcs over the three distinct cities
    expect((svg.match(/<path /g) ?? []).length).toBe(3);
    expect((svg.match(/<circle /g) ?? []).length).toBe(3);
  });

  it("renders a one-way trip as an open chain", () => {
    const arcs = routeArcs([flight(0, "DEN", "MIA", 12000)]);
    const svg = renderRouteSvg(arcs);
    expect((svg.match(/<path /g) ?? []).length).toBe(1);
    expect((svg.match(/<circle /g) ?? []).length).toBe(2);
  });
});

describe("what-if comparison", () => {
  it("shows previous and current totals side by side", () => {
    const response = stubResponse();
    const before = snapshotTotals(response, "before");
    const after = snapshotTotals(response, "after (budget lowered)");
    const html = renderComparison(before, after);
    expect(html).toContain("before");
    expect(html).toContain("after (budget lowered)");
    const expected = dollars(response.options.min_cost.itinerary!.total_cost);
    const hits = html.split(expected).length - 1;
    expect(hits).toBeGreaterThanOrEqual(2); // one per row
  });

  it("marks infeasible options with a dash", () => {
    const response = stubResponse();
    response.options.better_hotel = {
      status: "infeasible",
      detail: "x",
      timing: { translate_ms: null, load_ms: 1, solve_ms: 1, total_ms: 2 },
    };
    const html = renderComparison(null, snapshotTotals(response, "now"));
    expect(html).toContain("—");
  });
});

describe("error banner", () => {
  it("includes status, field path and detail", () => {
    const html = renderErrorBanner(422, "InfeasibleRequest",
      "hotel budget window empty", "budget.hotel_daily_budget");
    expect(html).toContain("422");
    expect(html).toContain("InfeasibleRequest");
    expect(html).toContain("budget.hotel_daily_budget");
    expect(html).toContain("hotel budget window empty");
  });

  it("escapes markup in server text", () => {
    const html = renderErrorBanner(400, "<b>bad</b>", "<script>x</script>");
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });
});
