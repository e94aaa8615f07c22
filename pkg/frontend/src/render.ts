/** HTML renderers for option cards, itinerary tables, the route diagram
 *  and hotel cards.  Every number shown comes from a server field; the UI
 *  does no cost arithmetic of record. */

import type {
  FlightOffer,
  HotelOffer,
  ObjectiveKind,
  SolveOption,
  SolveResponse,
} from "./types.js";
import { OBJECTIVE_KINDS, OBJECTIVE_LABELS } from "./types.js";

export function dollars(cents: number): string {
  return `$${(cents / 100).toLocaleString("en-US", {
    minimumFractionDigits: 2,
    maximumFractionDigits: 2,
  })}`;
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function hhmm(iso: string): string {
  return iso.slice(11, 16);
}

function stars(rating: number): string {
  return "★".repeat(rating) + "☆".repeat(5 - rating);
}

// ---------------------------------------------------------------------------
// route diagram: one labeled arc per segment, no map tiles
// ---------------------------------------------------------------------------

export interface RouteArc {
  from: string;
  to: string;
  label: number; // flight price, cents
}

export function routeArcs(flights: FlightOffer[]): RouteArc[] {
  return [...flights]
    .sort((a, b) => a.segment_index - b.segment_index)
    .map((f) => ({ from: f.origin, to: f.destination, label: f.price }));
}

export function renderRouteSvg(arcs: RouteArc[]): string {
  const cities: string[] = [];
  for (const arc of arcs) {
    if (!cities.includes(arc.from)) cities.push(arc.from);
    if (!cities.includes(arc.to)) cities.push(arc.to);
  }
  const width = Math.max(320, cities.length * 110);
  const y = 120;
  const xOf = (city: string) =>
    40 + (cities.indexOf(city) * (width - 80)) / Math.max(1, cities.length - 1);
  const parts: string[] = [
    `<svg class="route" viewBox="0 0 ${width} 170" role="img">`,
  ];
  arcs.forEach((arc, i) => {
    const x1 = xOf(arc.from);
    const x2 = xOf(arc.to);
    const lift = 55 + (i % 2) * 28;
    const mx = (x1 + x2) / 2;
    parts.push(
      `<path d="M ${x1} ${y} Q ${mx} ${y - lift} ${x2} ${y}" ` +
        `class="route-arc" fill="none"/>`,
      `<text x="${mx}" y="${y - lift / 2 - 8}" class="route-price" ` +
        `text-anchor="middle">${esc(dollars(arc.label))}</text>`,
    );
  });
  for (const city of cities) {
    const x = xOf(city);
    parts.push(
      `<circle cx="${x}" cy="${y}" r="6" class="route-node"/>`,
      `<text x="${x}" y="${y + 24}" class="route-city" text-anchor="middle">` +
        `${esc(city)}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

// ---------------------------------------------------------------------------
// option cards
// ---------------------------------------------------------------------------

function renderFlightsTable(flights: FlightOffer[]): string {
  const rows = [...flights]
    .sort((a, b) => a.segment_index - b.segment_index)
    .map(
      (f) => `<tr>
        <td>${esc(f.departure.slice(0, 10))}</td>
        <td>${esc(f.origin)}→${esc(f.destination)}</td>
        <td>${esc(f.airline)} ${esc(f.flight_number)}</td>
        <td>${esc(f.cabin.replace("_", " "))}</td>
        <td>${hhmm(f.departure)}–${hhmm(f.arrival)}</td>
        <td class="num">${dollars(f.price)}</td>
      </tr>`,
    )
    .join("");
  return `<table class="itinerary">
    <thead><tr><th>date</th><th>route</th><th>flight</th><th>cabin</th>
    <th>time</th><th>price</th></tr></thead>
    <tbody>${rows}</tbody></table>`;
}

function renderHotelCards(
  hotels: HotelOffer[],
  stays: { hotel_id: string; check_in: string; check_out: string }[],
): string {
  if (!stays.length) return `<p class="muted">No hotel nights needed.</p>`;
  const byId = new Map(hotels.map((h) => [h.id, h]));
  const cards = stays
    .map((stay) => {
      const h = byId.get(stay.hotel_id);
      if (!h) return "";
      return `<div class="hotel-card">
        <div class="hotel-name">${esc(h.brand)} <span class="muted">(${esc(
          h.city,
        )})</span></div>
        <div class="hotel-rating" aria-label="${h.rating} stars">${stars(
          h.rating,
        )}</div>
        <div>${esc(stay.check_in)} → ${esc(stay.check_out)}</div>
        <div class="hotel-price">${dollars(h.nightly_price)}/night</div>
      </div>`;
    })
    .join("");
  return `<div class="hotel-cards">${cards}</div>`;
}

export function renderOption(kind: ObjectiveKind, option: SolveOption): string {
  const label = OBJECTIVE_LABELS[kind];
  if (option.status !== "optimal" || !option.itinerary) {
    return `<article class="option option-infeasible" data-kind="${kind}">
      <h3>${esc(label)}</h3>
      <p class="infeasible">No feasible itinerary: ${esc(
        option.detail ?? "unknown reason",
      )}</p>
    </article>`;
  }
  const it = option.itinerary;
  const offers = option.offers ?? { flights: [], hotels: [] };
  const timing = option.timing;
  return `<article class="option" data-kind="${kind}">
    <h3>${esc(label)}</h3>
    <p class="totals">
      total <strong data-field="total_cost">${dollars(it.total_cost)}</strong>
      · flights <span data-field="flight_cost">${dollars(it.flight_cost)}</span>
      · hotels <span data-field="hotel_cost">${dollars(it.hotel_cost)}</span>
    </p>
    ${renderFlightsTable(offers.flights)}
    ${renderRouteSvg(routeArcs(offers.flights))}
    ${renderHotelCards(offers.hotels, it.hotel_stays)}
    <p class="timing muted">load ${timing.load_ms.toFixed(0)} ms ·
      solve ${timing.solve_ms.toFixed(0)} ms ·
      total ${timing.total_ms.toFixed(0)} ms</p>
  </article>`;
}

export function renderOptions(response: SolveResponse): string {
  const cards = OBJECTIVE_KINDS.map((kind) =>
    renderOption(kind, response.options[kind]),
  ).join("");
  return `<div class="options">${cards}</div>`;
}

// ---------------------------------------------------------------------------
// what-if comparison strip
// ---------------------------------------------------------------------------

export interface TotalsSnapshot {
  label: string;
  totals: Partial<Record<ObjectiveKind, number | null>>;
}

export function snapshotTotals(
  response: SolveResponse,
  label: string,
): TotalsSnapshot {
  const totals: TotalsSnapshot["totals"] = {};
  for (const kind of OBJECTIVE_KINDS) {
    const option = response.options[kind];
    totals[kind] =
      option.status === "optimal" && option.itinerary
        ? option.itinerary.total_cost
        : null;
  }
  return { label, totals };
}

export function renderComparison(
  previous: TotalsSnapshot | null,
  current: TotalsSnapshot,
): string {
  const header = OBJECTIVE_KINDS.map(
    (k) => `<th>${esc(OBJECTIVE_LABELS[k])}</th>`,
  ).join("");
  const row = (snap: TotalsSnapshot) =>
    `<tr><td>${esc(snap.label)}</td>${OBJECTIVE_KINDS.map((k) => {
      const v = snap.totals[k];
      return `<td class="num">${v == null ? "—" : dollars(v)}</td>`;
    }).join("")}</tr>`;
  const rows = previous ? row(previous) + row(current) : row(current);
  return `<table class="comparison">
    <thead><tr><th></th>${header}</tr></thead>
    <tbody>${rows}</tbody></table>`;
}

export function renderErrorBanner(status: number, error: string,
                                  detail: string, field?: string): string {
  const where = field ? ` <code>${esc(field)}</code>` : "";
  return `<div class="banner error" role="alert">
    <strong>${esc(error)}</strong> (HTTP ${status})${where}: ${esc(detail)}
  </div>`;
}
