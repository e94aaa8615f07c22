/** Browser entry: binds the request form, drives solve/generate calls and
 *  renders results.  One solve in flight at a time; a newer submit cancels
 *  the previous one (handled by the ApiClient). */

import { ApiClient, ApiError } from "./api.js";
import {
  FormState,
  WindowState,
  emptyForm,
  formToRequest,
  requestToForm,
  stableStringify,
  validateForm,
} from "./form.js";
import {
  renderComparison,
  renderErrorBanner,
  renderOptions,
  snapshotTotals,
  TotalsSnapshot,
} from "./render.js";
import type { Inventory } from "./types.js";

const apiBase =
  new URLSearchParams(location.search).get("api") ?? "http://localhost:8080";
const api = new ApiClient(apiBase);

const $ = <T extends HTMLElement>(id: string): T =>
  document.getElementById(id) as T;

let heldInventory: Inventory | null = null;
let heldSegmentsKey: string | null = null;
let previousSnapshot: TotalsSnapshot | null = null;
let solveCounter = 0;

// -- segments ----------------------------------------------------------------

function segmentRowHtml(i: number): string {
  return `<div class="segment-row" data-index="${i}">
    <label>origin <input class="seg-origin" maxlength="3" placeholder="DEN"></label>
    <label>destination <input class="seg-destination" maxlength="3" placeholder="MIA"></label>
    <label>date <input class="seg-date" type="date"></label>
  </div>`;
}

function segmentRows(): HTMLElement[] {
  return Array.from(document.querySelectorAll<HTMLElement>(".segment-row"));
}

function setSegmentCount(n: number): void {
  const host = $("segments");
  while (segmentRows().length > n) host.lastElementChild?.remove();
  while (segmentRows().length < n) {
    host.insertAdjacentHTML("beforeend", segmentRowHtml(segmentRows().length));
  }
}

// -- form <-> DOM -------------------------------------------------------------

function parseMinutes(value: string): number | null {
  if (!/^\d{2}:\d{2}$/.test(value)) return null;
  const [h, m] = value.split(":").map(Number);
  return h * 60 + m;
}

function minutesToTime(minutes: number): string {
  const h = Math.floor(minutes / 60);
  const m = minutes % 60;
  return `${String(h).padStart(2, "0")}:${String(m).padStart(2, "0")}`;
}

function centsOf(input: HTMLInputElement): number | null {
  if (input.value.trim() === "") return null;
  const v = Number(input.value);
  return Number.isFinite(v) ? Math.round(v * 100) : null;
}

function setCents(input: HTMLInputElement, cents: number | null): void {
  input.value = cents === null ? "" : (cents / 100).toFixed(2);
}

function tristate(id: string): boolean | null {
  const v = $<HTMLSelectElement>(id).value;
  return v === "" ? null : v === "yes";
}

function setTristate(id: string, v: boolean | null): void {
  $<HTMLSelectElement>(id).value = v === null ? "" : v ? "yes" : "no";
}

function listOf(id: string): string[] | null {
  const raw = $<HTMLInputElement>(id).value.trim();
  if (!raw) return null;
  const items = raw
    .split(",")
    .map((s) => s.trim())
    .filter(Boolean);
  return items.length ? items : null;
}

function setList(id: string, items: string[] | null): void {
  $<HTMLInputElement>(id).value = items ? items.join(", ") : "";
}

function readWindow(prefix: string, n: number): (WindowState | null)[] | null {
  if (!$<HTMLInputElement>(`${prefix}-window-on`).checked) return null;
  const earliest = parseMinutes($<HTMLInputElement>(`${prefix}-earliest`).value);
  const latest = parseMinutes($<HTMLInputElement>(`${prefix}-latest`).value);
  if (earliest === null || latest === null) return null;
  const w: WindowState = {
    earliest,
    latest,
    soft: $<HTMLInputElement>(`${prefix}-soft`).checked,
  };
  return Array.from({ length: n }, () => ({ ...w }));
}

function writeWindow(
  prefix: string,
  windows: (WindowState | null)[] | null,
): void {
  const first = windows?.find((w) => w !== null) ?? null;
  $<HTMLInputElement>(`${prefix}-window-on`).checked = first !== null;
  if (first) {
    $<HTMLInputElement>(`${prefix}-earliest`).value = minutesToTime(
      first.earliest,
    );
    $<HTMLInputElement>(`${prefix}-latest`).value = minutesToTime(first.latest);
    $<HTMLInputElement>(`${prefix}-soft`).checked = first.soft;
  }
}

function rangeOf(minId: string, maxId: string): [number, number] | null {
  const lo = centsOf($<HTMLInputElement>(minId));
  const hi = centsOf($<HTMLInputElement>(maxId));
  if (lo === null && hi === null) return null;
  return [lo ?? 0, hi ?? Math.max(lo ?? 0, 100_000_00)];
}

export function readForm(): FormState {
  const form = emptyForm();
  form.segments = segmentRows().map((row) => ({
    origin: row.querySelector<HTMLInputElement>(".seg-origin")!.value
      .trim()
      .toUpperCase(),
    destination: row
      .querySelector<HTMLInputElement>(".seg-destination")!
      .value.trim()
      .toUpperCase(),
    date: row.querySelector<HTMLInputElement>(".seg-date")!.value,
  }));
  form.flightPriceRange = rangeOf("flight-price-min", "flight-price-max");
  form.departureWindows = readWindow("dep", form.segments.length);
  form.arrivalWindows = readWindow("arr", form.segments.length);
  const cabin = $<HTMLSelectElement>("cabin-class").value;
  form.cabinClass = cabin || null;
  form.refundable = tristate("refundable");
  form.nonStop = tristate("non-stop");
  form.mustNotBasicEconomy = tristate("must-not-basic-economy");
  form.avoidRedEye = tristate("avoid-red-eye");
  form.noMixedCabin = tristate("no-mixed-cabin");
  form.planeType = listOf("plane-type");
  form.preferredAirlines = listOf("preferred-airlines");
  form.avoidedAirlines = listOf("avoided-airlines");
  form.hotelPriceRange = rangeOf("hotel-price-min", "hotel-price-max");
  const rating = $<HTMLSelectElement>("rating-min").value;
  form.ratingMin = rating ? Number(rating) : null;
  form.preferredBrands = listOf("preferred-brands");
  form.avoidedBrands = listOf("avoided-brands");
  form.totalBudget = centsOf($<HTMLInputElement>("total-budget"));
  form.flightTotalBudget = centsOf($<HTMLInputElement>("flight-total-budget"));
  form.hotelTotalBudget = centsOf($<HTMLInputElement>("hotel-total-budget"));
  form.hotelDailyBudget = centsOf($<HTMLInputElement>("hotel-daily-budget"));
  return form;
}

export function writeForm(form: FormState): void {
  setSegmentCount(form.segments.length);
  segmentRows().forEach((row, i) => {
    row.querySelector<HTMLInputElement>(".seg-origin")!.value =
      form.segments[i].origin;
    row.querySelector<HTMLInputElement>(".seg-destination")!.value =
      form.segments[i].destination;
    row.querySelector<HTMLInputElement>(".seg-date")!.value =
      form.segments[i].date;
  });
  const [fLo, fHi] = form.flightPriceRange ?? [null, null];
  setCents($<HTMLInputElement>("flight-price-min"), fLo);
  setCents($<HTMLInputElement>("flight-price-max"), fHi);
  writeWindow("dep", form.departureWindows);
  writeWindow("arr", form.arrivalWindows);
  $<HTMLSelectElement>("cabin-class").value = form.cabinClass ?? "";
  setTristate("refundable", form.refundable);
  setTristate("non-stop", form.nonStop);
  setTristate("must-not-basic-economy", form.mustNotBasicEconomy);
  setTristate("avoid-red-eye", form.avoidRedEye);
  setTristate("no-mixed-cabin", form.noMixedCabin);
  setList("plane-type", form.planeType);
  setList("preferred-airlines", form.preferredAirlines);
  setList("avoided-airlines", form.avoidedAirlines);
  const [hLo, hHi] = form.hotelPriceRange ?? [null, null];
  setCents($<HTMLInputElement>("hotel-price-min"), hLo);
  setCents($<HTMLInputElement>("hotel-price-max"), hHi);
  $<HTMLSelectElement>("rating-min").value =
    form.ratingMin === null ? "" : String(form.ratingMin);
  setList("preferred-brands", form.preferredBrands);
  setList("avoided-brands", form.avoidedBrands);
  setCents($<HTMLInputElement>("total-budget"), form.totalBudget);
  setCents($<HTMLInputElement>("flight-total-budget"), form.flightTotalBudget);
  setCents($<HTMLInputElement>("hotel-total-budget"), form.hotelTotalBudget);
  setCents($<HTMLInputElement>("hotel-daily-budget"), form.hotelDailyBudget);
  refreshValidation();
}

// -- interactions -------------------------------------------------------------

function refreshValidation(): void {
  const issues = validateForm(readForm());
  $("issues").innerHTML = issues.length
    ? `<ul>${issues
        .map((i) => `<li><code>${i.field}</code> ${i.message}</li>`)
        .join("")}</ul>`
    : "";
  $<HTMLButtonElement>("solve").disabled = issues.length > 0;
}

function setStatus(text: string): void {
  $("status").textContent = text;
}

async function loadSample(): Promise<void> {
  const seed = Number($<HTMLInputElement>("seed").value || "7");
  setStatus("generating sample…");
  try {
    const sample = await api.generate(seed);
    heldInventory = sample.inventory;
    heldSegmentsKey = stableStringify(sample.request.segments);
    previousSnapshot = null;
    $("banner").innerHTML = "";
    writeForm(requestToForm(sample.request));
    setStatus(
      `sample seed ${seed}: ${sample.inventory.flights.length} flights, ` +
        `${sample.inventory.hotels.length} hotels held`,
    );
  } catch (err) {
    showError(err);
    setStatus("");
  }
}

function showError(err: unknown): void {
  if (err instanceof ApiError) {
    $("banner").innerHTML = renderErrorBanner(
      err.status,
      err.body.error,
      err.body.detail,
      err.body.field,
    );
  } else if ((err as Error)?.name !== "AbortError") {
    $("banner").innerHTML = renderErrorBanner(
      0,
      "request failed",
      String(err),
    );
  }
}

async function solve(): Promise<void> {
  const form = readForm();
  if (validateForm(form).length) return;
  const request = formToRequest(form);
  const sameTrip = heldSegmentsKey === stableStringify(request.segments);
  const inventory = sameTrip && heldInventory ? heldInventory : undefined;
  const mySolve = ++solveCounter;
  setStatus(inventory ? "solving against held inventory…"
                      : "solving (server-side inventory)…");
  try {
    const response = await api.solve(request, inventory);
    if (mySolve !== solveCounter) return; // superseded
    $("banner").innerHTML = "";
    $("results").innerHTML = renderOptions(response);
    const snapshot = snapshotTotals(
      response,
      `solve ${mySolve}${inventory ? "" : " (fresh inventory)"}`,
    );
    $("comparison").innerHTML = renderComparison(previousSnapshot, snapshot);
    previousSnapshot = snapshot;
    setStatus("done");
  } catch (err) {
    if (mySolve !== solveCounter) return;
    showError(err);
    setStatus("");
  }
}

function init(): void {
  setSegmentCount(1);
  $("add-segment").addEventListener("click", () => {
    const rows = segmentRows();
    setSegmentCount(rows.length + 1);
    const last = segmentRows().at(-1)!;
    const prev = rows.at(-1);
    if (prev) {
      last.querySelector<HTMLInputElement>(".seg-origin")!.value =
        prev.querySelector<HTMLInputElement>(".seg-destination")!.value;
    }
    refreshValidation();
  });
  $("remove-segment").addEventListener("click", () => {
    if (segmentRows().length > 1) setSegmentCount(segmentRows().length - 1);
    refreshValidation();
  });
  $("load-sample").addEventListener("click", () => void loadSample());
  $("solve").addEventListener("click", () => void solve());
  $("request-form").addEventListener("input", refreshValidation);
  refreshValidation();
  void api
    .health()
    .then((h) => setStatus(`service ok (v${h.version}) at ${apiBase}`))
    .catch(() => setStatus(`service unreachable at ${apiBase}`));
}

if (typeof document !== "undefined" && document.getElementById("segments")) {
  init();
}
