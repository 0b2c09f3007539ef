// Derived view state: visibility, scale maxima, hover sets, URL fragment.

import type { CountsIndex } from "./bundle.js";
import { countsFor } from "./bundle.js";
import type { ScaleMaxima } from "./color.js";
import type { GraphBundle, Layer, Mode, ViewState } from "./types.js";
import { DEFAULT_STATE, TOTAL } from "./types.js";

export function applyFilter(bundle: GraphBundle, state: ViewState): Set<number> {
  if (state.filterIsco1 === "ALL") {
    return new Set(bundle.nodes.map((n) => n.idx));
  }
  return new Set(
    bundle.nodes.filter((n) => n.isco1 === state.filterIsco1).map((n) => n.idx),
  );
}

/** Per-side maxima over the visible nodes for the active country scope. */
export function scaleMaxima(
  counts: CountsIndex,
  visible: Set<number>,
  country: string,
): ScaleMaxima {
  let vacMax = 0;
  let seekMax = 0;
  for (const idx of visible) {
    const pair = countsFor(counts, idx, country);
    if (pair.vacancies > vacMax) vacMax = pair.vacancies;
    if (pair.seekers > seekMax) seekMax = pair.seekers;
  }
  return { vacMax, seekMax };
}

export interface HoverInfo {
  idx: number;
  label: string;
  isco4: string;
  probMax: number | null;
  probAvg: number | null;
  vacancies: number;
  seekers: number;
  country: string;
  highlight: Set<number>;
}

export function hoverQuery(
  bundle: GraphBundle,
  counts: CountsIndex,
  neighbours: Map<number, Set<number>>,
  idx: number,
  state: ViewState,
): HoverInfo {
  const node = bundle.nodes[idx];
  const pair = countsFor(counts, idx, state.country);
  return {
    idx,
    label: node.label,
    isco4: node.isco4,
    probMax: node.prob_max,
    probAvg: node.prob_avg,
    vacancies: pair.vacancies,
    seekers: pair.seekers,
    country: state.country,
    highlight: new Set([idx, ...(neighbours.get(idx) ?? [])]),
  };
}

// --- shareable state in the URL fragment ---

const LAYERS: Layer[] = ["none", "megatrend", "supply", "demand"];

export function encodeState(state: ViewState): string {
  const parts: string[] = [];
  if (state.mode !== DEFAULT_STATE.mode) parts.push(`mode=${state.mode}`);
  if (state.filterIsco1 !== "ALL") parts.push(`filter=${state.filterIsco1}`);
  if (state.country !== TOTAL) parts.push(`country=${state.country}`);
  if (state.layer !== "none") parts.push(`layer=${state.layer}`);
  if (state.imbalance) parts.push("imbalance=1");
  return parts.join("&");
}

export function decodeState(fragment: string): ViewState {
  const state: ViewState = { ...DEFAULT_STATE };
  for (const part of fragment.replace(/^#/, "").split("&")) {
    const [key, value] = part.split("=");
    if (!value) continue;
    if (key === "mode" && (value === "move" || value === "query")) {
      state.mode = value as Mode;
    } else if (key === "filter" && /^[0-9]$/.test(value)) {
      state.filterIsco1 = value;
    } else if (key === "country" && /^([A-Z]{2}|TOTAL)$/.test(value)) {
      state.country = value;
    } else if (key === "layer" && LAYERS.includes(value as Layer)) {
      state.layer = value as Layer;
    } else if (key === "imbalance") {
      state.imbalance = value === "1";
    }
  }
  return state;
}
