// Node colouring: split-half saturation in count modes, red/white in layers.
//
// Saturation is log-scaled because counts span several orders of magnitude;
// any monotone curve keeps the contract (argmax maps to 1, zero to 0).

import type { CountPair } from "./bundle.js";
import type { BundleNode, ViewState } from "./types.js";

export interface ScaleMaxima {
  vacMax: number;
  seekMax: number;
}

export type NodeColour =
  | { kind: "split"; left: number; right: number }
  | { kind: "layer"; flag: boolean };

export function saturation(count: number, scaleMax: number): number {
  if (scaleMax <= 0) return 0;
  const s = Math.log1p(count) / Math.log1p(scaleMax);
  return Math.min(1, s);
}

export function colourNode(
  node: BundleNode,
  state: ViewState,
  counts: CountPair,
  scales: ScaleMaxima,
  megatrendThreshold: number,
): NodeColour {
  if (state.layer === "megatrend") {
    return {
      kind: "layer",
      flag: node.prob_max !== null && node.prob_max >= megatrendThreshold,
    };
  }
  if (state.layer === "supply") {
    return { kind: "layer", flag: counts.seekers >= 1 };
  }
  if (state.layer === "demand") {
    return { kind: "layer", flag: counts.vacancies >= 1 };
  }
  if (state.imbalance) {
    const joint = Math.max(scales.vacMax, scales.seekMax);
    return {
      kind: "split",
      left: saturation(counts.vacancies, joint),
      right: saturation(counts.seekers, joint),
    };
  }
  return {
    kind: "split",
    left: saturation(counts.vacancies, scales.vacMax),
    right: saturation(counts.seekers, scales.seekMax),
  };
}

const LAYER_RED = "#d62518";

export function fillFor(s: number): string {
  const level = Math.round(255 * (1 - s));
  return `rgb(255,${level},${level})`;
}

export function layerFill(flag: boolean): string {
  return flag ? LAYER_RED : "#ffffff";
}
