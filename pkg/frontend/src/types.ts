// Shapes of graph.json, the viewer's sole input.

export interface BundleMeta {
  schema_version: number;
  built_at: string;
  k: number;
  seed: number;
  megatrend_threshold: number;
  vacancy_fanout: boolean;
  counts: { n_nodes: number; n_links: number; n_count_rows: number };
}

export interface BundleNode {
  idx: number;
  esco_id: string;
  label: string;
  isco4: string;
  isco1: string;
  prob_max: number | null;
  prob_avg: number | null;
  x: number;
  y: number;
  vac_total: number;
  cv_total: number;
}

export interface BundleLink {
  source: number;
  target: number;
  ratio: number;
}

export interface BundleCountRow {
  idx: number;
  country: string;
  vacancies: number;
  seekers: number;
}

export interface GraphBundle {
  meta: BundleMeta;
  nodes: BundleNode[];
  links: BundleLink[];
  counts: BundleCountRow[];
}

export const TOTAL = "TOTAL";

export type Mode = "move" | "query";
export type Layer = "none" | "megatrend" | "supply" | "demand";

export interface ViewState {
  mode: Mode;
  filterIsco1: string; // "ALL" or a single digit
  country: string; // TOTAL or a 2-letter code
  layer: Layer;
  imbalance: boolean;
  hovered: number | null;
}

export const DEFAULT_STATE: ViewState = {
  mode: "move",
  filterIsco1: "ALL",
  country: TOTAL,
  layer: "none",
  imbalance: false,
  hovered: null,
};
