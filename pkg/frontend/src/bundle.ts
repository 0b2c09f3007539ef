// Bundle loading and the lookup tables derived from it once per session.

import type { BundleNode, GraphBundle } from "./types.js";
import { TOTAL } from "./types.js";

export interface CountPair {
  vacancies: number;
  seekers: number;
}

/** Per-node country counts pivoted from the long-form count rows. */
export type CountsIndex = Map<number, Map<string, CountPair>>;

export function buildCountsIndex(bundle: GraphBundle): CountsIndex {
  const index: CountsIndex = new Map();
  for (const node of bundle.nodes) {
    const per = new Map<string, CountPair>();
    per.set(TOTAL, { vacancies: node.vac_total, seekers: node.cv_total });
    index.set(node.idx, per);
  }
  for (const row of bundle.counts) {
    index.get(row.idx)!.set(row.country, {
      vacancies: row.vacancies,
      seekers: row.seekers,
    });
  }
  return index;
}

/** Counts for one node under a country scope; missing cells read as zero. */
export function countsFor(
  index: CountsIndex,
  idx: number,
  country: string,
): CountPair {
  return index.get(idx)?.get(country) ?? { vacancies: 0, seekers: 0 };
}

export function neighboursIndex(bundle: GraphBundle): Map<number, Set<number>> {
  const adj = new Map<number, Set<number>>();
  for (const node of bundle.nodes) adj.set(node.idx, new Set());
  for (const link of bundle.links) {
    adj.get(link.source)!.add(link.target);
    adj.get(link.target)!.add(link.source);
  }
  return adj;
}

export function countryList(bundle: GraphBundle): string[] {
  const seen = new Set<string>();
  for (const row of bundle.counts) seen.add(row.country);
  return [TOTAL, ...[...seen].sort()];
}

export function validateBundle(doc: unknown): GraphBundle {
  const bundle = doc as GraphBundle;
  if (!bundle || typeof bundle !== "object" || !bundle.meta) {
    throw new Error("not a bundle document");
  }
  if (bundle.meta.schema_version !== 1) {
    throw new Error(`unsupported schema_version ${bundle.meta.schema_version}`);
  }
  const n = bundle.nodes.length;
  bundle.nodes.forEach((node: BundleNode, i: number) => {
    if (node.idx !== i) throw new Error(`node idx ${node.idx} at position ${i}`);
  });
  for (const link of bundle.links) {
    if (link.source < 0 || link.source >= n || link.target < 0 || link.target >= n) {
      throw new Error(`link ${link.source}->${link.target} out of range`);
    }
  }
  for (const row of bundle.counts) {
    if (row.idx < 0 || row.idx >= n) throw new Error(`count row idx ${row.idx}`);
    if (row.vacancies < 0 || row.seekers < 0) throw new Error("negative count");
  }
  return bundle;
}

export async function loadBundle(url: string): Promise<GraphBundle> {
  const response = await fetch(url);
  if (!response.ok) {
    throw new Error(`failed to load ${url}: ${response.status} ${response.statusText}`);
  }
  return validateBundle(await response.json());
}
