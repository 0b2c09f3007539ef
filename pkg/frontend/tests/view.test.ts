import { describe, expect, it } from "vitest";

import goldenJson from "./fixtures/graph.json";
import {
  buildCountsIndex,
  countsFor,
  countryList,
  neighboursIndex,
  validateBundle,
} from "../src/bundle.js";
import type { GraphBundle } from "../src/types.js";
import { DEFAULT_STATE, TOTAL } from "../src/types.js";
import { applyFilter, decodeState, encodeState, hoverQuery, scaleMaxima } from "../src/view.js";

const bundle = validateBundle(goldenJson) as GraphBundle;
const counts = buildCountsIndex(bundle);
const neighbours = neighboursIndex(bundle);

describe("bundle index", () => {
  it("pivots long-form counts onto nodes", () => {
    // idx 0 is the bus driver: AT 8/2, BE 2/0, DE 0/1 in the golden bundle
    expect(countsFor(counts, 0, "AT")).toEqual({ vacancies: 8, seekers: 2 });
    expect(countsFor(counts, 0, "DE")).toEqual({ vacancies: 0, seekers: 1 });
    expect(countsFor(counts, 0, TOTAL)).toEqual({ vacancies: 10, seekers: 2 });
  });

  it("reads missing cells as zero", () => {
    expect(countsFor(counts, 5, "AT")).toEqual({ vacancies: 0, seekers: 0 });
  });

  it("lists countries with TOTAL first", () => {
    expect(countryList(bundle)).toEqual([TOTAL, "AT", "BE", "DE"]);
  });

  it("rejects foreign schema versions", () => {
    const doc = JSON.parse(JSON.stringify(goldenJson));
    doc.meta.schema_version = 2;
    expect(() => validateBundle(doc)).toThrow(/schema_version/);
  });
});

describe("applyFilter", () => {
  it("keeps every node on ALL", () => {
    expect(applyFilter(bundle, DEFAULT_STATE).size).toBe(bundle.nodes.length);
  });

  it("filter 8 keeps exactly the isco1=8 nodes", () => {
    const visible = applyFilter(bundle, { ...DEFAULT_STATE, filterIsco1: "8" });
    const expected = bundle.nodes.filter((n) => n.isco1 === "8").map((n) => n.idx);
    expect([...visible].sort()).toEqual(expected.sort());
    expect(visible.size).toBe(7);
  });

  it("a digit with no members yields the empty set", () => {
    expect(applyFilter(bundle, { ...DEFAULT_STATE, filterIsco1: "9" }).size).toBe(0);
  });
});

describe("scaleMaxima", () => {
  it("covers all nodes when unfiltered", () => {
    const visible = applyFilter(bundle, DEFAULT_STATE);
    const scales = scaleMaxima(counts, visible, TOTAL);
    expect(scales.vacMax).toBe(Math.max(...bundle.nodes.map((n) => n.vac_total)));
    expect(scales.seekMax).toBe(Math.max(...bundle.nodes.map((n) => n.cv_total)));
  });

  it("is recomputed over the filtered survivors only", () => {
    const visible = applyFilter(bundle, { ...DEFAULT_STATE, filterIsco1: "2" });
    const scales = scaleMaxima(counts, visible, TOTAL);
    const survivors = bundle.nodes.filter((n) => n.isco1 === "2");
    expect(scales.vacMax).toBe(Math.max(...survivors.map((n) => n.vac_total)));
    expect(scales.seekMax).toBe(Math.max(...survivors.map((n) => n.cv_total)));
  });

  it("follows the country scope", () => {
    const visible = applyFilter(bundle, DEFAULT_STATE);
    const scales = scaleMaxima(counts, visible, "BE");
    const expectedVac = Math.max(
      ...bundle.nodes.map((n) => countsFor(counts, n.idx, "BE").vacancies),
    );
    expect(scales.vacMax).toBe(expectedVac);
  });
});

describe("hoverQuery", () => {
  it("returns tooltip numbers equal to the bundle counts", () => {
    for (const row of bundle.counts) {
      const info = hoverQuery(bundle, counts, neighbours, row.idx, {
        ...DEFAULT_STATE,
        mode: "query",
        country: row.country,
      });
      expect(info.vacancies).toBe(row.vacancies);
      expect(info.seekers).toBe(row.seekers);
    }
  });

  it("TOTAL scope passes the node totals through", () => {
    const node = bundle.nodes[2];
    const info = hoverQuery(bundle, counts, neighbours, 2, {
      ...DEFAULT_STATE,
      mode: "query",
    });
    expect(info.vacancies).toBe(node.vac_total);
    expect(info.seekers).toBe(node.cv_total);
  });

  it("highlights the node and its graph neighbours", () => {
    const linked = new Set<number>([0]);
    for (const link of bundle.links) {
      if (link.source === 0) linked.add(link.target);
      if (link.target === 0) linked.add(link.source);
    }
    const info = hoverQuery(bundle, counts, neighbours, 0, {
      ...DEFAULT_STATE,
      mode: "query",
    });
    expect(info.highlight).toEqual(linked);
  });

  it("an isolated node highlights only itself", () => {
    // idx 5 is the zero-skill street performer
    const info = hoverQuery(bundle, counts, neighbours, 5, {
      ...DEFAULT_STATE,
      mode: "query",
    });
    expect(info.highlight).toEqual(new Set([5]));
  });
});

describe("URL fragment codec", () => {
  it("round-trips every field", () => {
    const state = {
      mode: "query" as const,
      filterIsco1: "8",
      country: "AT",
      layer: "megatrend" as const,
      imbalance: true,
      hovered: null,
    };
    expect(decodeState(encodeState(state))).toEqual(state);
  });

  it("defaults are omitted from the fragment", () => {
    expect(encodeState(DEFAULT_STATE)).toBe("");
    expect(decodeState("")).toEqual(DEFAULT_STATE);
  });

  it("ignores garbage", () => {
    expect(decodeState("#filter=xx&country=lol&layer=nope&bogus")).toEqual(DEFAULT_STATE);
  });
});
