import { beforeEach, describe, expect, it, vi } from "vitest";

import goldenJson from "./fixtures/graph.json";
import { boot } from "../src/main.js";

function stubFetch(): void {
  vi.stubGlobal("fetch", async () => ({
    ok: true,
    status: 200,
    statusText: "OK",
    json: async () => JSON.parse(JSON.stringify(goldenJson)),
  }));
}

describe("boot", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
    window.location.hash = "";
    stubFetch();
  });

  it("builds the control strip and the canvas", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    await boot(root);
    expect(root.querySelectorAll("select").length).toBe(3);
    expect(root.querySelectorAll("button").length).toBe(1);
    expect(root.querySelectorAll("input[type=checkbox]").length).toBe(1);
    expect(root.querySelectorAll("svg g.node").length).toBe(10);
  });

  it("control changes land in the URL fragment", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    await boot(root);
    const filter = root.querySelectorAll("select")[0] as HTMLSelectElement;
    filter.value = "8";
    filter.dispatchEvent(new Event("change"));
    expect(window.location.hash).toBe("#filter=8");
  });

  it("restores state from the fragment on load", async () => {
    window.location.hash = "#mode=query&filter=2&imbalance=1";
    const root = document.createElement("div");
    document.body.appendChild(root);
    await boot(root);
    const button = root.querySelector("button")!;
    expect(button.textContent).toContain("query");
    const checkbox = root.querySelector("input[type=checkbox]") as HTMLInputElement;
    expect(checkbox.checked).toBe(true);
    const hidden = root.querySelectorAll('g.node[display="none"]').length;
    expect(hidden).toBe(8); // only the two isco1=2 nodes stay visible
  });
});
