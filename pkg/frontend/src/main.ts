// Page bootstrap: fetch the bundle, build the control strip, keep the
// shareable state in the URL fragment.

import { countryList, loadBundle } from "./bundle.js";
import { createViewer } from "./render.js";
import type { GraphBundle, Layer, ViewState } from "./types.js";
import { decodeState, encodeState } from "./view.js";

function option(value: string, label: string): HTMLOptionElement {
  const el = document.createElement("option");
  el.value = value;
  el.textContent = label;
  return el;
}

function buildControls(
  bar: HTMLElement,
  bundle: GraphBundle,
  state: ViewState,
  apply: (patch: Partial<ViewState>) => void,
): (state: ViewState) => void {
  const modeButton = document.createElement("button");
  const updateModeButton = (s: ViewState) => {
    modeButton.textContent = s.mode === "move" ? "mode: move & zoom" : "mode: query";
  };
  modeButton.addEventListener("click", () => {
    apply({ mode: state.mode === "move" ? "query" : "move", hovered: null });
  });

  const filterSelect = document.createElement("select");
  filterSelect.appendChild(option("ALL", "all ISCO groups"));
  const digits = [...new Set(bundle.nodes.map((n) => n.isco1))].sort();
  for (const digit of digits) filterSelect.appendChild(option(digit, `ISCO ${digit}xxx`));
  filterSelect.addEventListener("change", () => apply({ filterIsco1: filterSelect.value }));

  const countrySelect = document.createElement("select");
  for (const country of countryList(bundle)) countrySelect.appendChild(option(country, country));
  countrySelect.addEventListener("change", () => apply({ country: countrySelect.value }));

  const layerSelect = document.createElement("select");
  for (const layer of ["none", "megatrend", "supply", "demand"]) {
    layerSelect.appendChild(option(layer, `layer: ${layer}`));
  }
  layerSelect.addEventListener("change", () => apply({ layer: layerSelect.value as Layer }));

  const imbalanceLabel = document.createElement("label");
  const imbalanceBox = document.createElement("input");
  imbalanceBox.type = "checkbox";
  imbalanceBox.addEventListener("change", () => apply({ imbalance: imbalanceBox.checked }));
  imbalanceLabel.appendChild(imbalanceBox);
  imbalanceLabel.appendChild(document.createTextNode(" show imbalance"));

  for (const el of [modeButton, filterSelect, countrySelect, layerSelect, imbalanceLabel]) {
    bar.appendChild(el);
  }

  return (s: ViewState) => {
    state = s;
    updateModeButton(s);
    filterSelect.value = s.filterIsco1;
    countrySelect.value = s.country;
    layerSelect.value = s.layer;
    imbalanceBox.checked = s.imbalance;
  };
}

export async function boot(root: HTMLElement): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const url = params.get("bundle") ?? "graph.json";
  const bundle = await loadBundle(url);

  const bar = document.createElement("div");
  bar.className = "skillgraph-controls";
  const stage = document.createElement("div");
  stage.className = "skillgraph-stage";
  root.appendChild(bar);
  root.appendChild(stage);

  const initial = decodeState(window.location.hash);
  const viewer = createViewer(stage, bundle, initial);
  const sync = buildControls(bar, bundle, viewer.getState(), (patch) =>
    viewer.setState(patch),
  );
  sync(viewer.getState());
  viewer.onStateChange = (s) => {
    sync(s);
    const fragment = encodeState(s);
    history.replaceState(null, "", fragment ? `#${fragment}` : "#");
  };
}

declare global {
  interface Window {
    skillgraphBoot?: typeof boot;
  }
}

if (typeof window !== "undefined") {
  window.skillgraphBoot = boot;
  const root = document.getElementById("app");
  if (root) {
    boot(root).catch((err) => {
      root.textContent = `failed to start viewer: ${err}`;
    });
  }
}
