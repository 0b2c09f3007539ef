// SVG renderer: precomputed coordinates in, interactive node-link view out.
// Pan/zoom is a pure view transform on one <g>; data and colours never
// change with it. All derived state is recomputed synchronously on setState.

import { buildCountsIndex, countsFor, neighboursIndex } from "./bundle.js";
import { colourNode, fillFor, layerFill, saturation } from "./color.js";
import { applyFilter, hoverQuery, scaleMaxima } from "./view.js";
import type { GraphBundle, ViewState } from "./types.js";
import { DEFAULT_STATE } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_RADIUS = 0.16; // world units; layout edge length is ~1
const FADED = "0.15";

export interface Transform {
  tx: number;
  ty: number;
  scale: number;
}

export interface Viewer {
  svg: SVGSVGElement;
  tooltip: HTMLDivElement;
  notice: HTMLDivElement;
  getState(): ViewState;
  setState(patch: Partial<ViewState>): void;
  getTransform(): Transform;
  onStateChange?: (state: ViewState) => void;
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
): SVGElementTagNameMap[K] {
  return document.createElementNS(SVG_NS, tag);
}

function halfDiscPath(x: number, y: number, r: number, side: "left" | "right"): string {
  const sweep = side === "right" ? 1 : 0;
  return `M ${x} ${y - r} A ${r} ${r} 0 0 ${sweep} ${x} ${y + r} Z`;
}

export function createViewer(
  container: HTMLElement,
  bundle: GraphBundle,
  initial: Partial<ViewState> = {},
): Viewer {
  const counts = buildCountsIndex(bundle);
  const neighbours = neighboursIndex(bundle);
  let state: ViewState = { ...DEFAULT_STATE, ...initial };

  const xs = bundle.nodes.map((n) => n.x);
  const ys = bundle.nodes.map((n) => n.y);
  const minX = Math.min(...xs, 0);
  const maxX = Math.max(...xs, 0);
  const minY = Math.min(...ys, 0);
  const maxY = Math.max(...ys, 0);
  const size = 800;
  const extent = Math.max(maxX - minX, maxY - minY, 1e-6);
  const fit = (0.9 * size) / extent;
  const transform: Transform = {
    scale: fit,
    tx: size / 2 - fit * (minX + maxX) / 2,
    ty: size / 2 - fit * (minY + maxY) / 2,
  };

  const svg = svgEl("svg");
  svg.setAttribute("viewBox", `0 0 ${size} ${size}`);
  svg.setAttribute("class", "skillgraph-canvas");
  const world = svgEl("g");
  world.setAttribute("class", "world");
  svg.appendChild(world);

  const edgeLayer = svgEl("g");
  const nodeLayer = svgEl("g");
  world.appendChild(edgeLayer);
  world.appendChild(nodeLayer);

  const edgeEls: SVGLineElement[] = bundle.links.map((link) => {
    const a = bundle.nodes[link.source];
    const b = bundle.nodes[link.target];
    const line = svgEl("line");
    line.setAttribute("x1", String(a.x));
    line.setAttribute("y1", String(a.y));
    line.setAttribute("x2", String(b.x));
    line.setAttribute("y2", String(b.y));
    line.setAttribute("stroke", "#555555");
    line.setAttribute("stroke-opacity", String(link.ratio));
    line.setAttribute("stroke-width", String(0.03));
    edgeLayer.appendChild(line);
    return line;
  });

  interface NodeEls {
    group: SVGGElement;
    left: SVGPathElement;
    right: SVGPathElement;
  }
  const nodeEls: NodeEls[] = bundle.nodes.map((node) => {
    const group = svgEl("g");
    group.setAttribute("class", "node");
    group.setAttribute("data-idx", String(node.idx));
    const left = svgEl("path");
    left.setAttribute("d", halfDiscPath(node.x, node.y, NODE_RADIUS, "left"));
    const right = svgEl("path");
    right.setAttribute("d", halfDiscPath(node.x, node.y, NODE_RADIUS, "right"));
    for (const half of [left, right]) {
      half.setAttribute("stroke", "#333333");
      half.setAttribute("stroke-width", String(0.015));
      group.appendChild(half);
    }
    group.addEventListener("mouseenter", () => {
      if (state.mode === "query") setState({ hovered: node.idx });
    });
    group.addEventListener("mouseleave", () => {
      if (state.mode === "query") setState({ hovered: null });
    });
    nodeLayer.appendChild(group);
    return { group, left, right };
  });

  const tooltip = document.createElement("div");
  tooltip.setAttribute("class", "skillgraph-tooltip");
  tooltip.style.display = "none";
  tooltip.style.position = "absolute";

  const notice = document.createElement("div");
  notice.setAttribute("class", "skillgraph-notice");
  notice.textContent = "no nodes match the current filter";
  notice.style.display = "none";

  container.appendChild(svg);
  container.appendChild(tooltip);
  container.appendChild(notice);

  function applyTransform(): void {
    world.setAttribute(
      "transform",
      `translate(${transform.tx} ${transform.ty}) scale(${transform.scale})`,
    );
  }

  function render(): void {
    const visible = applyFilter(bundle, state);
    const scales = scaleMaxima(counts, visible, state.country);
    const hovered = state.mode === "query" ? state.hovered : null;
    const highlight =
      hovered !== null && visible.has(hovered)
        ? hoverQuery(bundle, counts, neighbours, hovered, state).highlight
        : null;

    for (const node of bundle.nodes) {
      const els = nodeEls[node.idx];
      if (!visible.has(node.idx)) {
        els.group.setAttribute("display", "none");
        continue;
      }
      els.group.removeAttribute("display");
      const pair = countsFor(counts, node.idx, state.country);
      const colour = colourNode(
        node, state, pair, scales, bundle.meta.megatrend_threshold,
      );
      if (colour.kind === "layer") {
        const fill = layerFill(colour.flag);
        els.left.setAttribute("fill", fill);
        els.right.setAttribute("fill", fill);
      } else {
        els.left.setAttribute("fill", fillFor(colour.left));
        els.right.setAttribute("fill", fillFor(colour.right));
      }
      els.group.setAttribute(
        "opacity", highlight === null || highlight.has(node.idx) ? "1" : FADED,
      );
    }

    for (let i = 0; i < bundle.links.length; i++) {
      const link = bundle.links[i];
      const shown = visible.has(link.source) && visible.has(link.target);
      if (!shown) {
        edgeEls[i].setAttribute("display", "none");
        continue;
      }
      edgeEls[i].removeAttribute("display");
      const lit =
        highlight === null ||
        (highlight.has(link.source) && highlight.has(link.target));
      edgeEls[i].setAttribute("opacity", lit ? "1" : FADED);
    }

    notice.style.display = visible.size === 0 ? "block" : "none";

    if (hovered !== null && visible.has(hovered)) {
      const info = hoverQuery(bundle, counts, neighbours, hovered, state);
      tooltip.style.display = "block";
      tooltip.innerHTML = "";
      const title = document.createElement("strong");
      title.textContent = info.label;
      const detail = document.createElement("div");
      const probs =
        info.probMax === null
          ? "automation: n/a"
          : `automation: max ${info.probMax.toFixed(3)}, avg ${info.probAvg!.toFixed(3)}`;
      detail.textContent =
        `ISCO ${info.isco4} | ${probs} | ` +
        `demand ${info.vacancies} / supply ${info.seekers} (${info.country})`;
      tooltip.appendChild(title);
      tooltip.appendChild(detail);
      const node = bundle.nodes[hovered];
      tooltip.style.left = `${transform.tx + transform.scale * node.x + 12}px`;
      tooltip.style.top = `${transform.ty + transform.scale * node.y + 12}px`;
    } else {
      tooltip.style.display = "none";
    }
    applyTransform();
  }

  function setState(patch: Partial<ViewState>): void {
    state = { ...state, ...patch };
    render();
    viewer.onStateChange?.(state);
  }

  // Secondary click toggles Move/Query (browsers hijack it for the context
  // menu, so the page also offers an explicit button through setState).
  svg.addEventListener("contextmenu", (event) => {
    event.preventDefault();
    setState({ mode: state.mode === "move" ? "query" : "move", hovered: null });
  });

  let dragging = false;
  let lastX = 0;
  let lastY = 0;
  svg.addEventListener("pointerdown", (event) => {
    if (state.mode !== "move") return;
    dragging = true;
    lastX = event.clientX;
    lastY = event.clientY;
  });
  svg.addEventListener("pointermove", (event) => {
    if (!dragging || state.mode !== "move") return;
    transform.tx += event.clientX - lastX;
    transform.ty += event.clientY - lastY;
    lastX = event.clientX;
    lastY = event.clientY;
    applyTransform();
  });
  svg.addEventListener("pointerup", () => {
    dragging = false;
  });
  svg.addEventListener("wheel", (event) => {
    if (state.mode !== "move") return;
    event.preventDefault();
    const factor = event.deltaY < 0 ? 1.2 : 1 / 1.2;
    const rect = svg.getBoundingClientRect();
    const px = event.clientX - rect.left;
    const py = event.clientY - rect.top;
    transform.tx = px - factor * (px - transform.tx);
    transform.ty = py - factor * (py - transform.ty);
    transform.scale *= factor;
    applyTransform();
  });

  const viewer: Viewer = {
    svg,
    tooltip,
    notice,
    getState: () => state,
    setState,
    getTransform: () => ({ ...transform }),
  };
  render();
  return viewer;
}

export { saturation };
