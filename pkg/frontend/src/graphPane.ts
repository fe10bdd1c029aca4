// Call graph pane: layered left-to-right SVG, granularity and collation
// controls, per-handler tabs, node context menu into the source pane.

import type { CallGraphDoc, CollationMode, GraphDoc, Granularity } from "./types";

export interface GraphCallbacks {
  onGranularity(granularity: Granularity): void;
  onMode(mode: CollationMode): void;
  onOpenSource(classId: string): void;
}

const FILL: Record<string, string> = {
  fully: "#2e7d32",
  partially: "#a5d6a7",
  uncovered: "#c62828",
};

const NODE_W = 170;
const NODE_H = 40;
const GAP_X = 70;
const GAP_Y = 14;

// Column per breadth-first depth from the start node.
function layoutColumns(graph: GraphDoc): Map<string, number> {
  const succ = new Map<string, string[]>();
  for (const edge of graph.edges) {
    const out = succ.get(edge.from) ?? [];
    out.push(edge.to);
    succ.set(edge.from, out);
  }
  const depth = new Map<string, number>();
  depth.set(graph.start, 0);
  let frontier = graph.startEdges.map((e) => e.to);
  let level = 1;
  while (frontier.length > 0) {
    const next: string[] = [];
    for (const node of frontier) {
      if (!depth.has(node)) {
        depth.set(node, level);
        next.push(...(succ.get(node) ?? []));
      }
    }
    frontier = next;
    level += 1;
  }
  for (const node of graph.nodes) {
    if (!depth.has(node.id)) depth.set(node.id, level);
  }
  return depth;
}

// The class to open for a node: methods map to their enclosing class,
// classes to themselves, packages to nothing.
export function sourceClassOf(nodeId: string, granularity: Granularity): string | null {
  if (granularity === "method") {
    const cut = nodeId.lastIndexOf(".");
    return cut > 0 ? nodeId.slice(0, cut) : null;
  }
  if (granularity === "class") {
    return nodeId;
  }
  return null;
}

function svgEl<K extends keyof SVGElementTagNameMap>(tag: K): SVGElementTagNameMap[K] {
  return document.createElementNS("http://www.w3.org/2000/svg", tag);
}

function renderGraphSvg(
  graph: GraphDoc,
  granularity: Granularity,
  callbacks: GraphCallbacks,
): SVGSVGElement {
  const depth = layoutColumns(graph);
  const columns = new Map<number, string[]>();
  columns.set(0, [graph.start]);
  for (const node of [...graph.nodes].sort((a, b) => a.id.localeCompare(b.id))) {
    const col = depth.get(node.id) ?? 1;
    const list = columns.get(col) ?? [];
    list.push(node.id);
    columns.set(col, list);
  }
  const pos = new Map<string, { x: number; y: number }>();
  let maxRows = 0;
  for (const [col, ids] of columns) {
    ids.forEach((id, row) => pos.set(id, { x: col * (NODE_W + GAP_X), y: row * (NODE_H + GAP_Y) }));
    maxRows = Math.max(maxRows, ids.length);
  }
  const width = (Math.max(...columns.keys()) + 1) * (NODE_W + GAP_X);
  const height = Math.max(1, maxRows) * (NODE_H + GAP_Y) + 20;

  const svg = svgEl("svg");
  svg.setAttribute("viewBox", `-10 -10 ${width + 20} ${height + 20}`);
  svg.setAttribute("class", "graph-svg");

  const defs = svgEl("defs");
  const marker = svgEl("marker");
  marker.setAttribute("id", "arrow");
  marker.setAttribute("viewBox", "0 0 8 8");
  marker.setAttribute("refX", "8");
  marker.setAttribute("refY", "4");
  marker.setAttribute("markerWidth", "7");
  marker.setAttribute("markerHeight", "7");
  marker.setAttribute("orient", "auto-start-reverse");
  const tip = svgEl("path");
  tip.setAttribute("d", "M 0 0 L 8 4 L 0 8 z");
  tip.setAttribute("fill", "#555");
  marker.appendChild(tip);
  defs.appendChild(marker);
  svg.appendChild(defs);

  const drawEdge = (from: string, to: string, count: number) => {
    const a = pos.get(from);
    const b = pos.get(to);
    if (!a || !b) return;
    const x1 = a.x + (from === graph.start ? NODE_H : NODE_W);
    const y1 = a.y + NODE_H / 2;
    const x2 = b.x;
    const y2 = b.y + NODE_H / 2;
    const line = svgEl("line");
    line.setAttribute("x1", String(x1));
    line.setAttribute("y1", String(y1));
    line.setAttribute("x2", String(x2));
    line.setAttribute("y2", String(y2));
    line.setAttribute("class", "graph-edge");
    line.setAttribute("marker-end", "url(#arrow)");
    svg.appendChild(line);
    if (count > 1) {
      const label = svgEl("text");
      label.setAttribute("x", String((x1 + x2) / 2));
      label.setAttribute("y", String((y1 + y2) / 2 - 4));
      label.setAttribute("class", "edge-label");
      label.textContent = String(count);
      svg.appendChild(label);
    }
  };
  for (const edge of graph.startEdges) drawEdge(graph.start, edge.to, edge.count);
  for (const edge of graph.edges) drawEdge(edge.from, edge.to, edge.count);

  // start node: visually distinct circle
  const startPos = pos.get(graph.start)!;
  const start = svgEl("circle");
  start.setAttribute("cx", String(startPos.x + NODE_H / 2));
  start.setAttribute("cy", String(startPos.y + NODE_H / 2));
  start.setAttribute("r", String(NODE_H / 2));
  start.setAttribute("class", "start-node");
  svg.appendChild(start);
  const startLabel = svgEl("text");
  startLabel.setAttribute("x", String(startPos.x + NODE_H / 2));
  startLabel.setAttribute("y", String(startPos.y + NODE_H / 2 + 4));
  startLabel.setAttribute("class", "start-label");
  startLabel.textContent = "start";
  svg.appendChild(startLabel);

  for (const node of graph.nodes) {
    const p = pos.get(node.id)!;
    const group = svgEl("g");
    group.setAttribute("class", "graph-node");
    group.dataset.nodeId = node.id;
    group.dataset.status = node.status;
    const rect = svgEl("rect");
    rect.setAttribute("x", String(p.x));
    rect.setAttribute("y", String(p.y));
    rect.setAttribute("width", String(NODE_W));
    rect.setAttribute("height", String(NODE_H));
    rect.setAttribute("rx", "4");
    rect.setAttribute("fill", FILL[node.status] ?? "#ccc");
    if (node.firstCoveredHere) {
      rect.setAttribute("stroke", "#1b5e20");
      rect.setAttribute("stroke-width", "3");
      rect.setAttribute("stroke-dasharray", "5 3");
    }
    group.appendChild(rect);
    const label = svgEl("text");
    label.setAttribute("x", String(p.x + NODE_W / 2));
    label.setAttribute("y", String(p.y + 16));
    label.setAttribute("class", `node-label ${node.status === "partially" ? "dark" : "light"}`);
    const short = node.id.split(".").slice(-2).join(".");
    label.textContent = short.length > 24 ? `${short.slice(0, 23)}…` : short;
    group.appendChild(label);
    const counts = svgEl("text");
    counts.setAttribute("x", String(p.x + NODE_W / 2));
    counts.setAttribute("y", String(p.y + 32));
    counts.setAttribute("class", `node-counts ${node.status === "partially" ? "dark" : "light"}`);
    counts.textContent = `${node.coveredLines}/${node.totalLines} lines`;
    group.appendChild(counts);
    group.addEventListener("contextmenu", (event) => {
      event.preventDefault();
      openContextMenu(group.ownerDocument.body, event as MouseEvent, node.id, granularity, callbacks);
    });
    svg.appendChild(group);
  }
  return svg;
}

function openContextMenu(
  body: HTMLElement,
  event: MouseEvent,
  nodeId: string,
  granularity: Granularity,
  callbacks: GraphCallbacks,
): void {
  body.querySelector(".context-menu")?.remove();
  const classId = sourceClassOf(nodeId, granularity);
  if (classId === null) return; // package nodes have no source target
  const menu = document.createElement("div");
  menu.className = "context-menu";
  menu.style.left = `${event.clientX}px`;
  menu.style.top = `${event.clientY}px`;
  const item = document.createElement("button");
  item.className = "context-item";
  item.textContent = `open source: ${classId}`;
  item.addEventListener("click", () => {
    menu.remove();
    callbacks.onOpenSource(classId);
  });
  menu.appendChild(item);
  body.appendChild(menu);
  body.addEventListener("click", () => menu.remove(), { once: true });
}

export function renderGraphPane(
  container: HTMLElement,
  doc: CallGraphDoc | null,
  activeTab: number,
  callbacks: GraphCallbacks,
): void {
  container.classList.add("graph-pane");
  container.replaceChildren();

  const controls = document.createElement("div");
  controls.className = "graph-controls";
  const granularity = document.createElement("select");
  granularity.className = "granularity-select";
  for (const g of ["method", "class", "package"] as Granularity[]) {
    const option = document.createElement("option");
    option.value = g;
    option.textContent = g;
    granularity.appendChild(option);
  }
  if (doc) granularity.value = doc.granularity;
  granularity.addEventListener("change", () =>
    callbacks.onGranularity(granularity.value as Granularity),
  );
  controls.appendChild(granularity);
  const mode = document.createElement("select");
  mode.className = "mode-select";
  for (const m of ["collated", "perHandler"] as CollationMode[]) {
    const option = document.createElement("option");
    option.value = m;
    option.textContent = m === "collated" ? "collated" : "per handler";
    mode.appendChild(option);
  }
  if (doc) mode.value = doc.mode;
  mode.addEventListener("change", () => callbacks.onMode(mode.value as CollationMode));
  controls.appendChild(mode);
  container.appendChild(controls);

  if (doc === null) {
    const empty = document.createElement("p");
    empty.className = "graph-empty";
    empty.textContent = "select an event to see its call graph";
    container.appendChild(empty);
    return;
  }
  if (doc.noHandlers) {
    const empty = document.createElement("p");
    empty.className = "graph-empty no-handlers";
    empty.textContent = `event ${doc.seq} has no handlers, so no call graph`;
    container.appendChild(empty);
    return;
  }

  if (doc.mode === "perHandler" && doc.graphs.length > 1) {
    const tabs = document.createElement("div");
    tabs.className = "tab-strip";
    doc.graphs.forEach((graph, index) => {
      const tab = document.createElement("button");
      tab.className = "tab" + (index === activeTab ? " active" : "");
      tab.textContent = graph.handlers[0] ?? `handler ${index}`;
      tab.addEventListener("click", () => {
        renderGraphPane(container, doc, index, callbacks);
      });
      tabs.appendChild(tab);
    });
    container.appendChild(tabs);
  }

  const graph = doc.graphs[Math.min(activeTab, doc.graphs.length - 1)];
  if (graph) {
    container.appendChild(renderGraphSvg(graph, doc.granularity, callbacks));
  }
}
