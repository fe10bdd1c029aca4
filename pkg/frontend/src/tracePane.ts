// Event trace pane: newest record on top, live counters, selection.

import type { TraceEntry, WidgetNode } from "./types";

export interface TraceCallbacks {
  onSelect(seq: number): void;
}

function findWidget(root: WidgetNode, id: string | null): WidgetNode | null {
  if (id === null) return null;
  if (root.id === id) return root;
  for (const child of root.children ?? []) {
    const hit = findWidget(child, id);
    if (hit) return hit;
  }
  return null;
}

function ecgText(covered: number, total: number): string {
  return total === 0 ? "n/a" : `${covered}/${total}`;
}

function barFill(parent: HTMLElement, cls: string, covered: number, total: number): void {
  const bar = document.createElement("div");
  bar.className = `bar ${cls}`;
  const fill = document.createElement("div");
  fill.className = "bar-fill";
  fill.style.width = total > 0 ? `${(100 * covered) / total}%` : "0%";
  bar.appendChild(fill);
  parent.appendChild(bar);
}

function renderEntry(entry: TraceEntry, selected: boolean, callbacks: TraceCallbacks): HTMLElement {
  const { record, metrics } = entry;
  const el = document.createElement("article");
  el.className = "trace-entry" + (selected ? " selected" : "");
  el.dataset.seq = String(record.seq);
  el.addEventListener("click", () => callbacks.onSelect(record.seq));

  const head = document.createElement("div");
  head.className = "entry-head";
  const kind = document.createElement("span");
  kind.className = `kind-badge kind-${record.event.kind}`;
  kind.textContent = record.event.kind;
  head.appendChild(kind);
  const title = document.createElement("span");
  title.className = "entry-title";
  title.textContent = record.event.widget
    ? `#${record.seq} ${record.event.widget} (payload ${record.event.payload})`
    : `#${record.seq}`;
  head.appendChild(title);
  if (record.handlers.length === 0 && record.event.kind !== "startup") {
    const badge = document.createElement("span");
    badge.className = "badge no-handlers";
    badge.textContent = "no handlers";
    head.appendChild(badge);
  }
  if (record.error) {
    const badge = document.createElement("span");
    badge.className = "badge error";
    badge.title = record.error;
    badge.textContent = "fault";
    head.appendChild(badge);
  }
  el.appendChild(head);

  // Snapshot stand-in: the originating widget, outlined like the live surface.
  const fired = findWidget(record.snapshot.root, record.snapshot.fired);
  const snap = document.createElement("div");
  snap.className = "entry-snapshot";
  snap.textContent = fired ? `▣ ${fired.label || fired.id} [${fired.kind}]` : "▣ application start";
  el.appendChild(snap);

  const counters = document.createElement("div");
  counters.className = "entry-counters";

  const app = document.createElement("div");
  app.className = "counter";
  app.innerHTML = `<label>app</label>`;
  const appCount = document.createElement("span");
  appCount.className = "app-count";
  appCount.textContent = `${metrics.appCovered}/${metrics.appTotal}`;
  app.appendChild(appCount);
  barFill(app, "bar-app", metrics.appCovered, metrics.appTotal);
  counters.appendChild(app);

  const ecg = document.createElement("div");
  ecg.className = "counter";
  ecg.innerHTML = `<label>event cg</label>`;
  const ecgCount = document.createElement("span");
  ecgCount.className = "ecg-count";
  ecgCount.dataset.ecgTotal = String(metrics.ecgTotal);
  ecgCount.textContent = ecgText(metrics.ecgCovered, metrics.ecgTotal);
  ecg.appendChild(ecgCount);
  barFill(ecg, "bar-ecg", metrics.ecgCovered, metrics.ecgTotal);
  counters.appendChild(ecg);

  const delta = document.createElement("span");
  delta.className = "delta-badge" + (record.coverageDelta.length ? " fresh" : "");
  delta.textContent = `+${record.coverageDelta.length} first-run`;
  counters.appendChild(delta);

  el.appendChild(counters);
  return el;
}

export function renderTracePane(
  container: HTMLElement,
  entries: TraceEntry[],
  selectedSeq: number | null,
  callbacks: TraceCallbacks,
): void {
  container.classList.add("trace-list");
  container.replaceChildren();
  const newestFirst = [...entries].sort((a, b) => b.record.seq - a.record.seq);
  for (const entry of newestFirst) {
    container.appendChild(renderEntry(entry, entry.record.seq === selectedSeq, callbacks));
  }
}

// In-place counter update for a retroactive improvement notice; the entry
// element is not rebuilt. Returns false when the seq is not in the pane.
export function applyRetro(container: HTMLElement, seq: number, ecgCovered: number): boolean {
  const count = container.querySelector<HTMLElement>(
    `.trace-entry[data-seq="${seq}"] .ecg-count`,
  );
  if (!count) return false;
  const total = Number(count.dataset.ecgTotal ?? "0");
  count.textContent = ecgText(ecgCovered, total);
  const fill = container.querySelector<HTMLElement>(
    `.trace-entry[data-seq="${seq}"] .bar-ecg .bar-fill`,
  );
  if (fill && total > 0) {
    fill.style.width = `${(100 * ecgCovered) / total}%`;
  }
  return true;
}
