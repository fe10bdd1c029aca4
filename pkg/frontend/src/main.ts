// Wires the four panes to the session service: render on every server
// message, fetch on every selection change. All displayed counts are
// server-provided; this file only routes documents to render functions.

import { ApiClient } from "./api";
import { initialState, visibleEntries, type ViewState } from "./state";
import { applyRetro, renderTracePane } from "./tracePane";
import { renderGraphPane } from "./graphPane";
import { renderSourcePane } from "./sourcePane";
import { flashWidget, renderWidgetSurface } from "./widgetSurface";
import type { ProgramDoc, PushMessage, TraceEntry } from "./types";

const api = new ApiClient();
const state: ViewState = initialState();
const entries: TraceEntry[] = [];
let program: ProgramDoc | null = null;

const $ = (id: string) => document.getElementById(id) as HTMLElement;

function appClassIds(doc: ProgramDoc): string[] {
  return doc.units
    .filter((u) => !u.library)
    .flatMap((u) => u.classes.map((c) => c.id));
}

function payload(): number {
  const input = document.getElementById("payload-input") as HTMLInputElement | null;
  return input ? Number(input.value) || 0 : 0;
}

function renderHeader(): void {
  const status = $("status-badge");
  status.textContent = state.connected ? "live" : "disconnected";
  status.className = state.connected ? "ok" : "bad";
  const last = entries[entries.length - 1];
  if (last) {
    $("app-coverage").textContent =
      `${last.metrics.appCovered}/${last.metrics.appTotal} app lines covered`;
  }
}

function renderTrace(): void {
  renderTracePane($("trace-pane"), visibleEntries(entries, state.filters), state.selectedSeq, {
    onSelect: select,
  });
}

async function refreshGraph(): Promise<void> {
  if (state.selectedSeq === null) {
    renderGraphPane($("graph-pane"), null, 0, graphCallbacks);
    return;
  }
  const doc = await api.getCallGraph(state.selectedSeq, state.granularity, state.collationMode);
  renderGraphPane($("graph-pane"), doc, 0, graphCallbacks);
}

async function refreshSource(): Promise<void> {
  if (!program) return;
  const classIds = appClassIds(program);
  if (state.openSourceClass === null || state.selectedSeq === null) {
    renderSourcePane($("source-pane"), null, classIds, sourceCallbacks);
    return;
  }
  const doc = await api.getSource(state.openSourceClass, state.selectedSeq);
  renderSourcePane($("source-pane"), doc, classIds, sourceCallbacks);
}

function select(seq: number): void {
  state.selectedSeq = seq;
  renderTrace();
  void refreshGraph();
  void refreshSource();
}

const graphCallbacks = {
  onGranularity(granularity: ViewState["granularity"]) {
    state.granularity = granularity;
    void refreshGraph();
  },
  onMode(mode: ViewState["collationMode"]) {
    state.collationMode = mode;
    void refreshGraph();
  },
  onOpenSource(classId: string) {
    state.openSourceClass = classId;
    void refreshSource();
  },
};

const sourceCallbacks = {
  onSelectClass(classId: string) {
    state.openSourceClass = classId;
    void refreshSource();
  },
};

function onPush(message: PushMessage): void {
  if (message.type === "record") {
    entries[message.record.seq] = { record: message.record, metrics: message.metrics };
    renderTrace();
    renderHeader();
  } else if (message.type === "retro") {
    const entry = entries[message.seq];
    if (entry) entry.metrics.ecgCovered = message.ecgCovered;
    if (!applyRetro($("trace-pane"), message.seq, message.ecgCovered)) {
      renderTrace();
    }
    if (state.selectedSeq === message.seq) {
      void refreshGraph();
    }
  }
}

async function fire(widget: string, kind: string): Promise<void> {
  try {
    await api.fire(widget, kind, payload());
    flashWidget($("widget-pane"), widget);
  } catch (err) {
    const box = $("fire-error");
    box.textContent = String(err);
    setTimeout(() => (box.textContent = ""), 4000);
  }
}

async function applyFilterForm(): Promise<void> {
  const hidden = Array.from(
    document.querySelectorAll<HTMLInputElement>(".filter-kind:checked"),
  ).map((el) => el.value);
  const hideNC = (document.getElementById("hide-nc") as HTMLInputElement).checked;
  const result = await api.setFilters({ hiddenKinds: hidden, hideNonContributing: hideNC });
  state.filters = result.filters;
  if (
    state.selectedSeq !== null &&
    !visibleEntries(entries, state.filters).some((e) => e.record.seq === state.selectedSeq)
  ) {
    state.selectedSeq = null;
  }
  renderTrace();
}

async function init(): Promise<void> {
  program = await api.getProgram();
  $("program-name").textContent = program.name;
  renderWidgetSurface($("widget-pane"), program.widgetRoot, { onFire: fire });
  renderSourcePane($("source-pane"), null, appClassIds(program), sourceCallbacks);
  renderGraphPane($("graph-pane"), null, 0, graphCallbacks);
  document.querySelectorAll<HTMLInputElement>(".filter-kind, #hide-nc").forEach((el) => {
    el.addEventListener("change", () => void applyFilterForm());
  });
  api.connectLive(onPush, (connected) => {
    state.connected = connected;
    renderHeader();
    if (!connected) {
      $("fire-error").textContent = "connection lost; reload to reconnect";
    }
  });
}

void init();
