// End-to-end pane loop against captured service documents: fire, watch the
// trace grow, select, browse graphs, drill into source, see a retro notice
// land in place.

import { beforeEach, describe, expect, it } from "vitest";

import { applyRetro, renderTracePane } from "../src/tracePane";
import { renderGraphPane } from "../src/graphPane";
import { renderSourcePane } from "../src/sourcePane";
import { renderWidgetSurface } from "../src/widgetSurface";
import {
  callgraphClassDoc,
  callgraphMethodDoc,
  callgraphPackageDoc,
  callgraphPerHandlerDoc,
  fireResponseDoc,
  programDoc,
  pushMessagesDoc,
  sourceDoc,
  traceDoc,
} from "./fixtures";
import type { TraceEntry } from "../src/types";

let widgetPane: HTMLElement;
let tracePane: HTMLElement;
let graphPane: HTMLElement;
let sourcePane: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "";
  for (const el of [widgetPane, tracePane, graphPane, sourcePane] = [
    document.createElement("div"),
    document.createElement("div"),
    document.createElement("div"),
    document.createElement("div"),
  ]) {
    document.body.appendChild(el);
  }
});

describe("exploration loop", () => {
  it("click fires, trace grows, selection drives graph and source panes", () => {
    const entries: TraceEntry[] = [...traceDoc.entries];
    let selected: number | null = null;

    // Clicking a bound widget fires; the service answers with a record that
    // lands in the trace without any page reload.
    const fires: string[] = [];
    renderWidgetSurface(widgetPane, programDoc.widgetRoot, {
      onFire: (w, k) => {
        fires.push(`${w}:${k}`);
        entries.push({ record: fireResponseDoc.record, metrics: fireResponseDoc.metrics });
        renderTracePane(tracePane, entries, selected, { onSelect: (s) => (selected = s) });
      },
    });
    renderTracePane(tracePane, entries, selected, { onSelect: (s) => (selected = s) });
    expect(tracePane.querySelectorAll(".trace-entry")).toHaveLength(4);
    (widgetPane.querySelector('[data-widget-id="menu-save"] > .widget-face') as HTMLElement).click();
    expect(fires).toEqual(["menu-save:action"]);
    expect(tracePane.querySelectorAll(".trace-entry")).toHaveLength(5);

    // Selecting an event renders its call graph at every granularity plus
    // per-handler tabs.
    (tracePane.querySelector('[data-seq="3"]') as HTMLElement).click();
    expect(selected).toBe(3);
    const opened: string[] = [];
    const callbacks = {
      onGranularity: () => {},
      onMode: () => {},
      onOpenSource: (cid: string) => opened.push(cid),
    };
    for (const doc of [callgraphMethodDoc, callgraphClassDoc, callgraphPackageDoc]) {
      renderGraphPane(graphPane, doc, 0, callbacks);
      expect(graphPane.querySelectorAll(".graph-node").length).toBeGreaterThan(0);
    }
    renderGraphPane(graphPane, callgraphPerHandlerDoc, 0, callbacks);
    expect(graphPane.querySelectorAll(".tab")).toHaveLength(2);

    // Context menu on the class node opens that class in the source pane,
    // which shows all three coverage colors on the demo fixture.
    renderGraphPane(graphPane, callgraphClassDoc, 0, callbacks);
    const node = graphPane.querySelector(
      '.graph-node[data-node-id="mindmap.core.MapModel"]',
    ) as SVGGElement;
    node.dispatchEvent(new MouseEvent("contextmenu", { bubbles: true, cancelable: true }));
    (document.body.querySelector(".context-item") as HTMLElement).click();
    expect(opened).toEqual(["mindmap.core.MapModel"]);
    const classIds = programDoc.units
      .filter((u) => !u.library)
      .flatMap((u) => u.classes.map((c) => c.id));
    renderSourcePane(sourcePane, sourceDoc, classIds, { onSelectClass: () => {} });
    const colors = new Set<string>();
    sourcePane.querySelectorAll(".source-row").forEach((row) => {
      row.classList.forEach((cls) => cls.startsWith("cov-") && colors.add(cls));
    });
    expect(colors.size).toBe(3);
  });

  it("a retro notice updates an earlier entry's counter in place", () => {
    const records = pushMessagesDoc.filter((m) => m.type === "record").slice(0, 2);
    const entries = records.map((m) =>
      m.type === "record" ? { record: m.record, metrics: m.metrics } : (null as never),
    );
    renderTracePane(tracePane, entries, null, { onSelect: () => {} });
    const counter = tracePane.querySelector('[data-seq="1"] .ecg-count') as HTMLElement;
    const before = counter.textContent;
    const retro = pushMessagesDoc.find((m) => m.type === "retro");
    if (retro?.type !== "retro") throw new Error("fixture must contain a retro notice");
    expect(applyRetro(tracePane, retro.seq, retro.ecgCovered)).toBe(true);
    expect(tracePane.querySelector('[data-seq="1"] .ecg-count')).toBe(counter);
    expect(counter.textContent).not.toBe(before);
    expect(counter.textContent).toBe("12/13");
  });
});
