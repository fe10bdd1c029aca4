import { beforeEach, describe, expect, it } from "vitest";

import { applyRetro, renderTracePane } from "../src/tracePane";
import { visibleEntries } from "../src/state";
import { fireResponseDoc, pushMessagesDoc, traceDoc } from "./fixtures";

let container: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "";
  container = document.createElement("div");
  document.body.appendChild(container);
});

describe("trace pane", () => {
  it("renders entries newest first with server-provided counters", () => {
    renderTracePane(container, traceDoc.entries, null, { onSelect: () => {} });
    const seqs = Array.from(container.querySelectorAll(".trace-entry")).map((el) =>
      Number((el as HTMLElement).dataset.seq),
    );
    expect(seqs).toEqual([3, 2, 1, 0]);
    const top = container.querySelector('[data-seq="3"]')!;
    expect(top.querySelector(".app-count")!.textContent).toBe("30/78");
    expect(top.querySelector(".ecg-count")!.textContent).toBe("9/11");
  });

  it("shows n/a for the startup record's call-graph coverage", () => {
    renderTracePane(container, traceDoc.entries, null, { onSelect: () => {} });
    const startup = container.querySelector('[data-seq="0"]')!;
    expect(startup.querySelector(".ecg-count")!.textContent).toBe("n/a");
  });

  it("adds a new entry when a fired record arrives, without rebuilding the page", () => {
    const entries = [...traceDoc.entries];
    renderTracePane(container, entries, null, { onSelect: () => {} });
    expect(container.querySelectorAll(".trace-entry")).toHaveLength(4);
    entries.push({ record: fireResponseDoc.record, metrics: fireResponseDoc.metrics });
    renderTracePane(container, entries, null, { onSelect: () => {} });
    const seqs = Array.from(container.querySelectorAll(".trace-entry")).map((el) =>
      Number((el as HTMLElement).dataset.seq),
    );
    expect(seqs[0]).toBe(4); // newest on top, no navigation involved
    expect(container.isConnected).toBe(true);
  });

  it("marks the selected entry", () => {
    renderTracePane(container, traceDoc.entries, 2, { onSelect: () => {} });
    expect(container.querySelector('[data-seq="2"]')!.classList.contains("selected")).toBe(true);
    expect(container.querySelector('[data-seq="1"]')!.classList.contains("selected")).toBe(false);
  });

  it("reports clicks through the selection callback", () => {
    const picked: number[] = [];
    renderTracePane(container, traceDoc.entries, null, { onSelect: (seq) => picked.push(seq) });
    (container.querySelector('[data-seq="1"]') as HTMLElement).click();
    expect(picked).toEqual([1]);
  });

  it("applies a retro notice in place, using the captured push message", () => {
    // Render the pre-improvement state reconstructed from the push stream.
    const recordMessages = pushMessagesDoc.filter((m) => m.type === "record");
    const entries = recordMessages.slice(0, 2).map((m) => {
      if (m.type !== "record") throw new Error("unreachable");
      return { record: m.record, metrics: m.metrics };
    });
    renderTracePane(container, entries, null, { onSelect: () => {} });
    const counter = container.querySelector('[data-seq="1"] .ecg-count') as HTMLElement;
    expect(counter.textContent).toBe("8/13");

    const retro = pushMessagesDoc.find((m) => m.type === "retro");
    expect(retro).toBeDefined();
    if (retro?.type !== "retro") throw new Error("unreachable");
    const applied = applyRetro(container, retro.seq, retro.ecgCovered);
    expect(applied).toBe(true);
    // same element, updated in place
    expect(container.querySelector('[data-seq="1"] .ecg-count')).toBe(counter);
    expect(counter.textContent).toBe("12/13");
  });

  it("hides filtered entries but keeps the startup record", () => {
    const filtered = visibleEntries(traceDoc.entries, {
      hiddenKinds: ["valueChanged"],
      hideNonContributing: false,
    });
    expect(filtered.map((e) => e.record.seq)).toEqual([0, 1, 3]);
    const none = visibleEntries(traceDoc.entries, { hiddenKinds: [], hideNonContributing: true });
    // every demo event contributes, so only kind filters can hide anything
    expect(none.map((e) => e.record.seq)).toEqual([0, 1, 2, 3]);
  });

  it("push replay matches the pulled trace document", () => {
    const replayed = pushMessagesDoc
      .filter((m) => m.type === "record")
      .map((m) => (m.type === "record" ? m.record : null));
    expect(replayed).toEqual(traceDoc.entries.map((e) => e.record));
  });
});
