// Client view state plus the presentation-only visibility rule.

import type { CollationMode, FilterState, Granularity, TraceEntry } from "./types";

export interface ViewState {
  selectedSeq: number | null;
  granularity: Granularity;
  collationMode: CollationMode;
  filters: FilterState;
  openSourceClass: string | null;
  connected: boolean;
}

export function initialState(): ViewState {
  return {
    selectedSeq: null,
    granularity: "method",
    collationMode: "collated",
    filters: { hiddenKinds: [], hideNonContributing: false },
    openSourceClass: null,
    connected: false,
  };
}

// Mirrors the server's filtered_view semantics for entries that arrive over
// the push channel after the last /trace fetch. Presentation only: metrics
// always come from the server.
export function isVisible(entry: TraceEntry, filters: FilterState): boolean {
  const { record } = entry;
  if (filters.hiddenKinds.includes(record.event.kind)) {
    return false;
  }
  if (
    filters.hideNonContributing &&
    record.coverageDelta.length === 0 &&
    record.event.kind !== "startup"
  ) {
    return false;
  }
  return true;
}

export function visibleEntries(entries: TraceEntry[], filters: FilterState): TraceEntry[] {
  return entries.filter((e) => isVisible(e, filters));
}
