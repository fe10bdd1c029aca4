// Shapes of the session-service documents this client consumes.
// All counts shown in the UI come from these documents; the client never
// computes a coverage metric itself.

export interface WidgetNode {
  id: string;
  kind: string;
  label: string;
  children: WidgetNode[];
  handlers: Record<string, string[]>;
}

export interface MethodIndexEntry {
  id: string;
  name: string;
  lineSpan: [number, number] | null;
}

export interface ClassIndexEntry {
  id: string;
  name: string;
  methods: MethodIndexEntry[];
}

export interface UnitIndexEntry {
  name: string;
  library: boolean;
  classes: ClassIndexEntry[];
}

export interface ProgramDoc {
  status: "starting" | "ready";
  version: number;
  name: string;
  programHash: string;
  totalLines: number;
  totalAppLines: number;
  transport: string;
  widgetRoot: WidgetNode;
  units: UnitIndexEntry[];
}

export interface FiredEventDoc {
  widget: string | null;
  kind: string;
  payload: number;
}

export interface RecordDoc {
  seq: number;
  timestampMs: number;
  event: FiredEventDoc;
  handlers: string[];
  coverageDelta: number[];
  snapshot: { fired: string | null; root: WidgetNode };
  error: string | null;
}

export interface MetricsDoc {
  seq: number;
  appCovered: number;
  appTotal: number;
  ecgCovered: number;
  ecgTotal: number;
  firstCovered: number[];
}

export interface TraceEntry {
  record: RecordDoc;
  metrics: MetricsDoc;
}

export interface FilterState {
  hiddenKinds: string[];
  hideNonContributing: boolean;
}

export interface TraceDoc {
  version: number;
  appTotal: number;
  appCovered: number;
  filters: FilterState;
  visibleSeqs: number[];
  entries: TraceEntry[];
}

export type Granularity = "method" | "class" | "package";
export type CollationMode = "collated" | "perHandler";

export interface GraphNodeDoc {
  id: string;
  coveredLines: number;
  totalLines: number;
  status: "fully" | "partially" | "uncovered";
  firstCoveredHere: boolean;
}

export interface GraphEdgeDoc {
  from: string;
  to: string;
  count: number;
}

export interface GraphDoc {
  handlers: string[];
  start: string;
  nodes: GraphNodeDoc[];
  startEdges: { to: string; count: number }[];
  edges: GraphEdgeDoc[];
  internalCalls: Record<string, number>;
  members: Record<string, string[]>;
}

export interface CallGraphDoc {
  version: number;
  seq: number;
  granularity: Granularity;
  mode: CollationMode;
  noHandlers: boolean;
  graphs: GraphDoc[];
}

export interface SourceRow {
  line: number | null;
  text: string;
  status: "covered" | "firstCoveredHere" | "uncovered" | null;
}

export interface SourceDoc {
  version: number;
  classId: string;
  seq: number;
  rows: SourceRow[];
}

export interface FireResponse {
  version: number;
  record: RecordDoc;
  metrics: MetricsDoc;
}

export type PushMessage =
  | { type: "record"; version: number; record: RecordDoc; metrics: MetricsDoc }
  | { type: "retro"; version: number; seq: number; ecgCovered: number };
