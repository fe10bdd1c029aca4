// Thin fetch/WebSocket wrappers over the session-service endpoints.

import type {
  CallGraphDoc,
  CollationMode,
  FilterState,
  FireResponse,
  Granularity,
  ProgramDoc,
  PushMessage,
  SourceDoc,
  TraceDoc,
} from "./types";

async function getJson<T>(url: string): Promise<T> {
  const response = await fetch(url);
  if (!response.ok) {
    throw new Error(`${url}: ${response.status} ${await response.text()}`);
  }
  return (await response.json()) as T;
}

async function postJson<T>(url: string, body: unknown): Promise<T> {
  const response = await fetch(url, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!response.ok) {
    throw new Error(`${url}: ${response.status} ${await response.text()}`);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private base: string = "") {}

  getProgram(): Promise<ProgramDoc> {
    return getJson(`${this.base}/program`);
  }

  fire(widget: string, kind: string, payload: number): Promise<FireResponse> {
    return postJson(`${this.base}/fire`, { widget, kind, payload });
  }

  getTrace(): Promise<TraceDoc> {
    return getJson(`${this.base}/trace`);
  }

  getCallGraph(seq: number, granularity: Granularity, mode: CollationMode): Promise<CallGraphDoc> {
    const params = new URLSearchParams({ seq: String(seq), granularity, mode });
    return getJson(`${this.base}/callgraph?${params}`);
  }

  getSource(classId: string, seq: number): Promise<SourceDoc> {
    const params = new URLSearchParams({ classId, seq: String(seq) });
    return getJson(`${this.base}/source?${params}`);
  }

  setFilters(filters: FilterState): Promise<{ version: number; filters: FilterState }> {
    return postJson(`${this.base}/filters`, filters);
  }

  connectLive(
    onMessage: (message: PushMessage) => void,
    onStatus: (connected: boolean) => void,
  ): WebSocket {
    const proto = location.protocol === "https:" ? "wss" : "ws";
    const socket = new WebSocket(`${proto}://${location.host}${this.base}/live`);
    socket.onopen = () => onStatus(true);
    socket.onclose = () => onStatus(false);
    socket.onmessage = (event) => onMessage(JSON.parse(event.data) as PushMessage);
    return socket;
  }
}
