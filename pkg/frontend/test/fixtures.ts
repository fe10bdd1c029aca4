// Captured responses of the real session service running the bundled demo
// program through its 3-event script (plus one extra fire for the click
// test). Regenerate by re-running the capture snippet in the repo docs.

import callgraphClass from "./fixtures/callgraph_class.json";
import callgraphMethod from "./fixtures/callgraph_method.json";
import callgraphPackage from "./fixtures/callgraph_package.json";
import callgraphPerHandler from "./fixtures/callgraph_perhandler.json";
import fireResponse from "./fixtures/fire_response.json";
import program from "./fixtures/program.json";
import pushMessages from "./fixtures/push_messages.json";
import source from "./fixtures/source_mapmodel_seq3.json";
import trace from "./fixtures/trace.json";
import type {
  CallGraphDoc,
  FireResponse,
  ProgramDoc,
  PushMessage,
  SourceDoc,
  TraceDoc,
} from "../src/types";

export const programDoc = program as unknown as ProgramDoc;
export const traceDoc = trace as unknown as TraceDoc;
export const callgraphMethodDoc = callgraphMethod as unknown as CallGraphDoc;
export const callgraphClassDoc = callgraphClass as unknown as CallGraphDoc;
export const callgraphPackageDoc = callgraphPackage as unknown as CallGraphDoc;
export const callgraphPerHandlerDoc = callgraphPerHandler as unknown as CallGraphDoc;
export const sourceDoc = source as unknown as SourceDoc;
export const fireResponseDoc = fireResponse as unknown as FireResponse;
export const pushMessagesDoc = pushMessages as unknown as PushMessage[];
