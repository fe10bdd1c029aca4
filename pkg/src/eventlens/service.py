"""HTTP and WebSocket service around one live tracing session.

Embeds the interpreter agent, the wire host and the coverage session. All
mutations funnel through a single event-loop thread; reads take the session
lock and serve one consistent version per response. Push subscribers get
every record exactly once, in order (history replayed on subscribe), plus
retroactive metric notices; a subscriber that falls 10,000 messages behind
is dropped.

Endpoint paths: /program /fire /trace /callgraph /source /filters /export
plus the /live socket upgrade. Default port 4791; the TCP agent link, when
enabled, uses its own port (default 4790).
"""

from __future__ import annotations

import asyncio
import queue
import threading
from concurrent.futures import Future
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket
from fastapi.responses import JSONResponse

from .callgraph import CallGraph, collapse, collate_or_split, START_NODE
from .coverage import FilterSpec, TraceSession
from .events import FiredEvent
from .interpreter import Interpreter, UnknownWidgetError
from .model import EVENT_KINDS, ProgramModel, source_rows
from .report import report_document
from .wire import (
    AgentEmitter,
    DEFAULT_AGENT_PORT,
    DEFAULT_SNAPSHOT_EVERY,
    Host,
    InProcessTransport,
    TcpAgentLink,
    TcpHostServer,
)

DEFAULT_PORT = 4791
FIRE_QUEUE_SIZE = 256
SUBSCRIBER_BUFFER = 10_000

_CLOSE = object()


class Subscriber:
    def __init__(self, sub_id: int):
        self.id = sub_id
        self.queue: queue.Queue = queue.Queue(maxsize=SUBSCRIBER_BUFFER)

    def get(self, timeout: float):
        try:
            return self.queue.get(timeout=timeout)
        except queue.Empty:
            return None


class SessionCore:
    """Threads, queues and locks behind the API surface."""

    def __init__(
        self,
        model: ProgramModel,
        cg: CallGraph,
        transport: str = "inproc",
        agent_port: int = DEFAULT_AGENT_PORT,
        snapshot_every: int = DEFAULT_SNAPSHOT_EVERY,
    ):
        self.model = model
        self.cg = cg
        self.session = TraceSession(model, cg)
        self.transport = transport
        self.status = "starting"
        self._lock = threading.RLock()
        self._subscribers: dict[int, Subscriber] = {}
        self._next_sub_id = 0
        self._fire_queue: queue.Queue = queue.Queue(maxsize=FIRE_QUEUE_SIZE)
        self._futures: dict[int, Future] = {}

        self.host = Host()
        self.host.add_listener(self._on_record)
        self._tcp_server = None
        if transport == "tcp":
            self._tcp_server = TcpHostServer(self.host, agent_port)
            link = TcpAgentLink(self._tcp_server.port)
            write = link.write
        elif transport == "inproc":
            write = InProcessTransport(self.host).write
        else:
            raise ValueError(f"unknown transport {transport!r}")
        self.agent_port = self._tcp_server.port if self._tcp_server else None

        self.interp = Interpreter(model)
        self.agent = AgentEmitter(self.interp, write, snapshot_every=snapshot_every)
        self._loop_thread = threading.Thread(target=self._event_loop, daemon=True)
        self._loop_thread.start()

    # -- event loop (the single writer) -------------------------------------

    def _event_loop(self) -> None:
        self.agent.send_hello()
        self.interp.start()
        while True:
            item = self._fire_queue.get()
            if item is _CLOSE:
                self.agent.send_bye()
                return
            future, event = item
            expected_seq = self.interp.state.event_seq
            with self._lock:
                self._futures[expected_seq] = future
            try:
                self.interp.fire(event)
            except UnknownWidgetError as exc:  # pre-validated; belt and braces
                with self._lock:
                    self._futures.pop(expected_seq, None)
                future.set_exception(exc)

    def _on_record(self, record) -> None:
        with self._lock:
            improvements = self.session.ingest(record)
            version = self.session.version
            messages = [
                {
                    "type": "record",
                    "version": version,
                    "record": record.to_dict(),
                    "metrics": self.session.metrics[record.seq].to_dict(),
                }
            ]
            for seq, ecg_covered in improvements:
                messages.append(
                    {
                        "type": "retro",
                        "version": version,
                        "seq": seq,
                        "ecgCovered": ecg_covered,
                    }
                )
            dead = []
            for sub in self._subscribers.values():
                for message in messages:
                    try:
                        sub.queue.put_nowait(message)
                    except queue.Full:
                        dead.append(sub.id)
                        break
            for sub_id in dead:  # slow subscriber: disconnect rather than block
                sub = self._subscribers.pop(sub_id)
                try:
                    sub.queue.put_nowait(_CLOSE)
                except queue.Full:
                    pass
            future = self._futures.pop(record.seq, None)
        if record.seq == 0:
            self.status = "ready"
        if future is not None:
            future.set_result(record.seq)

    # -- commands ------------------------------------------------------------

    def fire(self, widget: str, kind: str, payload: int, timeout: float = 30.0) -> dict:
        if widget not in self.model.widgets:
            raise HTTPException(status_code=404, detail=f"unknown widget {widget!r}")
        if kind not in EVENT_KINDS:
            raise HTTPException(status_code=400, detail=f"unknown event kind {kind!r}")
        future: Future = Future()
        try:
            self._fire_queue.put_nowait((future, FiredEvent(widget, kind, payload)))
        except queue.Full:
            raise HTTPException(status_code=503, detail="fire queue full")
        seq = future.result(timeout=timeout)
        with self._lock:
            return {
                "version": self.session.version,
                "record": self.session.records[seq].to_dict(),
                "metrics": self.session.metrics[seq].to_dict(),
            }

    def shutdown(self) -> None:
        self._fire_queue.put(_CLOSE)

    # -- queries -------------------------------------------------------------

    def program_doc(self) -> dict:
        model = self.model
        units = []
        for unit in model.units:
            classes = []
            for cls in unit.classes:
                cid = f"{unit.name}.{cls.name}"
                classes.append(
                    {
                        "id": cid,
                        "name": cls.name,
                        "methods": [
                            {
                                "id": f"{cid}.{m.name}",
                                "name": m.name,
                                "lineSpan": list(m.line_span) if m.line_span else None,
                            }
                            for m in cls.methods
                        ],
                    }
                )
            units.append({"name": unit.name, "library": unit.is_library, "classes": classes})
        with self._lock:
            return {
                "status": self.status,
                "version": self.session.version,
                "name": model.name,
                "programHash": model.content_hash,
                "totalLines": model.total_lines,
                "totalAppLines": model.total_app_lines,
                "transport": self.transport,
                "widgetRoot": model.widget_root.to_dict(),
                "units": units,
            }

    def trace_doc(self, filters: FilterSpec | None = None) -> dict:
        with self._lock:
            active = filters if filters is not None else self.session.filters
            visible = self.session.filtered_view(active)
            return {
                "version": self.session.version,
                "appTotal": self.model.total_app_lines,
                "appCovered": self.session.cumulative.covered_count,
                "filters": active.to_dict(),
                "visibleSeqs": visible,
                "entries": [
                    {
                        "record": self.session.records[seq].to_dict(),
                        "metrics": self.session.metrics[seq].to_dict(),
                    }
                    for seq in visible
                ],
            }

    def callgraph_doc(self, seq: int, granularity: str, mode: str) -> dict:
        if granularity not in ("method", "class", "package"):
            raise HTTPException(status_code=400, detail=f"invalid granularity {granularity!r}")
        if mode not in ("collated", "perHandler"):
            raise HTTPException(status_code=400, detail=f"invalid mode {mode!r}")
        with self._lock:
            try:
                ecg = self.session.ecg_for(seq)
            except KeyError:
                raise HTTPException(status_code=404, detail=f"unknown seq {seq}")
            version = self.session.version
            if ecg is None:
                return {
                    "version": version,
                    "seq": seq,
                    "granularity": granularity,
                    "mode": mode,
                    "noHandlers": True,
                    "graphs": [],
                }
            graphs = []
            for part in collate_or_split(ecg, mode, self.cg, self.model):
                collapsed = collapse(part, granularity)
                coverage = self.session.node_coverage(collapsed, seq)
                graphs.append(
                    {
                        "handlers": list(part.handlers),
                        "start": START_NODE,
                        "nodes": [
                            {"id": group, **coverage[group]}
                            for group in sorted(collapsed.nodes - {START_NODE})
                        ],
                        "startEdges": [
                            {"to": group, "count": count}
                            for group, count in sorted(collapsed.start_edges.items())
                        ],
                        "edges": [
                            {"from": a, "to": b, "count": count}
                            for (a, b), count in sorted(collapsed.edges.items())
                        ],
                        "internalCalls": dict(sorted(collapsed.internal_calls.items())),
                        "members": {g: list(ms) for g, ms in sorted(collapsed.members.items())},
                    }
                )
            return {
                "version": version,
                "seq": seq,
                "granularity": granularity,
                "mode": mode,
                "noHandlers": False,
                "graphs": graphs,
            }

    def source_doc(self, class_id: str, seq: int) -> dict:
        with self._lock:
            try:
                statuses = dict(self.session.source_annotation(class_id, seq))
            except KeyError as exc:
                raise HTTPException(status_code=404, detail=str(exc))
            rows = [
                {
                    "line": line,
                    "text": text,
                    "status": statuses.get(line) if line is not None else None,
                }
                for line, text in source_rows(self.model, class_id)
            ]
            return {
                "version": self.session.version,
                "classId": class_id,
                "seq": seq,
                "rows": rows,
            }

    def set_filters(self, raw: dict) -> dict:
        kinds = raw.get("hiddenKinds", [])
        bad = [k for k in kinds if k not in EVENT_KINDS]
        if bad:
            raise HTTPException(status_code=400, detail=f"unknown event kinds {bad}")
        spec = FilterSpec(
            hidden_kinds=frozenset(kinds),
            hide_non_contributing=bool(raw.get("hideNonContributing", False)),
        )
        with self._lock:
            self.session.set_filters(spec)
            return {"version": self.session.version, "filters": spec.to_dict()}

    def export_doc(self) -> dict:
        with self._lock:
            return report_document(self.session)

    # -- push channel ----------------------------------------------------------

    def subscribe(self) -> Subscriber:
        """Replays history into the new subscriber's queue, then goes live."""
        with self._lock:
            sub = Subscriber(self._next_sub_id)
            self._next_sub_id += 1
            version = self.session.version
            for record, metrics in zip(self.session.records, self.session.metrics):
                sub.queue.put_nowait(
                    {
                        "type": "record",
                        "version": version,
                        "record": record.to_dict(),
                        "metrics": metrics.to_dict(),
                    }
                )
            self._subscribers[sub.id] = sub
            return sub

    def unsubscribe(self, sub: Subscriber) -> None:
        with self._lock:
            self._subscribers.pop(sub.id, None)


def create_app(
    model: ProgramModel,
    cg: CallGraph,
    transport: str = "inproc",
    agent_port: int = DEFAULT_AGENT_PORT,
    snapshot_every: int = DEFAULT_SNAPSHOT_EVERY,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    core = SessionCore(
        model, cg, transport=transport, agent_port=agent_port, snapshot_every=snapshot_every
    )
    app = FastAPI(title="eventlens session service")
    app.state.core = core

    @app.get("/program")
    def program():
        return JSONResponse(core.program_doc())

    @app.post("/fire")
    def fire(body: dict):
        widget = body.get("widget")
        kind = body.get("kind")
        payload = body.get("payload", 0)
        if not isinstance(widget, str) or not isinstance(kind, str) or not isinstance(payload, int):
            raise HTTPException(status_code=400, detail="fire needs widget, kind, payload")
        return JSONResponse(core.fire(widget, kind, payload))

    @app.get("/trace")
    def trace(hiddenKinds: str | None = None, hideNonContributing: bool | None = None):
        filters = None
        if hiddenKinds is not None or hideNonContributing is not None:
            kinds = [k for k in (hiddenKinds or "").split(",") if k]
            bad = [k for k in kinds if k not in EVENT_KINDS]
            if bad:
                raise HTTPException(status_code=400, detail=f"unknown event kinds {bad}")
            filters = FilterSpec(
                hidden_kinds=frozenset(kinds),
                hide_non_contributing=bool(hideNonContributing),
            )
        return JSONResponse(core.trace_doc(filters))

    @app.get("/callgraph")
    def callgraph(seq: int, granularity: str = "method", mode: str = "collated"):
        return JSONResponse(core.callgraph_doc(seq, granularity, mode))

    @app.get("/source")
    def source(classId: str, seq: int):
        return JSONResponse(core.source_doc(classId, seq))

    @app.post("/filters")
    def filters(body: dict):
        return JSONResponse(core.set_filters(body))

    @app.get("/export")
    def export():
        return JSONResponse(core.export_doc())

    @app.websocket("/live")
    async def live(ws: WebSocket):
        await ws.accept()
        loop = asyncio.get_running_loop()
        sub = core.subscribe()
        stop = threading.Event()

        def pump():
            while not stop.is_set():
                item = sub.get(timeout=0.2)
                if item is None:
                    continue
                if item is _CLOSE:
                    asyncio.run_coroutine_threadsafe(ws.close(code=1013), loop)
                    return
                try:
                    asyncio.run_coroutine_threadsafe(ws.send_json(item), loop).result(10)
                except Exception:
                    return

        thread = threading.Thread(target=pump, daemon=True)
        thread.start()
        try:
            while True:
                message = await ws.receive()
                if message["type"] == "websocket.disconnect":
                    break
        finally:
            stop.set()
            core.unsubscribe(sub)
            thread.join(timeout=2)

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
