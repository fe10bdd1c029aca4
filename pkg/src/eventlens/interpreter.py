"""Deterministic executor for modeled programs.

Plays the instrumented target application: runs main, dispatches fired
events to their bound handlers one at a time, marks statement coverage as
it goes and emits one record per event after handling completes. Faults
inside handling (call-depth overflow, bad vcall receiver) flag the record
and end that event's handling; the session survives.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from typing import Callable

from .events import EventRecord, FiredEvent, widget_snapshot
from .model import (
    STARTUP_KIND,
    BinOp,
    CallStmt,
    ExecStmt,
    IfStmt,
    Lit,
    Payload,
    ProgramModel,
    ReturnStmt,
    SetStmt,
    Stmt,
    VCallStmt,
    Var,
    class_of_method,
)

DEFAULT_DEPTH_LIMIT = 512


class UnknownWidgetError(Exception):
    """Fired event names a widget the program does not have."""


class InterpreterFault(Exception):
    """Runtime fault inside the modeled program, tied to a statement line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class _Return(Exception):
    """Unwinds the current method frame."""


@dataclass
class RuntimeState:
    """Mutable session state. Coverage bits only ever flip on."""

    variables: dict[str, int | str] = field(default_factory=dict)  # str = class tag
    coverage_mask: int = 0
    covered_count: int = 0
    event_seq: int = 0
    dynamic_edges: set[tuple[str, str]] = field(default_factory=set)


class Interpreter:
    """Single-threaded event loop over a validated program.

    ``emit`` is called with each completed :class:`EventRecord`; the wire
    agent hooks in there. Callers must serialize ``fire`` invocations.
    """

    def __init__(
        self,
        model: ProgramModel,
        depth_limit: int = DEFAULT_DEPTH_LIMIT,
        clock: Callable[[], float] | None = None,
        emit: Callable[[EventRecord], None] | None = None,
    ):
        self.model = model
        self.depth_limit = depth_limit
        self.emit = emit
        self._clock = clock or time.monotonic
        self._t0 = self._clock()
        self.state = RuntimeState()
        self._payload = 0
        self._started = False
        # Every modeled frame costs a handful of Python frames; make sure the
        # modeled depth limit is reachable before Python's own limit is.
        needed = depth_limit * 10 + 1000
        if sys.getrecursionlimit() < needed:
            sys.setrecursionlimit(needed)

    # -- public ------------------------------------------------------------

    def start(self) -> EventRecord:
        """Run main to completion and emit the startup record (seq 0)."""
        if self._started:
            raise RuntimeError("session already started")
        self._started = True
        record = self._handle(
            FiredEvent(None, STARTUP_KIND, 0), handlers=(self.model.main,)
        )
        return record

    def fire(self, event: FiredEvent) -> EventRecord:
        """Dispatch one event to its bound handlers and emit the record."""
        if not self._started:
            raise RuntimeError("session not started")
        if event.widget not in self.model.widgets:
            raise UnknownWidgetError(f"unknown widget {event.widget!r}")
        handlers = self.model.handlers_for(event.widget, event.kind)
        return self._handle(event, handlers)

    # -- event handling ----------------------------------------------------

    def _handle(self, event: FiredEvent, handlers: tuple[str, ...]) -> EventRecord:
        state = self.state
        seq = state.event_seq
        state.event_seq += 1
        before = state.coverage_mask
        self._payload = event.payload
        error: str | None = None
        for handler in handlers:
            try:
                self._invoke(handler, depth=1)
            except InterpreterFault as fault:
                error = str(fault)
                break
            except RecursionError:  # deeply nested ifs past the headroom
                error = "python recursion limit exceeded during handling"
                break
        delta_mask = state.coverage_mask & ~before
        record = EventRecord(
            seq=seq,
            timestamp_ms=int((self._clock() - self._t0) * 1000),
            event=event,
            handlers=handlers,
            coverage_delta=tuple(_mask_to_lines(delta_mask)),
            snapshot=widget_snapshot(self.model, event.widget),
            error=error,
        )
        if self.emit is not None:
            self.emit(record)
        return record

    # -- execution ---------------------------------------------------------

    def _invoke(self, mid: str, depth: int) -> None:
        body = self.model.methods[mid].body
        try:
            self._run_block(body, mid, depth)
        except _Return:
            pass

    def _run_block(self, body: list[Stmt], mid: str, depth: int) -> None:
        for stmt in body:
            self._mark(stmt.line)
            if isinstance(stmt, ExecStmt):
                continue
            if isinstance(stmt, SetStmt):
                if stmt.new_class is not None:
                    self.state.variables[stmt.var] = stmt.new_class
                else:
                    self.state.variables[stmt.var] = self._eval(stmt.expr)
            elif isinstance(stmt, IfStmt):
                branch = stmt.then_body if self._eval(stmt.cond) != 0 else stmt.else_body
                self._run_block(branch, mid, depth)
            elif isinstance(stmt, CallStmt):
                self._call(mid, stmt.resolved, stmt.line, depth)
            elif isinstance(stmt, VCallStmt):
                target = self._dispatch(stmt)
                self._call(mid, target, stmt.line, depth)
            elif isinstance(stmt, ReturnStmt):
                raise _Return()

    def _call(self, caller: str, callee: str, site: int, depth: int) -> None:
        if depth >= self.depth_limit:
            raise InterpreterFault(site, f"call depth limit ({self.depth_limit}) exceeded")
        if self.model.is_app_method(caller) and self.model.is_app_method(callee):
            self.state.dynamic_edges.add((caller, callee))
        self._invoke(callee, depth + 1)

    def _dispatch(self, stmt: VCallStmt) -> str:
        value = self.state.variables.get(stmt.receiver)
        if not isinstance(value, str):
            raise InterpreterFault(
                stmt.line, f"vcall receiver {stmt.receiver!r} holds no object"
            )
        if not self.model.is_subtype(value, stmt.declared_type):
            raise InterpreterFault(
                stmt.line,
                f"receiver class {value} does not conform to {stmt.declared_type}",
            )
        resolved = self.model.resolve_method(value, stmt.method)
        if resolved is None:
            raise InterpreterFault(
                stmt.line, f"class {value} does not resolve {stmt.method!r}"
            )
        return resolved

    def _eval(self, expr) -> int:
        if isinstance(expr, Lit):
            return expr.value
        if isinstance(expr, Var):
            value = self.state.variables.get(expr.name, 0)
            return value if isinstance(value, int) else 0  # tags read as 0
        if isinstance(expr, Payload):
            return self._payload
        if isinstance(expr, BinOp):
            lhs, rhs = self._eval(expr.lhs), self._eval(expr.rhs)
            if expr.op == "+":
                return lhs + rhs
            if expr.op == "-":
                return lhs - rhs
            if expr.op == "==":
                return int(lhs == rhs)
            if expr.op == "<":
                return int(lhs < rhs)
            return int(lhs > rhs)
        raise TypeError(f"not an expression: {expr!r}")

    def _mark(self, line: int) -> None:
        bit = 1 << line
        if self.model.app_line_mask & bit and not self.state.coverage_mask & bit:
            self.state.coverage_mask |= bit
            self.state.covered_count += 1


def _mask_to_lines(mask: int) -> list[int]:
    lines = []
    line = 0
    while mask:
        if mask & 1:
            lines.append(line)
        mask >>= 1
        line += 1
    return lines


def script_run(
    model: ProgramModel,
    script: list[FiredEvent],
    cg=None,
    clock: Callable[[], float] | None = None,
):
    """Headless harness: start a session, fire the script, analyze as we go.

    Returns a :class:`eventlens.coverage.TraceSession`. Unknown-widget script
    entries are collected in ``session.script_errors`` and skipped; runtime
    faults show up as error-flagged records, and later entries still run.
    """
    from .callgraph import build_call_graph
    from .coverage import TraceSession

    if cg is None:
        cg = build_call_graph(model)
    session = TraceSession(model, cg)
    interp = Interpreter(model, clock=clock, emit=session.ingest)
    interp.start()
    for i, event in enumerate(script):
        try:
            interp.fire(event)
        except UnknownWidgetError as exc:
            session.script_errors.append(f"event {i}: {exc}")
    session.dynamic_edges = interp.state.dynamic_edges
    return session
