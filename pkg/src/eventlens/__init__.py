"""eventlens: live call-graph and coverage tracing for modeled event-driven apps."""

from .callgraph import (
    CallGraph,
    CollapsedGraph,
    EventCallGraph,
    NoHandlersError,
    StaleCacheError,
    build_call_graph,
    collapse,
    collate_or_split,
    event_call_graph,
    load_call_graph,
    save_call_graph,
    to_dot,
)
from .coverage import EventMetrics, FilterSpec, TraceSession
from .events import EventRecord, FiredEvent
from .interpreter import Interpreter, InterpreterFault, UnknownWidgetError, script_run
from .model import ProgramModel, ValidationError, assign_lines
from .parser import (
    ProgramFormatError,
    load_program,
    load_script,
    parse_program,
    parse_script,
    serialize_program,
)

__version__ = "0.1.0"

__all__ = [
    "CallGraph",
    "CollapsedGraph",
    "EventCallGraph",
    "EventMetrics",
    "EventRecord",
    "FilterSpec",
    "FiredEvent",
    "Interpreter",
    "InterpreterFault",
    "NoHandlersError",
    "ProgramFormatError",
    "ProgramModel",
    "StaleCacheError",
    "TraceSession",
    "UnknownWidgetError",
    "ValidationError",
    "assign_lines",
    "build_call_graph",
    "collapse",
    "collate_or_split",
    "event_call_graph",
    "load_call_graph",
    "load_program",
    "load_script",
    "parse_program",
    "parse_script",
    "save_call_graph",
    "script_run",
    "serialize_program",
    "to_dot",
]
