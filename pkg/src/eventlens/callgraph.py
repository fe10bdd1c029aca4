"""Static call graphs over the closed-world program model.

Dispatch is resolved with class-hierarchy analysis: a virtual call site on
declared type T and method m contributes one edge per concrete class that
conforms to T and resolves m, targeting the defining class's method. The
result is a sound over-approximation of anything an execution can do; it
may contain edges no run ever exercises.

Library methods never appear in any produced graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import canon
from .model import (
    CallStmt,
    ProgramModel,
    VCallStmt,
    class_of_method,
    unit_of_method,
    walk_stmts,
)

START_NODE = "<start>"  # reserved; method ids always contain dots

Edge = tuple[str, str, int]  # caller, callee, call-site line


class NoHandlersError(Exception):
    """The (widget, kind) pair has no bound handlers."""


class StaleCacheError(Exception):
    """Cached graph was computed from a different program."""


@dataclass(frozen=True)
class CallGraph:
    nodes: frozenset[str]
    edges: frozenset[Edge]
    program_hash: str

    def successors(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, set[str]] = {}
        for caller, callee, _ in self.edges:
            out.setdefault(caller, set()).add(callee)
        return {k: tuple(sorted(v)) for k, v in out.items()}


@dataclass
class EventCallGraph:
    """Static subgraph reachable from one event's handlers.

    Exactly one synthetic start node with one outgoing edge per handler, in
    binding order; every other node is an application method reachable from
    a handler. ``line_universe`` unions the member methods' line spans.
    """

    widget: str
    kind: str
    handlers: tuple[str, ...]
    nodes: frozenset[str]  # includes START_NODE
    edges: frozenset[Edge]  # method-to-method edges among members
    line_universe: frozenset[int]

    @property
    def handler_edges(self) -> tuple[tuple[str, str], ...]:
        return tuple((START_NODE, h) for h in self.handlers)

    @property
    def methods(self) -> frozenset[str]:
        return self.nodes - {START_NODE}

    def universe_mask(self) -> int:
        mask = 0
        for line in self.line_universe:
            mask |= 1 << line
        return mask


@dataclass
class CollapsedGraph:
    """An event call graph with methods merged into class or package groups."""

    granularity: str  # method | class | package
    nodes: frozenset[str]  # group ids, START_NODE included
    edges: dict[tuple[str, str], int]  # cross-group method edges, with counts
    internal_calls: dict[str, int] = field(default_factory=dict)
    start_edges: dict[str, int] = field(default_factory=dict)  # handler groups
    members: dict[str, tuple[str, ...]] = field(default_factory=dict)


def build_call_graph(model: ProgramModel) -> CallGraph:
    """Class-hierarchy analysis over all application call sites."""
    edges: set[Edge] = set()
    for unit in model.units:
        if unit.is_library:
            continue
        for cls in unit.classes:
            cid = f"{unit.name}.{cls.name}"
            for m in cls.methods:
                caller = f"{cid}.{m.name}"
                for stmt in walk_stmts(m.body):
                    if isinstance(stmt, CallStmt):
                        if model.is_app_method(stmt.resolved):
                            edges.add((caller, stmt.resolved, stmt.line))
                    elif isinstance(stmt, VCallStmt):
                        for target in model.cha_resolvers(stmt.declared_type, stmt.method):
                            if model.is_app_method(target):
                                edges.add((caller, target, stmt.line))
    nodes = {e[0] for e in edges} | {e[1] for e in edges}
    nodes.add(model.main)
    for handler_list in model.bindings.values():
        nodes.update(handler_list)
    return CallGraph(
        nodes=frozenset(nodes),
        edges=frozenset(edges),
        program_hash=model.content_hash,
    )


def reachable_from(cg: CallGraph, roots: tuple[str, ...]) -> frozenset[str]:
    """Closure over static edges; cycles are handled by the visited set."""
    succ = cg.successors()
    seen: set[str] = set()
    frontier = [r for r in roots if r in cg.nodes]
    while frontier:
        node = frontier.pop()
        if node in seen:
            continue
        seen.add(node)
        frontier.extend(succ.get(node, ()))
    return frozenset(seen)


def _build_ecg(
    cg: CallGraph, model: ProgramModel, widget: str, kind: str, handlers: tuple[str, ...]
) -> EventCallGraph:
    members = reachable_from(cg, handlers)
    edges = frozenset(e for e in cg.edges if e[0] in members and e[1] in members)
    universe: set[int] = set()
    for mid in members:
        span = model.methods[mid].line_span
        if span is not None:
            universe.update(range(span[0], span[1] + 1))
    return EventCallGraph(
        widget=widget,
        kind=kind,
        handlers=handlers,
        nodes=frozenset(members) | {START_NODE},
        edges=edges,
        line_universe=frozenset(universe),
    )


def event_call_graph(
    cg: CallGraph, model: ProgramModel, widget: str, kind: str
) -> EventCallGraph:
    """Subgraph reachable from the handlers bound to (widget, kind)."""
    if widget not in model.widgets:
        raise KeyError(f"unknown widget {widget!r}")
    handlers = model.handlers_for(widget, kind)
    if not handlers:
        raise NoHandlersError(f"no handlers bound to ({widget}, {kind})")
    return _build_ecg(cg, model, widget, kind, handlers)


def collate_or_split(
    ecg: EventCallGraph, mode: str, cg: CallGraph, model: ProgramModel
) -> list[EventCallGraph]:
    """``collated``: the graph as-is. ``perHandler``: one graph per handler,
    reachability recomputed from that handler alone so shared callees show
    up in every tab they belong to."""
    if mode == "collated":
        return [ecg]
    if mode == "perHandler":
        return [
            _build_ecg(cg, model, ecg.widget, ecg.kind, (h,)) for h in ecg.handlers
        ]
    raise ValueError(f"unknown mode {mode!r}")


def _group_of(mid: str, granularity: str) -> str:
    if granularity == "method":
        return mid
    if granularity == "class":
        return class_of_method(mid)
    if granularity == "package":
        return unit_of_method(mid)
    raise ValueError(f"unknown granularity {granularity!r}")


def collapse(ecg: EventCallGraph, granularity: str) -> CollapsedGraph:
    """Merge method nodes into their enclosing group; the start node maps to
    itself. Cross-group edges carry the underlying method-edge count and
    within-group edges accumulate per group, so the total method-edge count
    is conserved."""
    groups: dict[str, list[str]] = {}
    for mid in sorted(ecg.methods):
        groups.setdefault(_group_of(mid, granularity), []).append(mid)
    edges: dict[tuple[str, str], int] = {}
    internal: dict[str, int] = {}
    for caller, callee, _site in ecg.edges:
        ga, gb = _group_of(caller, granularity), _group_of(callee, granularity)
        if ga == gb:
            internal[ga] = internal.get(ga, 0) + 1
        else:
            edges[(ga, gb)] = edges.get((ga, gb), 0) + 1
    start_edges: dict[str, int] = {}
    for h in ecg.handlers:
        g = _group_of(h, granularity)
        start_edges[g] = start_edges.get(g, 0) + 1
    return CollapsedGraph(
        granularity=granularity,
        nodes=frozenset(groups) | {START_NODE},
        edges=edges,
        internal_calls=internal,
        start_edges=start_edges,
        members={g: tuple(ms) for g, ms in groups.items()},
    )


# --------------------------------------------------------------------------
# Cache persistence
# --------------------------------------------------------------------------


def serialize_call_graph(cg: CallGraph) -> str:
    raw = {
        "programHash": cg.program_hash,
        "nodes": sorted(cg.nodes),
        "edges": sorted([list(e) for e in cg.edges]),
    }
    return canon.canonical_text(raw)


def save_call_graph(cg: CallGraph, path: str | Path) -> None:
    Path(path).write_text(serialize_call_graph(cg), encoding="utf-8")


def load_call_graph(path: str | Path, model: ProgramModel) -> CallGraph:
    """Load a cached graph, rejecting caches from a different program."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        program_hash = raw["programHash"]
        nodes = frozenset(raw["nodes"])
        edges = frozenset((e[0], e[1], int(e[2])) for e in raw["edges"])
    except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
        raise StaleCacheError(f"unreadable call-graph cache {path}: {exc}") from exc
    if program_hash != model.content_hash:
        raise StaleCacheError(
            f"cache was computed from program {program_hash}, "
            f"current program is {model.content_hash}"
        )
    return CallGraph(nodes=nodes, edges=edges, program_hash=program_hash)


# --------------------------------------------------------------------------
# DOT export
# --------------------------------------------------------------------------

_STATUS_FILL = {
    "fully": "#2e7d32",
    "partially": "#a5d6a7",
    "uncovered": "#c62828",
}


def to_dot(collapsed: CollapsedGraph, coverage: dict[str, dict] | None = None) -> str:
    """DOT text for a collapsed graph, deterministically ordered.

    ``coverage`` optionally maps group id to a node-coverage dict (see
    ``coverage.node_coverage``) and drives fill colors.
    """
    lines = ["digraph event_call_graph {", "  rankdir=LR;"]
    lines.append(f'  "{START_NODE}" [label="start", shape=circle, style=bold];')
    for group in sorted(collapsed.nodes - {START_NODE}):
        attrs = [f'label="{group}"', "shape=box"]
        internal = collapsed.internal_calls.get(group, 0)
        if internal:
            attrs[0] = f'label="{group}\\n{internal} internal"'
        if coverage and group in coverage:
            fill = _STATUS_FILL.get(coverage[group]["status"])
            if fill:
                attrs.append(f'style=filled, fillcolor="{fill}"')
        lines.append(f'  "{group}" [{", ".join(attrs)}];')
    for group in sorted(collapsed.start_edges):
        count = collapsed.start_edges[group]
        label = f' [label="{count}"]' if count > 1 else ""
        lines.append(f'  "{START_NODE}" -> "{group}"{label};')
    for (ga, gb) in sorted(collapsed.edges):
        lines.append(f'  "{ga}" -> "{gb}" [label="{collapsed.edges[(ga, gb)]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
