"""Closed-world model of an event-driven application.

A program is a tree of units (packages), classes, methods and statements,
plus a widget tree whose handler bindings connect GUI events to methods.
Statements in the tiny modeled language are the unit of coverage: each one
owns exactly one global line index, assigned densely over the whole
document in a deterministic depth-first order.

Identifiers are dotted: a unit is ``a.b``, a class ``a.b.C`` and a method
``a.b.C.m``. Class and method names contain no dots, so splitting a method
id from the right is unambiguous.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

EVENT_KINDS = (
    "action",
    "selection",
    "focusGained",
    "focusLost",
    "mouseMoved",
    "valueChanged",
)

WIDGET_KINDS = ("window", "button", "menuItem", "checkbox", "textField", "panel")

# Pseudo-kind of the record emitted after main() ran; never a binding key.
STARTUP_KIND = "startup"

BIN_OPS = ("+", "-", "==", "<", ">")

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_UNIT_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*$")
_WIDGET_ID = re.compile(r"^[A-Za-z_][A-Za-z0-9_.-]*$")


class ValidationError(Exception):
    """A structurally well-formed document that violates a model invariant."""


# --------------------------------------------------------------------------
# Expressions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Payload:
    """Reference to the payload of the event currently being handled."""


@dataclass(frozen=True)
class BinOp:
    op: str
    lhs: "Expr"
    rhs: "Expr"


Expr = Lit | Var | Payload | BinOp


def render_expr(expr: Expr) -> str:
    if isinstance(expr, Lit):
        return str(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Payload):
        return "$payload"
    return f"({render_expr(expr.lhs)} {expr.op} {render_expr(expr.rhs)})"


# --------------------------------------------------------------------------
# Statements
# --------------------------------------------------------------------------


@dataclass
class ExecStmt:
    line: int = -1


@dataclass
class SetStmt:
    var: str
    expr: Expr | None = None
    new_class: str | None = None  # exactly one of expr / new_class is set
    line: int = -1


@dataclass
class IfStmt:
    cond: Expr
    then_body: list["Stmt"] = field(default_factory=list)
    else_body: list["Stmt"] = field(default_factory=list)
    line: int = -1


@dataclass
class CallStmt:
    target: str  # method id as written
    resolved: str = ""  # defining class's method id, filled by validation
    line: int = -1


@dataclass
class VCallStmt:
    declared_type: str  # class or interface id
    method: str
    receiver: str
    line: int = -1


@dataclass
class ReturnStmt:
    line: int = -1


Stmt = ExecStmt | SetStmt | IfStmt | CallStmt | VCallStmt | ReturnStmt


def render_stmt(stmt: Stmt) -> str:
    """One-line source text for the statement itself (bodies excluded)."""
    if isinstance(stmt, ExecStmt):
        return "exec"
    if isinstance(stmt, SetStmt):
        if stmt.new_class is not None:
            return f"set {stmt.var} = new {stmt.new_class}"
        return f"set {stmt.var} = {render_expr(stmt.expr)}"
    if isinstance(stmt, IfStmt):
        return f"if {render_expr(stmt.cond)}:"
    if isinstance(stmt, CallStmt):
        return f"call {stmt.target}"
    if isinstance(stmt, VCallStmt):
        return f"vcall {stmt.receiver}.{stmt.method}: {stmt.declared_type}"
    return "return"


def walk_stmts(body: list[Stmt]):
    """Depth-first pre-order over a statement list, descending into ifs."""
    for stmt in body:
        yield stmt
        if isinstance(stmt, IfStmt):
            yield from walk_stmts(stmt.then_body)
            yield from walk_stmts(stmt.else_body)


# --------------------------------------------------------------------------
# Declarations
# --------------------------------------------------------------------------


@dataclass
class MethodDef:
    name: str
    body: list[Stmt] = field(default_factory=list)
    line_span: tuple[int, int] | None = None  # inclusive; None for empty body


@dataclass
class ClassDef:
    name: str
    extends: str | None = None
    implements: tuple[str, ...] = ()
    methods: list[MethodDef] = field(default_factory=list)


@dataclass
class Unit:
    name: str
    is_library: bool = False
    classes: list[ClassDef] = field(default_factory=list)


@dataclass
class Widget:
    id: str
    kind: str
    label: str = ""
    children: list["Widget"] = field(default_factory=list)
    handlers: dict[str, list[str]] = field(default_factory=dict)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "label": self.label,
            "children": [c.to_dict() for c in self.children],
            "handlers": {k: list(v) for k, v in self.handlers.items()},
        }


def method_id(unit: str, cls: str, method: str) -> str:
    return f"{unit}.{cls}.{method}"


def split_method_id(mid: str) -> tuple[str, str, str]:
    unit, cls, name = mid.rsplit(".", 2)
    return unit, cls, name


def class_of_method(mid: str) -> str:
    return mid.rsplit(".", 1)[0]


def unit_of_method(mid: str) -> str:
    return mid.rsplit(".", 2)[0]


# --------------------------------------------------------------------------
# The validated program
# --------------------------------------------------------------------------


class ProgramModel:
    """A validated program. Immutable once built; share freely across readers.

    Use :func:`eventlens.parser.parse_program` to obtain one; the constructor
    plus :meth:`finalize` are the internal path the parser follows.
    """

    def __init__(self, name: str, units: list[Unit], main: str, widget_root: Widget):
        self.name = name
        self.units = units
        self.main = main
        self.widget_root = widget_root

        # Derived tables, filled by finalize().
        self.total_lines = 0
        self.total_app_lines = 0
        self.content_hash = ""
        self.app_line_mask = 0
        self.methods: dict[str, MethodDef] = {}
        self.classes: dict[str, ClassDef] = {}
        self.unit_of: dict[str, Unit] = {}  # class id -> owning unit
        self.widgets: dict[str, Widget] = {}
        self.bindings: dict[tuple[str, str], tuple[str, ...]] = {}
        self.interfaces: set[str] = set()
        self._supertypes: dict[str, frozenset[str]] = {}
        self._resolve_cache: dict[tuple[str, str], str | None] = {}

    # -- construction ------------------------------------------------------

    def finalize(self) -> "ProgramModel":
        """Validate, assign global lines and freeze derived tables."""
        self._index()
        self._check_hierarchy()
        self._check_references()
        assign_lines(self)
        self._index_lines()
        self._check_widgets()
        # content_hash is stamped by the parser from the canonical text.
        return self

    def _index(self) -> None:
        seen_units: set[str] = set()
        for unit in self.units:
            if not _UNIT_NAME.match(unit.name):
                raise ValidationError(f"invalid unit name {unit.name!r}")
            if unit.name in seen_units:
                raise ValidationError(f"duplicate unit name {unit.name!r}")
            seen_units.add(unit.name)
            for cls in unit.classes:
                if not _IDENT.match(cls.name):
                    raise ValidationError(f"invalid class name {cls.name!r}")
                cid = f"{unit.name}.{cls.name}"
                if cid in self.classes:
                    raise ValidationError(f"duplicate class {cid}")
                self.classes[cid] = cls
                self.unit_of[cid] = unit
                names: set[str] = set()
                for m in cls.methods:
                    if not _IDENT.match(m.name):
                        raise ValidationError(f"invalid method name {m.name!r}")
                    if m.name in names:
                        raise ValidationError(f"{cid} declares method {m.name!r} twice")
                    names.add(m.name)
                    self.methods[method_id(unit.name, cls.name, m.name)] = m
                self.interfaces.update(cls.implements)
        overlap = self.interfaces & set(self.classes)
        if overlap:
            raise ValidationError(
                f"name used as both class and interface: {sorted(overlap)[0]}"
            )

    def _check_hierarchy(self) -> None:
        # extends must resolve, and the extends graph must be acyclic
        for cid, cls in self.classes.items():
            if cls.extends is not None and cls.extends not in self.classes:
                raise ValidationError(f"{cid} extends unknown class {cls.extends}")
        for cid in self.classes:
            seen = {cid}
            cur = self.classes[cid].extends
            while cur is not None:
                if cur in seen:
                    raise ValidationError(f"inheritance cycle through {cur}")
                seen.add(cur)
                cur = self.classes[cur].extends
        # supertype closure: ancestor classes plus interfaces they implement
        for cid in self.classes:
            closure: set[str] = set()
            cur: str | None = cid
            while cur is not None:
                closure.add(cur)
                closure.update(self.classes[cur].implements)
                cur = self.classes[cur].extends
            self._supertypes[cid] = frozenset(closure)

    def _check_references(self) -> None:
        main_cls = class_of_method(self.main)
        if self.main not in self.methods:
            raise ValidationError(f"main method {self.main} does not exist")
        if self.unit_of[main_cls].is_library:
            raise ValidationError(f"main method {self.main} lives in a library unit")
        for cid, cls in self.classes.items():
            in_library = self.unit_of[cid].is_library
            for m in cls.methods:
                for stmt in walk_stmts(m.body):
                    self._check_stmt(cid, m, stmt, in_library)

    def _check_stmt(self, cid: str, m: MethodDef, stmt: Stmt, in_library: bool) -> None:
        where = f"{cid}.{m.name}"
        if isinstance(stmt, (CallStmt, VCallStmt)) and in_library:
            raise ValidationError(f"library method {where} contains a call statement")
        if isinstance(stmt, CallStmt):
            try:
                tunit, tcls, tname = split_method_id(stmt.target)
            except ValueError:
                raise ValidationError(f"{where}: malformed call target {stmt.target!r}")
            tcid = f"{tunit}.{tcls}"
            if tcid not in self.classes:
                raise ValidationError(f"{where}: call target class {tcid} does not exist")
            resolved = self.resolve_method(tcid, tname)
            if resolved is None:
                raise ValidationError(
                    f"{where}: call target {stmt.target} does not resolve"
                )
            stmt.resolved = resolved
        elif isinstance(stmt, VCallStmt):
            t = stmt.declared_type
            if t not in self.classes and t not in self.interfaces:
                raise ValidationError(
                    f"{where}: unresolvable vcall: unknown type {t}"
                )
            if not self.cha_resolvers(t, stmt.method):
                raise ValidationError(
                    f"{where}: unresolvable vcall: no concrete {t} resolves "
                    f"{stmt.method!r}"
                )
        elif isinstance(stmt, SetStmt):
            if (stmt.expr is None) == (stmt.new_class is None):
                raise ValidationError(f"{where}: set needs exactly one of expr/new")
            if stmt.new_class is not None and stmt.new_class not in self.classes:
                raise ValidationError(
                    f"{where}: new references unknown class {stmt.new_class}"
                )

    def _index_lines(self) -> None:
        mask = 0
        count = 0
        for unit in self.units:
            if unit.is_library:
                continue
            for cls in unit.classes:
                for m in cls.methods:
                    if m.line_span is not None:
                        first, last = m.line_span
                        mask |= ((1 << (last + 1)) - (1 << first))
                        count += last - first + 1
        self.app_line_mask = mask
        self.total_app_lines = count

    def _check_widgets(self) -> None:
        for widget in self.widget_root.walk():
            if not _WIDGET_ID.match(widget.id):
                raise ValidationError(f"invalid widget id {widget.id!r}")
            if widget.kind not in WIDGET_KINDS:
                raise ValidationError(f"widget {widget.id}: unknown kind {widget.kind!r}")
            if widget.id in self.widgets:
                raise ValidationError(f"duplicate widget id {widget.id!r}")
            self.widgets[widget.id] = widget
            for kind, handler_list in widget.handlers.items():
                if kind not in EVENT_KINDS:
                    raise ValidationError(
                        f"widget {widget.id}: unknown event kind {kind!r}"
                    )
                seen: set[str] = set()
                for mid in handler_list:
                    if mid not in self.methods:
                        raise ValidationError(
                            f"widget {widget.id}: handler {mid} does not exist"
                        )
                    if self.unit_of[class_of_method(mid)].is_library:
                        raise ValidationError(
                            f"widget {widget.id}: handler {mid} lives in a library unit"
                        )
                    if mid in seen:
                        raise ValidationError(
                            f"widget {widget.id}: handler {mid} bound twice to {kind}"
                        )
                    seen.add(mid)
                self.bindings[(widget.id, kind)] = tuple(handler_list)

    # -- queries -----------------------------------------------------------

    def is_app_method(self, mid: str) -> bool:
        return not self.unit_of[class_of_method(mid)].is_library

    def supertypes(self, cid: str) -> frozenset[str]:
        """Class ids and interface ids that *cid* conforms to, self included."""
        return self._supertypes[cid]

    def is_subtype(self, cid: str, type_id: str) -> bool:
        return type_id in self._supertypes[cid]

    def resolve_method(self, cid: str, name: str) -> str | None:
        """Defining class's method id for *name* looked up from *cid*."""
        key = (cid, name)
        if key in self._resolve_cache:
            return self._resolve_cache[key]
        cur: str | None = cid
        found = None
        while cur is not None:
            cls = self.classes[cur]
            if any(m.name == name for m in cls.methods):
                found = f"{cur}.{name}"
                break
            cur = cls.extends
        self._resolve_cache[key] = found
        return found

    def cha_resolvers(self, type_id: str, name: str) -> tuple[str, ...]:
        """Defining method ids over every concrete class conforming to *type_id*.

        Sorted and deduplicated; the class-hierarchy dispatch set for a
        virtual call site, before library exclusion.
        """
        out: set[str] = set()
        for cid in self.classes:
            if type_id in self._supertypes[cid]:
                resolved = self.resolve_method(cid, name)
                if resolved is not None:
                    out.add(resolved)
        return tuple(sorted(out))

    def method_mask(self, mid: str) -> int:
        span = self.methods[mid].line_span
        if span is None:
            return 0
        first, last = span
        return (1 << (last + 1)) - (1 << first)

    def class_lines(self, cid: str) -> tuple[int, ...]:
        cls = self.classes[cid]
        lines: list[int] = []
        for m in cls.methods:
            if m.line_span is not None:
                lines.extend(range(m.line_span[0], m.line_span[1] + 1))
        return tuple(sorted(lines))

    def handlers_for(self, widget_id: str, kind: str) -> tuple[str, ...]:
        return self.bindings.get((widget_id, kind), ())


def assign_lines(model: ProgramModel) -> ProgramModel:
    """Assign dense global line indices in deterministic document order.

    Units, classes and methods in document order; statements in depth-first
    pre-order (an if's condition line precedes its then-body, which precedes
    its else-body). Every statement, library ones included, owns one index.
    """
    next_line = 0
    for unit in model.units:
        for cls in unit.classes:
            for m in cls.methods:
                first = next_line
                for stmt in walk_stmts(m.body):
                    stmt.line = next_line
                    next_line += 1
                m.line_span = (first, next_line - 1) if next_line > first else None
    model.total_lines = next_line
    return model


def source_rows(model: ProgramModel, cid: str) -> list[tuple[int | None, str]]:
    """Rendered listing of a class: (global line or None, text) per row.

    Rows with a line index are coverable statements; rows without one are
    structural decoration (class/method headers, else markers).
    """
    cls = model.classes.get(cid)
    if cls is None:
        raise KeyError(cid)
    rows: list[tuple[int | None, str]] = [(None, f"class {cls.name}:")]

    def emit(body: list[Stmt], depth: int) -> None:
        pad = "  " * depth
        for stmt in body:
            rows.append((stmt.line, pad + render_stmt(stmt)))
            if isinstance(stmt, IfStmt):
                emit(stmt.then_body, depth + 1)
                if stmt.else_body:
                    rows.append((None, pad + "else:"))
                    emit(stmt.else_body, depth + 1)

    for m in cls.methods:
        rows.append((None, f"  method {m.name}:"))
        emit(m.body, 2)
    return rows
