"""Reading and writing `.edp` program documents and `.events` scripts.

The on-disk format is canonical structured text (see ``docs/program-format.md``
for the schema). ``parse_program`` returns a fully validated model with
global lines assigned and the content hash stamped; re-serializing and
re-parsing the result is a fixed point.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from . import canon
from .events import FiredEvent, validate_script_event
from .model import (
    BIN_OPS,
    BinOp,
    CallStmt,
    ClassDef,
    ExecStmt,
    Expr,
    IfStmt,
    Lit,
    MethodDef,
    Payload,
    ProgramModel,
    ReturnStmt,
    SetStmt,
    Stmt,
    Unit,
    ValidationError,
    VCallStmt,
    Var,
    Widget,
    render_expr,
    walk_stmts,
)

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class ProgramFormatError(Exception):
    """Malformed document; message carries the JSON position or field path."""


def _fail(path: str, message: str) -> "ProgramFormatError":
    return ProgramFormatError(f"{path}: {message}")


def _expect(d, path: str, key: str, types, default=_fail):
    if not isinstance(d, dict):
        raise _fail(path, f"expected an object, got {type(d).__name__}")
    if key not in d:
        if default is not _fail:
            return default
        raise _fail(path, f"missing required field {key!r}")
    value = d[key]
    if not isinstance(value, types) or (types is int and isinstance(value, bool)):
        raise _fail(f"{path}.{key}", f"expected {types}, got {type(value).__name__}")
    return value


# --------------------------------------------------------------------------
# Expressions and statements
# --------------------------------------------------------------------------


def _parse_expr(raw, path: str) -> Expr:
    if isinstance(raw, bool):
        raise _fail(path, "booleans are not expressions")
    if isinstance(raw, int):
        return Lit(raw)
    if isinstance(raw, str):
        if raw == "$payload":
            return Payload()
        if not _IDENT.match(raw):
            raise _fail(path, f"invalid variable name {raw!r}")
        return Var(raw)
    if isinstance(raw, dict):
        op = _expect(raw, path, "op", str)
        if op not in BIN_OPS:
            raise _fail(path, f"unknown operator {op!r}")
        lhs = _parse_expr(_expect(raw, path, "lhs", (int, str, dict)), f"{path}.lhs")
        rhs = _parse_expr(_expect(raw, path, "rhs", (int, str, dict)), f"{path}.rhs")
        return BinOp(op, lhs, rhs)
    raise _fail(path, f"cannot read an expression from {type(raw).__name__}")


def _expr_to_raw(expr: Expr):
    if isinstance(expr, Lit):
        return expr.value
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Payload):
        return "$payload"
    return {"op": expr.op, "lhs": _expr_to_raw(expr.lhs), "rhs": _expr_to_raw(expr.rhs)}


def _parse_stmt(raw, path: str) -> Stmt:
    kind = _expect(raw, path, "kind", str)
    if kind == "exec":
        return ExecStmt()
    if kind == "set":
        var = _expect(raw, path, "var", str)
        if not _IDENT.match(var):
            raise _fail(path, f"invalid variable name {var!r}")
        if "new" in raw:
            return SetStmt(var=var, new_class=_expect(raw, path, "new", str))
        return SetStmt(
            var=var,
            expr=_parse_expr(_expect(raw, path, "expr", (int, str, dict)), f"{path}.expr"),
        )
    if kind == "if":
        cond = _parse_expr(_expect(raw, path, "cond", (int, str, dict)), f"{path}.cond")
        then_body = _parse_body(_expect(raw, path, "then", list, default=[]), f"{path}.then")
        else_body = _parse_body(_expect(raw, path, "else", list, default=[]), f"{path}.else")
        return IfStmt(cond, then_body, else_body)
    if kind == "call":
        return CallStmt(target=_expect(raw, path, "target", str))
    if kind == "vcall":
        receiver = _expect(raw, path, "receiver", str)
        if not _IDENT.match(receiver):
            raise _fail(path, f"invalid receiver name {receiver!r}")
        return VCallStmt(
            declared_type=_expect(raw, path, "type", str),
            method=_expect(raw, path, "method", str),
            receiver=receiver,
        )
    if kind == "return":
        return ReturnStmt()
    raise _fail(path, f"unknown statement kind {kind!r}")


def _parse_body(raw: list, path: str) -> list[Stmt]:
    return [_parse_stmt(s, f"{path}[{i}]") for i, s in enumerate(raw)]


def _stmt_to_raw(stmt: Stmt) -> dict:
    if isinstance(stmt, ExecStmt):
        return {"kind": "exec"}
    if isinstance(stmt, SetStmt):
        if stmt.new_class is not None:
            return {"kind": "set", "var": stmt.var, "new": stmt.new_class}
        return {"kind": "set", "var": stmt.var, "expr": _expr_to_raw(stmt.expr)}
    if isinstance(stmt, IfStmt):
        out = {"kind": "if", "cond": _expr_to_raw(stmt.cond)}
        if stmt.then_body:
            out["then"] = [_stmt_to_raw(s) for s in stmt.then_body]
        if stmt.else_body:
            out["else"] = [_stmt_to_raw(s) for s in stmt.else_body]
        return out
    if isinstance(stmt, CallStmt):
        return {"kind": "call", "target": stmt.target}
    if isinstance(stmt, VCallStmt):
        return {
            "kind": "vcall",
            "type": stmt.declared_type,
            "method": stmt.method,
            "receiver": stmt.receiver,
        }
    return {"kind": "return"}


# --------------------------------------------------------------------------
# Widgets
# --------------------------------------------------------------------------


def _parse_widget(raw, path: str) -> Widget:
    wid = _expect(raw, path, "id", str)
    kind = _expect(raw, path, "kind", str)
    label = _expect(raw, path, "label", str, default="")
    handlers_raw = _expect(raw, path, "handlers", dict, default={})
    handlers: dict[str, list[str]] = {}
    for event_kind, ids in handlers_raw.items():
        if not isinstance(ids, list) or not all(isinstance(x, str) for x in ids):
            raise _fail(f"{path}.handlers.{event_kind}", "expected a list of method ids")
        handlers[event_kind] = list(ids)
    children_raw = _expect(raw, path, "children", list, default=[])
    children = [
        _parse_widget(c, f"{path}.children[{i}]") for i, c in enumerate(children_raw)
    ]
    return Widget(id=wid, kind=kind, label=label, children=children, handlers=handlers)


def _widget_to_raw(widget: Widget) -> dict:
    out: dict = {"id": widget.id, "kind": widget.kind}
    if widget.label:
        out["label"] = widget.label
    if widget.handlers:
        out["handlers"] = {k: list(v) for k, v in widget.handlers.items()}
    if widget.children:
        out["children"] = [_widget_to_raw(c) for c in widget.children]
    return out


# --------------------------------------------------------------------------
# Whole programs
# --------------------------------------------------------------------------


def parse_program(text: str) -> ProgramModel:
    """Parse, validate and line-number a program document."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProgramFormatError(
            f"line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    name = _expect(raw, "$", "name", str)
    main = _expect(raw, "$", "main", str)
    units_raw = _expect(raw, "$", "units", list)
    units: list[Unit] = []
    for i, u in enumerate(units_raw):
        upath = f"units[{i}]"
        classes_raw = _expect(u, upath, "classes", list, default=[])
        classes: list[ClassDef] = []
        for j, c in enumerate(classes_raw):
            cpath = f"{upath}.classes[{j}]"
            methods_raw = _expect(c, cpath, "methods", list, default=[])
            methods = []
            for k, m in enumerate(methods_raw):
                mpath = f"{cpath}.methods[{k}]"
                methods.append(
                    MethodDef(
                        name=_expect(m, mpath, "name", str),
                        body=_parse_body(
                            _expect(m, mpath, "body", list, default=[]), f"{mpath}.body"
                        ),
                    )
                )
            implements = _expect(c, cpath, "implements", list, default=[])
            if not all(isinstance(x, str) for x in implements):
                raise _fail(f"{cpath}.implements", "expected a list of interface ids")
            classes.append(
                ClassDef(
                    name=_expect(c, cpath, "name", str),
                    extends=_expect(c, cpath, "extends", (str, type(None)), default=None),
                    implements=tuple(implements),
                    methods=methods,
                )
            )
        units.append(
            Unit(
                name=_expect(u, upath, "name", str),
                is_library=bool(_expect(u, upath, "library", bool, default=False)),
                classes=classes,
            )
        )
    widget_root = _parse_widget(_expect(raw, "$", "widgets", dict), "widgets")
    model = ProgramModel(name=name, units=units, main=main, widget_root=widget_root)
    model.finalize()
    model.content_hash = canon.content_hash(serialize_program(model))
    return model


def serialize_program(model: ProgramModel) -> str:
    """Canonical form: key-sorted, 2-space indented, newline terminated."""
    raw = {
        "name": model.name,
        "main": model.main,
        "units": [
            {
                "name": u.name,
                "library": u.is_library,
                "classes": [
                    {
                        "name": c.name,
                        "extends": c.extends,
                        "implements": list(c.implements),
                        "methods": [
                            {"name": m.name, "body": [_stmt_to_raw(s) for s in m.body]}
                            for m in c.methods
                        ],
                    }
                    for c in u.classes
                ],
            }
            for u in model.units
        ],
        "widgets": _widget_to_raw(model.widget_root),
    }
    return canon.canonical_text(raw)


def load_program(path: str | Path) -> ProgramModel:
    return parse_program(Path(path).read_text(encoding="utf-8"))


def save_program(model: ProgramModel, path: str | Path) -> None:
    Path(path).write_text(serialize_program(model), encoding="utf-8")


# --------------------------------------------------------------------------
# Event scripts
# --------------------------------------------------------------------------


def parse_script(text: str) -> list[FiredEvent]:
    """An `.events` document: a list of {widget, kind, payload} entries."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProgramFormatError(
            f"line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, list):
        raise ProgramFormatError("$: expected a list of events")
    out: list[FiredEvent] = []
    for i, e in enumerate(raw):
        path = f"[{i}]"
        widget = _expect(e, path, "widget", str)
        kind = _expect(e, path, "kind", str)
        payload = _expect(e, path, "payload", int, default=0)
        event = FiredEvent(widget, kind, payload)
        try:
            validate_script_event(event)
        except ValueError as exc:
            raise _fail(path, str(exc))
        out.append(event)
    return out


def serialize_script(script: list[FiredEvent]) -> str:
    return canon.canonical_text([e.to_dict() for e in script])


def load_script(path: str | Path) -> list[FiredEvent]:
    return parse_script(Path(path).read_text(encoding="utf-8"))
