"""Independent brute-force oracles used to derive and check expected values.

Everything here works on the raw parsed JSON of a program document and
shares no code with the package under test: its own line numbering walk,
its own hierarchy tables, its own dispatch enumeration, its own reference
interpreter and its own coverage arithmetic over plain Python sets.
"""

from __future__ import annotations

# --------------------------------------------------------------------------
# Line numbering: standalone depth-first walk over the raw document
# --------------------------------------------------------------------------


class OStmt:
    """Oracle-side statement: raw dict fields plus its assigned global line."""

    __slots__ = ("kind", "raw", "line", "then_body", "else_body")

    def __init__(self, raw: dict, line: int):
        self.kind = raw["kind"]
        self.raw = raw
        self.line = line
        self.then_body: list[OStmt] = []
        self.else_body: list[OStmt] = []


def _number_body(raw_body: list, counter: list[int]) -> list[OStmt]:
    out = []
    for raw in raw_body:
        stmt = OStmt(raw, counter[0])
        counter[0] += 1
        if stmt.kind == "if":
            stmt.then_body = _number_body(raw.get("then", []), counter)
            stmt.else_body = _number_body(raw.get("else", []), counter)
        out.append(stmt)
    return out


class OracleProgram:
    """Raw document prepared for oracle computations."""

    def __init__(self, doc: dict):
        self.doc = doc
        self.bodies: dict[str, list[OStmt]] = {}
        self.lines: dict[str, list[int]] = {}  # method id -> its global lines
        self.extends: dict[str, str | None] = {}
        self.implements: dict[str, list[str]] = {}
        self.method_names: dict[str, list[str]] = {}  # class id -> declared names
        self.is_lib_class: dict[str, bool] = {}
        counter = [0]
        for unit in doc["units"]:
            lib = bool(unit.get("library", False))
            for cls in unit["classes"]:
                cid = f"{unit['name']}.{cls['name']}"
                self.extends[cid] = cls.get("extends")
                self.implements[cid] = list(cls.get("implements", []))
                self.method_names[cid] = [m["name"] for m in cls.get("methods", [])]
                self.is_lib_class[cid] = lib
                for m in cls.get("methods", []):
                    mid = f"{cid}.{m['name']}"
                    body = _number_body(m.get("body", []), counter)
                    self.bodies[mid] = body
                    self.lines[mid] = [s.line for s in _flatten(body)]
        self.total_lines = counter[0]
        self.app_lines = {
            line
            for mid, ls in self.lines.items()
            for line in ls
            if not self.is_lib_class[mid.rsplit(".", 1)[0]]
        }
        self.bindings: dict[tuple[str, str], list[str]] = {}
        self.widget_ids: set[str] = set()
        _walk_widgets(doc["widgets"], self.bindings, self.widget_ids)

    # hierarchy -------------------------------------------------------------

    def supertypes(self, cid: str) -> set[str]:
        out: set[str] = set()
        cur: str | None = cid
        while cur is not None:
            out.add(cur)
            out.update(self.implements[cur])
            cur = self.extends[cur]
        return out

    def resolve(self, cid: str, name: str) -> str | None:
        cur: str | None = cid
        while cur is not None:
            if name in self.method_names[cur]:
                return f"{cur}.{name}"
            cur = self.extends[cur]
        return None

    def dispatch_targets(self, declared: str, name: str) -> set[str]:
        """Every defining method over concrete classes conforming to declared."""
        out = set()
        for cid in self.extends:
            if declared in self.supertypes(cid):
                resolved = self.resolve(cid, name)
                if resolved is not None:
                    out.add(resolved)
        return out

    def is_app_method(self, mid: str) -> bool:
        return not self.is_lib_class[mid.rsplit(".", 1)[0]]


def _flatten(body: list[OStmt]):
    for stmt in body:
        yield stmt
        if stmt.kind == "if":
            yield from _flatten(stmt.then_body)
            yield from _flatten(stmt.else_body)


def _walk_widgets(raw: dict, bindings: dict, ids: set) -> None:
    ids.add(raw["id"])
    for kind, handlers in raw.get("handlers", {}).items():
        bindings[(raw["id"], kind)] = list(handlers)
    for child in raw.get("children", []):
        _walk_widgets(child, bindings, ids)


def oracle_line_map(doc: dict) -> dict[str, list[int]]:
    return OracleProgram(doc).lines


def oracle_total_app_lines(doc: dict) -> int:
    return len(OracleProgram(doc).app_lines)


# --------------------------------------------------------------------------
# Static analysis oracles
# --------------------------------------------------------------------------


def oracle_cha_edges(doc: dict) -> set[tuple[str, str, int]]:
    """Brute-force dispatch enumeration over the whole hierarchy."""
    prog = OracleProgram(doc)
    edges: set[tuple[str, str, int]] = set()
    for mid, body in prog.bodies.items():
        if not prog.is_app_method(mid):
            continue
        for stmt in _flatten(body):
            if stmt.kind == "call":
                unit_cls, name = stmt.raw["target"].rsplit(".", 1)
                target = prog.resolve(unit_cls, name)
                if target is not None and prog.is_app_method(target):
                    edges.add((mid, target, stmt.line))
            elif stmt.kind == "vcall":
                for target in prog.dispatch_targets(stmt.raw["type"], stmt.raw["method"]):
                    if prog.is_app_method(target):
                        edges.add((mid, target, stmt.line))
    return edges


def oracle_reachable(edges: set[tuple], roots: list[str]) -> set[str]:
    """Breadth-first closure over (caller, callee) pairs."""
    succ: dict[str, set[str]] = {}
    for e in edges:
        succ.setdefault(e[0], set()).add(e[1])
    seen: set[str] = set()
    frontier = list(roots)
    while frontier:
        node = frontier.pop(0)
        if node in seen:
            continue
        seen.add(node)
        frontier.extend(sorted(succ.get(node, ())))
    return seen


def oracle_event_universe(doc: dict, widget: str, kind: str) -> tuple[set[str], set[int]]:
    """(member methods, line universe) for an event, from first principles."""
    prog = OracleProgram(doc)
    handlers = prog.bindings.get((widget, kind), [])
    members = oracle_reachable(oracle_cha_edges(doc), list(handlers))
    members.update(handlers)
    universe = set()
    for mid in members:
        universe.update(prog.lines[mid])
    return members, universe


def oracle_collapse(
    edges: set[tuple], group_of
) -> tuple[dict[tuple[str, str], int], dict[str, int]]:
    """Brute-force grouping: (cross-group edge counts, internal counts)."""
    cross: dict[tuple[str, str], int] = {}
    internal: dict[str, int] = {}
    for e in edges:
        ga, gb = group_of(e[0]), group_of(e[1])
        if ga == gb:
            internal[ga] = internal.get(ga, 0) + 1
        else:
            cross[(ga, gb)] = cross.get((ga, gb), 0) + 1
    return cross, internal


# --------------------------------------------------------------------------
# Reference interpreter
# --------------------------------------------------------------------------

ORACLE_DEPTH_LIMIT = 512


class _OracleReturn(Exception):
    pass


class _OracleFault(Exception):
    pass


class OracleRun:
    """Replay of a session: per-event covered deltas, dynamic edges, faults."""

    def __init__(self, doc: dict):
        self.prog = OracleProgram(doc)
        self.variables: dict[str, int | str] = {}
        self.covered: set[int] = set()
        self.deltas: list[set[int]] = []
        self.errors: list[bool] = []
        self.handler_lists: list[list[str]] = []
        self.dynamic_edges: set[tuple[str, str]] = set()
        self._payload = 0
        main = doc["main"]
        self._dispatch_event([main], 0)

    def fire(self, widget: str, kind: str, payload: int) -> None:
        handlers = self.prog.bindings.get((widget, kind), [])
        self._dispatch_event(list(handlers), payload)

    def _dispatch_event(self, handlers: list[str], payload: int) -> None:
        before = set(self.covered)
        self._payload = payload
        faulted = False
        for h in handlers:
            try:
                self._run(h, 1)
            except _OracleFault:
                faulted = True
                break
        self.deltas.append(self.covered - before)
        self.errors.append(faulted)
        self.handler_lists.append(handlers)

    def _run(self, mid: str, depth: int) -> None:
        try:
            self._block(self.prog.bodies[mid], mid, depth)
        except _OracleReturn:
            pass

    def _block(self, body: list[OStmt], mid: str, depth: int) -> None:
        for stmt in body:
            if stmt.line in self.prog.app_lines:
                self.covered.add(stmt.line)
            kind = stmt.kind
            if kind == "exec":
                continue
            if kind == "set":
                if "new" in stmt.raw:
                    self.variables[stmt.raw["var"]] = stmt.raw["new"]
                else:
                    self.variables[stmt.raw["var"]] = self._eval(stmt.raw["expr"])
            elif kind == "if":
                taken = stmt.then_body if self._eval(stmt.raw["cond"]) != 0 else stmt.else_body
                self._block(taken, mid, depth)
            elif kind == "call":
                unit_cls, name = stmt.raw["target"].rsplit(".", 1)
                target = self.prog.resolve(unit_cls, name)
                self._enter(mid, target, depth)
            elif kind == "vcall":
                value = self.variables.get(stmt.raw["receiver"])
                if not isinstance(value, str):
                    raise _OracleFault()
                if stmt.raw["type"] not in self.prog.supertypes(value):
                    raise _OracleFault()
                target = self.prog.resolve(value, stmt.raw["method"])
                if target is None:
                    raise _OracleFault()
                self._enter(mid, target, depth)
            elif kind == "return":
                raise _OracleReturn()

    def _enter(self, caller: str, callee: str, depth: int) -> None:
        if depth >= ORACLE_DEPTH_LIMIT:
            raise _OracleFault()
        if self.prog.is_app_method(caller) and self.prog.is_app_method(callee):
            self.dynamic_edges.add((caller, callee))
        self._run(callee, depth + 1)

    def _eval(self, raw) -> int:
        if isinstance(raw, bool):
            raise TypeError("boolean in expression")
        if isinstance(raw, int):
            return raw
        if isinstance(raw, str):
            if raw == "$payload":
                return self._payload
            value = self.variables.get(raw, 0)
            return value if isinstance(value, int) else 0
        op, lhs, rhs = raw["op"], self._eval(raw["lhs"]), self._eval(raw["rhs"])
        if op == "+":
            return lhs + rhs
        if op == "-":
            return lhs - rhs
        if op == "==":
            return int(lhs == rhs)
        if op == "<":
            return int(lhs < rhs)
        return int(lhs > rhs)


def oracle_run(doc: dict, script: list[tuple[str, str, int]]) -> OracleRun:
    """Execute startup plus the script; unknown widgets are skipped."""
    run = OracleRun(doc)
    for widget, kind, payload in script:
        if widget in run.prog.widget_ids:
            run.fire(widget, kind, payload)
    return run


# --------------------------------------------------------------------------
# Coverage arithmetic (Definition-style, from scratch with sets)
# --------------------------------------------------------------------------


def oracle_ecg_coverage(deltas_so_far: list[set[int]], universe: set[int]) -> int:
    """Covered count of a universe against the union of all deltas so far."""
    covered: set[int] = set()
    for d in deltas_so_far:
        covered |= d
    return len(covered & universe)


def oracle_app_covered(deltas_prefix: list[set[int]]) -> int:
    covered: set[int] = set()
    for d in deltas_prefix:
        covered |= d
    return len(covered)
