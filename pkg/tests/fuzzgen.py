"""Seeded random program and script generator for the fuzz corpora.

Programs stay within the corpus bounds (at most 3 units, 5 classes per
unit, 50 methods, 30-event scripts) and are valid by construction. Call
sites only ever target methods created later in document order, so every
generated program terminates without recursion; runtime faults still occur
through unguarded vcall receivers, which is intentional corpus spice.
"""

from __future__ import annotations

import random

EVENT_KINDS = ("action", "selection", "focusGained", "focusLost", "mouseMoved", "valueChanged")
WIDGET_KINDS = ("window", "button", "menuItem", "checkbox", "textField", "panel")
VAR_POOL = ("a", "b", "c", "d", "state", "mode", "count", "recv0", "recv1")


class _Skeleton:
    def __init__(self) -> None:
        self.units: list[dict] = []
        self.class_ids: list[str] = []  # creation order
        self.extends: dict[str, str | None] = {}
        self.implements: dict[str, list[str]] = {}
        self.methods: list[tuple[str, str]] = []  # (class id, name), creation order
        self.method_index: dict[str, int] = {}  # defining method id -> order
        self.is_lib: dict[str, bool] = {}

    def resolve(self, cid: str, name: str) -> str | None:
        cur: str | None = cid
        while cur is not None:
            if (cur, name) in self._declared:
                return f"{cur}.{name}"
            cur = self.extends[cur]
        return None

    def finish(self) -> None:
        self._declared = set(self.methods)

    def supertypes(self, cid: str) -> set[str]:
        out: set[str] = set()
        cur: str | None = cid
        while cur is not None:
            out.add(cur)
            out.update(self.implements[cur])
            cur = self.extends[cur]
        return out


def _gen_expr(rng: random.Random, depth: int = 0):
    roll = rng.random()
    if depth >= 2 or roll < 0.35:
        return rng.randint(0, 3)
    if roll < 0.55:
        return rng.choice(VAR_POOL)
    if roll < 0.7:
        return "$payload"
    return {
        "op": rng.choice(("+", "-", "==", "<", ">")),
        "lhs": _gen_expr(rng, depth + 1),
        "rhs": _gen_expr(rng, depth + 1),
    }


def gen_program(rng: random.Random, max_methods: int = 24) -> dict:
    skel = _Skeleton()
    n_units = rng.randint(1, 3)
    has_lib = n_units > 1 and rng.random() < 0.35
    unit_names = [f"pkg{i}" if rng.random() < 0.7 else f"pkg{i}.sub" for i in range(n_units)]

    # Skeleton: units, classes, hierarchy, method names.
    budget = rng.randint(3, max_methods)
    interfaces_pool: list[str] = []
    for ui, uname in enumerate(unit_names):
        is_lib = has_lib and ui == n_units - 1
        unit = {"name": uname, "library": is_lib, "classes": []}
        skel.units.append(unit)
        for ci in range(rng.randint(1, 5)):
            cid = f"{uname}.C{ci}"
            extends = None
            # Library classes never extend app classes; app classes may extend
            # either, mostly their own side.
            candidates = [
                prev
                for prev in skel.class_ids
                if skel.is_lib[prev] == is_lib or (not is_lib and rng.random() < 0.1)
            ]
            if candidates and rng.random() < 0.35:
                extends = rng.choice(candidates)
            implements: list[str] = []
            if not is_lib and rng.random() < 0.4:
                if interfaces_pool and rng.random() < 0.6:
                    implements.append(rng.choice(interfaces_pool))
                else:
                    iface = f"{uname}.I{len(interfaces_pool)}"
                    interfaces_pool.append(iface)
                    implements.append(iface)
            skel.class_ids.append(cid)
            skel.extends[cid] = extends
            skel.implements[cid] = implements
            skel.is_lib[cid] = is_lib
            n_methods = rng.randint(1, 4)
            names = rng.sample([f"m{k}" for k in range(8)], n_methods)
            cls = {
                "name": f"C{ci}",
                "extends": extends,
                "implements": implements,
                "methods": [],
            }
            unit["classes"].append(cls)
            for name in names:
                if len(skel.methods) >= budget:
                    break
                skel.methods.append((cid, name))
                skel.method_index[f"{cid}.{name}"] = len(skel.methods) - 1
                cls["methods"].append({"name": name, "body": []})
            if len(skel.methods) >= budget:
                break
        if len(skel.methods) >= budget:
            break
    skel.finish()

    # Virtual-call candidates: (declared type, method name, concrete classes),
    # usable from call sites created before every resolver.
    vcall_candidates = []
    for cid in skel.class_ids:
        for sup in skel.supertypes(cid):
            for mcid, name in skel.methods:
                if mcid != cid:
                    continue
                resolvers = {
                    skel.resolve(other, name)
                    for other in skel.class_ids
                    if sup in skel.supertypes(other)
                }
                resolvers.discard(None)
                if resolvers:
                    min_idx = min(skel.method_index[r] for r in resolvers)
                    conformers = [
                        other
                        for other in skel.class_ids
                        if sup in skel.supertypes(other)
                        and skel.resolve(other, name) is not None
                    ]
                    vcall_candidates.append((sup, name, min_idx, conformers))

    def gen_body(rng: random.Random, my_index: int, is_lib: bool, depth: int, budget: int) -> list[dict]:
        kinds = ["exec", "set", "new", "return"]
        weights = [25, 20, 8, 5]
        if depth < 2:
            kinds.append("if")
            weights.append(15)
        if not is_lib:  # library bodies never contain calls
            kinds.extend(["call", "vcall"])
            weights.extend([16, 11])
        body: list[dict] = []
        for _ in range(rng.randint(0, budget)):
            kind = rng.choices(kinds, weights)[0]
            if kind == "exec":
                body.append({"kind": "exec"})
            elif kind == "set":
                body.append({"kind": "set", "var": rng.choice(VAR_POOL), "expr": _gen_expr(rng)})
            elif kind == "new":
                body.append({"kind": "set", "var": rng.choice(VAR_POOL), "new": rng.choice(skel.class_ids)})
            elif kind == "if":
                body.append(
                    {
                        "kind": "if",
                        "cond": _gen_expr(rng),
                        "then": gen_body(rng, my_index, is_lib, depth + 1, 2),
                        "else": gen_body(rng, my_index, is_lib, depth + 1, 2),
                    }
                )
            elif kind == "call":
                later = [m for m in skel.methods if skel.method_index[f"{m[0]}.{m[1]}"] > my_index]
                if later:
                    tcid, tname = rng.choice(later)
                    body.append({"kind": "call", "target": f"{tcid}.{tname}"})
                else:
                    body.append({"kind": "exec"})
            elif kind == "vcall":
                usable = [c for c in vcall_candidates if c[2] > my_index]
                if usable:
                    declared, name, _, conformers = rng.choice(usable)
                    receiver = rng.choice(("recv0", "recv1"))
                    if rng.random() < 0.9:  # guarded receiver; 10% may fault
                        body.append(
                            {"kind": "set", "var": receiver, "new": rng.choice(conformers)}
                        )
                    body.append(
                        {"kind": "vcall", "type": declared, "method": name, "receiver": receiver}
                    )
                else:
                    body.append({"kind": "exec"})
            else:
                body.append({"kind": "return"})
        return body

    for unit in skel.units:
        is_lib = unit["library"]
        for cls in unit["classes"]:
            cid = f"{unit['name']}.{cls['name']}"
            for m in cls["methods"]:
                idx = skel.method_index[f"{cid}.{m['name']}"]
                m["body"] = gen_body(rng, idx, is_lib, 0, rng.randint(1, 6))

    app_methods = [f"{cid}.{n}" for cid, n in skel.methods if not skel.is_lib[cid]]

    # Widget tree: a window root with a flat-ish set of children.
    widgets = {"id": "root", "kind": "window", "label": "Root", "children": []}
    widget_ids = ["root"]
    for i in range(rng.randint(1, 7)):
        w = {"id": f"w{i}", "kind": rng.choice(WIDGET_KINDS[1:]), "label": f"W{i}"}
        handlers = {}
        for kind in rng.sample(EVENT_KINDS, rng.randint(0, 2)):
            handlers[kind] = rng.sample(app_methods, min(len(app_methods), rng.randint(1, 2)))
        if handlers:
            w["handlers"] = handlers
        parent = widgets["children"]
        if parent and rng.random() < 0.3:
            parent = rng.choice(parent).setdefault("children", [])
        parent.append(w)
        widget_ids.append(w["id"])

    return {
        "name": f"fuzz-{rng.randrange(1 << 30)}",
        "main": rng.choice(app_methods),
        "units": skel.units,
        "widgets": widgets,
    }


def gen_script(rng: random.Random, doc: dict, max_events: int = 30) -> list[tuple[str, str, int]]:
    widget_ids: list[str] = []
    bound: list[tuple[str, str]] = []

    def walk(w: dict) -> None:
        widget_ids.append(w["id"])
        for kind in w.get("handlers", {}):
            bound.append((w["id"], kind))
        for c in w.get("children", []):
            walk(c)

    walk(doc["widgets"])
    script = []
    for _ in range(rng.randint(0, max_events)):
        if bound and rng.random() < 0.75:
            widget, kind = rng.choice(bound)
        else:
            widget, kind = rng.choice(widget_ids), rng.choice(EVENT_KINDS)
        script.append((widget, kind, rng.randint(0, 3)))
    return script


def corpus(seed: int, count: int, max_methods: int = 24, max_events: int = 30):
    """Deterministic stream of (doc, script) pairs."""
    rng = random.Random(seed)
    for _ in range(count):
        doc = gen_program(rng, max_methods=max_methods)
        yield doc, gen_script(rng, doc, max_events=max_events)
