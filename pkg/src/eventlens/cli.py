"""Command-line entry points.

    eventlens run    --program P.edp --script S.events --report DIR [...]
    eventlens graph  --program P.edp --cache OUT.cg
    eventlens serve  --program P.edp [--port N] [--tcp] [...]

Exit codes: 0 success, 2 usage or unreadable script, 3 program invalid,
4 runtime error during the script, 5 cache error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .callgraph import StaleCacheError, build_call_graph, load_call_graph, save_call_graph
from .coverage import FilterSpec
from .model import EVENT_KINDS, ValidationError
from .parser import ProgramFormatError, load_program, load_script

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PROGRAM_INVALID = 3
EXIT_RUNTIME_ERROR = 4
EXIT_CACHE_ERROR = 5


def _load_model(path: str):
    try:
        return load_program(path)
    except OSError as exc:
        print(f"eventlens: cannot read program: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_PROGRAM_INVALID)
    except (ProgramFormatError, ValidationError) as exc:
        print(f"eventlens: invalid program: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_PROGRAM_INVALID)


def _obtain_call_graph(model, cache: str | None, strict: bool):
    """Load the cache when fresh, otherwise build (and refresh the cache)."""
    if cache and Path(cache).exists():
        try:
            return load_call_graph(cache, model)
        except StaleCacheError as exc:
            if strict:
                print(f"eventlens: stale cache: {exc}", file=sys.stderr)
                raise SystemExit(EXIT_CACHE_ERROR)
            print(f"eventlens: rebuilding call graph ({exc})", file=sys.stderr)
    cg = build_call_graph(model)
    if cache:
        save_call_graph(cg, cache)
    return cg


def _parse_filters(args) -> FilterSpec:
    kinds = [k for k in (args.filter_kinds or "").split(",") if k]
    bad = [k for k in kinds if k not in EVENT_KINDS]
    if bad:
        print(f"eventlens: unknown event kinds {bad}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    return FilterSpec(
        hidden_kinds=frozenset(kinds),
        hide_non_contributing=args.hide_noncontributing,
    )


def cmd_run(args) -> int:
    from .interpreter import script_run
    from .report import write_report

    model = _load_model(args.program)
    try:
        script = load_script(args.script)
    except (OSError, ProgramFormatError) as exc:
        print(f"eventlens: cannot read script: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cg = _obtain_call_graph(model, args.cache, args.strict_cache)
    session = script_run(model, script, cg=cg)
    session.set_filters(_parse_filters(args))
    write_report(session, args.report, figures=not args.no_figures)
    for diagnostic in session.script_errors:
        print(f"eventlens: {diagnostic}", file=sys.stderr)
    flagged = [r.seq for r in session.records if r.error is not None]
    for seq in flagged:
        print(
            f"eventlens: event {seq} faulted: {session.records[seq].error}",
            file=sys.stderr,
        )
    final = session.metrics[-1]
    print(
        f"{model.name}: {len(session.records)} records, "
        f"{final.app_covered}/{final.app_total} application lines covered; "
        f"report in {args.report}"
    )
    if flagged or session.script_errors:
        return EXIT_RUNTIME_ERROR
    return EXIT_OK


def cmd_graph(args) -> int:
    model = _load_model(args.program)
    cg = build_call_graph(model)
    save_call_graph(cg, args.cache)
    print(f"{model.name}: {len(cg.nodes)} nodes, {len(cg.edges)} edges -> {args.cache}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    model = _load_model(args.program)
    cg = _obtain_call_graph(model, args.cache, args.strict_cache)
    ui_dir = Path(args.ui) if args.ui else Path("frontend") / "dist"
    app = create_app(
        model,
        cg,
        transport="tcp" if args.tcp else "inproc",
        agent_port=args.agent_port,
        ui_dir=ui_dir if ui_dir.is_dir() else None,
    )
    core = app.state.core
    link = f"tcp agent link on port {core.agent_port}" if args.tcp else "in-process agent link"
    print(f"serving {model.name} on http://127.0.0.1:{args.port} ({link})")
    try:
        uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")
    except OSError as exc:
        print(f"eventlens: cannot bind port {args.port}: {exc}", file=sys.stderr)
        return 1
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eventlens",
        description="Live call-graph and coverage tracing for modeled event-driven applications.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scripted session headlessly and write a report")
    run.add_argument("--program", required=True, help="program document (.edp)")
    run.add_argument("--script", required=True, help="event script (.events)")
    run.add_argument("--report", required=True, help="report output directory")
    run.add_argument("--cache", help="call-graph cache file (.cg) to load or create")
    run.add_argument(
        "--strict-cache",
        action="store_true",
        help="fail instead of rebuilding when the cache is stale",
    )
    run.add_argument("--filter-kinds", help="comma-separated event kinds to hide")
    run.add_argument(
        "--hide-noncontributing",
        action="store_true",
        help="hide events with an empty coverage delta",
    )
    run.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    run.set_defaults(func=cmd_run)

    graph = sub.add_parser("graph", help="build the static call graph and save the cache")
    graph.add_argument("--program", required=True)
    graph.add_argument("--cache", required=True, help="output cache file (.cg)")
    graph.set_defaults(func=cmd_graph)

    serve = sub.add_parser("serve", help="start the exploration service")
    serve.add_argument("--program", required=True)
    serve.add_argument("--port", type=int, default=4791)
    serve.add_argument("--cache", help="call-graph cache file (.cg) to load or create")
    serve.add_argument("--strict-cache", action="store_true")
    serve.add_argument(
        "--tcp",
        action="store_true",
        help="run the agent link over a localhost TCP socket instead of in-process",
    )
    serve.add_argument("--agent-port", type=int, default=4790)
    serve.add_argument("--ui", help="directory of built UI assets to serve at /")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
