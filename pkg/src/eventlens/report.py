"""Session report export.

A report directory holds the canonical session document, a delimited
per-event metrics table, one DOT graph per handled event and a pair of
rendered coverage figures:

    report.json   canonical structured text (byte-deterministic)
    events.csv    one row per record (byte-deterministic)
    graphs/event-NNNN.dot
    figures/app_coverage.png
    figures/event_coverage.png

Timestamps are deliberately absent from report.json and events.csv so that
two runs over equal inputs produce identical bytes; figures are for humans
and carry no determinism promise.
"""

from __future__ import annotations

import csv
from pathlib import Path

from . import canon
from .callgraph import collapse, to_dot
from .coverage import TraceSession
from .events import is_startup
from .wire import lines_to_ranges


def report_document(session: TraceSession) -> dict:
    """The session report as a plain dict in canonical field layout."""
    events = []
    for record, metrics in zip(session.records, session.metrics):
        events.append(
            {
                "seq": record.seq,
                "kind": record.event.kind,
                "widget": record.event.widget,
                "payload": record.event.payload,
                "handlers": list(record.handlers),
                "error": record.error,
                "delta": list(record.coverage_delta),
                "appCovered": metrics.app_covered,
                "appTotal": metrics.app_total,
                "ecgCovered": metrics.ecg_covered,
                "ecgTotal": metrics.ecg_total,
            }
        )
    return {
        "program": {
            "name": session.model.name,
            "programHash": session.model.content_hash,
            "totalLines": session.model.total_lines,
            "totalAppLines": session.model.total_app_lines,
        },
        "callGraph": {
            "nodes": len(session.cg.nodes),
            "edges": len(session.cg.edges),
        },
        "filters": session.filters.to_dict(),
        "visibleSeqs": session.filtered_view(),
        "scriptErrors": list(session.script_errors),
        "finalCoverage": {
            "appCovered": session.cumulative.covered_count,
            "appTotal": session.model.total_app_lines,
            "coveredRanges": [list(r) for r in lines_to_ranges(_bits(session))],
        },
        "events": events,
    }


def _bits(session: TraceSession) -> list[int]:
    mask = session.cumulative.bits
    out = []
    line = 0
    while mask:
        if mask & 1:
            out.append(line)
        mask >>= 1
        line += 1
    return out


def write_report(session: TraceSession, report_dir: str | Path, figures: bool = True) -> None:
    out = Path(report_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(
        canon.canonical_text(report_document(session)), encoding="utf-8"
    )
    _write_csv(session, out / "events.csv")
    _write_dots(session, out / "graphs")
    if figures:
        _write_figures(session, out / "figures")


def _write_csv(session: TraceSession, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "seq",
                "kind",
                "widget",
                "payload",
                "handlerCount",
                "deltaSize",
                "appCovered",
                "appTotal",
                "ecgCovered",
                "ecgTotal",
                "error",
            ]
        )
        for record, metrics in zip(session.records, session.metrics):
            writer.writerow(
                [
                    record.seq,
                    record.event.kind,
                    record.event.widget or "",
                    record.event.payload,
                    len(record.handlers),
                    len(record.coverage_delta),
                    metrics.app_covered,
                    metrics.app_total,
                    metrics.ecg_covered,
                    metrics.ecg_total,
                    record.error or "",
                ]
            )


def _write_dots(session: TraceSession, graph_dir: Path) -> None:
    graph_dir.mkdir(parents=True, exist_ok=True)
    for record in session.records:
        ecg = session.ecg_for(record.seq)
        if ecg is None:  # startup and handler-less events have no graph
            continue
        collapsed = collapse(ecg, "method")
        coverage = session.node_coverage(collapsed, record.seq)
        path = graph_dir / f"event-{record.seq:04d}.dot"
        path.write_text(to_dot(collapsed, coverage), encoding="utf-8")


def _write_figures(session: TraceSession, fig_dir: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig_dir.mkdir(parents=True, exist_ok=True)
    seqs = [m.seq for m in session.metrics]
    covered = [m.app_covered for m in session.metrics]
    total = session.model.total_app_lines

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.step(seqs, covered, where="post", marker="o", label="covered lines")
    ax.axhline(total, linestyle="--", linewidth=1, label=f"application total ({total})")
    ax.set_xlabel("event seq")
    ax.set_ylabel("application lines covered")
    ax.set_title("Cumulative application line coverage")
    ax.set_xticks(seqs)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(fig_dir / "app_coverage.png", dpi=110)
    plt.close(fig)

    with_universe = [m for m in session.metrics if m.ecg_total > 0]
    fig, ax = plt.subplots(figsize=(7, max(2.5, 0.5 * len(with_universe) + 1.5)))
    if with_universe:
        ys = range(len(with_universe))
        ax.barh(ys, [m.ecg_total for m in with_universe], color="#e0e0e0", label="universe")
        ax.barh(ys, [m.ecg_covered for m in with_universe], color="#2e7d32", label="covered")
        ax.set_yticks(list(ys))
        ax.set_yticklabels([f"event {m.seq}" for m in with_universe])
        ax.invert_yaxis()
        ax.legend(loc="lower right")
    ax.set_xlabel("lines in event call graph")
    ax.set_title("Per-event call-graph coverage")
    fig.tight_layout()
    fig.savefig(fig_dir / "event_coverage.png", dpi=110)
    plt.close(fig)
