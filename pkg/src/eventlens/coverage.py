"""Host-side coverage analytics over a stream of event records.

Tracks cumulative application line coverage, attributes first-covered lines
to the event that ran them, and maintains each event's call-graph coverage
live: when a later event runs code inside an earlier event's line universe,
the earlier event's covered count goes up (the sequence-so-far reading of
call-graph coverage). Application totals count non-library lines only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .callgraph import CallGraph, CollapsedGraph, EventCallGraph, event_call_graph
from .events import EventRecord, is_startup
from .model import ProgramModel


class SeqOrderError(Exception):
    """Record arrived out of order."""


@dataclass(frozen=True)
class FilterSpec:
    hidden_kinds: frozenset[str] = frozenset()
    hide_non_contributing: bool = False

    def to_dict(self) -> dict:
        return {
            "hiddenKinds": sorted(self.hidden_kinds),
            "hideNonContributing": self.hide_non_contributing,
        }

    @staticmethod
    def from_dict(d: dict) -> "FilterSpec":
        return FilterSpec(
            hidden_kinds=frozenset(d.get("hiddenKinds", ())),
            hide_non_contributing=bool(d.get("hideNonContributing", False)),
        )


class CoverageState:
    """Monotone bitmap over global line indices of application lines."""

    def __init__(self) -> None:
        self.bits = 0
        self.covered_count = 0

    def update(self, mask: int) -> None:
        self.bits |= mask
        self.covered_count = self.bits.bit_count()


@dataclass
class EventMetrics:
    """Coverage numbers for one record; ``ecg_covered`` is live-updated."""

    seq: int
    app_covered: int  # cumulative app lines up to and including this event
    app_total: int
    ecg_covered: int  # covered lines of this event's universe, sequence so far
    ecg_total: int
    first_covered: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "appCovered": self.app_covered,
            "appTotal": self.app_total,
            "ecgCovered": self.ecg_covered,
            "ecgTotal": self.ecg_total,
            "firstCovered": list(self.first_covered),
        }


class TraceSession:
    """Ordered records plus live metrics for one program run."""

    def __init__(self, model: ProgramModel, cg: CallGraph):
        self.model = model
        self.cg = cg
        self.records: list[EventRecord] = []
        self.metrics: list[EventMetrics] = []
        self.cumulative = CoverageState()
        self.filters = FilterSpec()
        self.version = 0
        self.script_errors: list[str] = []
        self.dynamic_edges: set[tuple[str, str]] = set()  # filled by the runner
        self._universe_masks: list[int] = []
        self._universe_totals: list[int] = []
        self._delta_masks: list[int] = []
        self._prefix_masks: list[int] = []
        self._ecg_cache: dict[tuple[str, str], EventCallGraph] = {}

    # -- ingestion ---------------------------------------------------------

    def ingest(self, record: EventRecord) -> list[tuple[int, int]]:
        """Fold one record in; returns (seq, ecg_covered) retroactive updates."""
        if record.seq != len(self.records):
            raise SeqOrderError(
                f"expected seq {len(self.records)}, got {record.seq}"
            )
        delta_mask = 0
        for line in record.coverage_delta:
            delta_mask |= 1 << line
        if delta_mask & self.cumulative.bits:
            raise ValueError(f"record {record.seq}: delta overlaps prior coverage")

        universe_mask, universe_total = self._universe_of(record)

        improvements: list[tuple[int, int]] = []
        if delta_mask:
            for idx, prior_mask in enumerate(self._universe_masks):
                gained = (delta_mask & prior_mask).bit_count()
                if gained:
                    self.metrics[idx].ecg_covered += gained
                    improvements.append((idx, self.metrics[idx].ecg_covered))

        self.cumulative.update(delta_mask)
        self.records.append(record)
        self._delta_masks.append(delta_mask)
        self._prefix_masks.append(self.cumulative.bits)
        self._universe_masks.append(universe_mask)
        self._universe_totals.append(universe_total)
        self.metrics.append(
            EventMetrics(
                seq=record.seq,
                app_covered=self.cumulative.covered_count,
                app_total=self.model.total_app_lines,
                ecg_covered=(self.cumulative.bits & universe_mask).bit_count(),
                ecg_total=universe_total,
                first_covered=record.coverage_delta,
            )
        )
        self.version += 1
        return improvements

    def _universe_of(self, record: EventRecord) -> tuple[int, int]:
        # The startup pseudo-event and handler-less events have an empty
        # universe; their ratio is undefined and shown as n/a.
        if is_startup(record) or not record.handlers:
            return 0, 0
        key = (record.event.widget, record.event.kind)
        ecg = self._ecg_cache.get(key)
        if ecg is None:
            ecg = event_call_graph(self.cg, self.model, *key)
            self._ecg_cache[key] = ecg
        return ecg.universe_mask(), len(ecg.line_universe)

    def ecg_for(self, seq: int) -> EventCallGraph | None:
        """The event call graph behind a record, None for empty universes."""
        record = self._record(seq)
        if is_startup(record) or not record.handlers:
            return None
        key = (record.event.widget, record.event.kind)
        return self._ecg_cache[key]

    # -- queries -----------------------------------------------------------

    def _record(self, seq: int) -> EventRecord:
        if not 0 <= seq < len(self.records):
            raise KeyError(f"unknown seq {seq}")
        return self.records[seq]

    def event_cg_coverage(self, seq: int) -> tuple[int, int]:
        """(covered, total) for the event's line universe, sequence so far."""
        self._record(seq)
        m = self.metrics[seq]
        return m.ecg_covered, m.ecg_total

    def first_covered(self, seq: int) -> tuple[int, ...]:
        return self._record(seq).coverage_delta

    def filtered_view(self, filters: FilterSpec | None = None) -> list[int]:
        """Visible seqs under the given (or current) filters; records are
        never dropped, only hidden."""
        active = self.filters if filters is None else filters
        out = []
        for record in self.records:
            if record.event.kind in active.hidden_kinds:
                continue
            if (
                active.hide_non_contributing
                and not record.coverage_delta
                and not is_startup(record)
            ):
                continue
            out.append(record.seq)
        return out

    def set_filters(self, filters: FilterSpec) -> None:
        self.filters = filters
        self.version += 1

    def source_annotation(self, cid: str, selected_seq: int) -> list[tuple[int, str]]:
        """(line, status) for each statement line of the class, judged against
        coverage up to and including ``selected_seq``."""
        self._record(selected_seq)
        if cid not in self.model.classes:
            raise KeyError(f"unknown class {cid}")
        prefix = self._prefix_masks[selected_seq]
        first = self._delta_masks[selected_seq]
        out = []
        for line in self.model.class_lines(cid):
            bit = 1 << line
            if first & bit:
                status = "firstCoveredHere"
            elif prefix & bit:
                status = "covered"
            else:
                status = "uncovered"
            out.append((line, status))
        return out

    def node_coverage(self, collapsed: CollapsedGraph, selected_seq: int) -> dict:
        """Per-group coverage for a collapsed graph, against current coverage.

        Group counts are sums over member methods; ``firstCoveredHere`` marks
        groups containing lines first run by the selected event.
        """
        first = self._delta_masks[selected_seq] if self.records else 0
        out: dict[str, dict] = {}
        for group, members in collapsed.members.items():
            mask = 0
            for mid in members:
                mask |= self.model.method_mask(mid)
            total = mask.bit_count()
            covered = (self.cumulative.bits & mask).bit_count()
            if total and covered == total:
                status = "fully"
            elif covered:
                status = "partially"
            else:
                status = "uncovered"
            out[group] = {
                "coveredLines": covered,
                "totalLines": total,
                "status": status,
                "firstCoveredHere": bool(first & mask),
            }
        return out
