"""Fired events and the per-event records the tracing agent emits."""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import EVENT_KINDS, STARTUP_KIND, ProgramModel


@dataclass(frozen=True)
class FiredEvent:
    widget: str | None  # None only for the startup pseudo-event
    kind: str
    payload: int = 0

    def to_dict(self) -> dict:
        return {"widget": self.widget, "kind": self.kind, "payload": self.payload}

    @staticmethod
    def from_dict(d: dict) -> "FiredEvent":
        return FiredEvent(d.get("widget"), d["kind"], int(d.get("payload", 0)))


def widget_snapshot(model: ProgramModel, fired: str | None) -> dict:
    """Widget-tree snapshot taken at fire time, originating widget marked."""
    return {"fired": fired, "root": model.widget_root.to_dict()}


@dataclass
class EventRecord:
    """One fired event, observed after its handlers ran to completion.

    ``coverage_delta`` holds the globally sorted line indices first covered
    while this event was handled; deltas across a session are pairwise
    disjoint. ``timestamp_ms`` is wall clock relative to session start and
    is excluded from every equality or fixture comparison.
    """

    seq: int
    timestamp_ms: int
    event: FiredEvent
    handlers: tuple[str, ...]
    coverage_delta: tuple[int, ...]
    snapshot: dict = field(default_factory=dict)
    error: str | None = None

    def key(self) -> tuple:
        """Identity with the timestamp masked out."""
        return (
            self.seq,
            self.event,
            self.handlers,
            self.coverage_delta,
            self.error,
            self.snapshot.get("fired"),
        )

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "timestampMs": self.timestamp_ms,
            "event": self.event.to_dict(),
            "handlers": list(self.handlers),
            "coverageDelta": list(self.coverage_delta),
            "snapshot": self.snapshot,
            "error": self.error,
        }

    @staticmethod
    def from_dict(d: dict) -> "EventRecord":
        return EventRecord(
            seq=int(d["seq"]),
            timestamp_ms=int(d["timestampMs"]),
            event=FiredEvent.from_dict(d["event"]),
            handlers=tuple(d["handlers"]),
            coverage_delta=tuple(int(x) for x in d["coverageDelta"]),
            snapshot=d.get("snapshot", {}),
            error=d.get("error"),
        )


def is_startup(record: EventRecord) -> bool:
    return record.event.kind == STARTUP_KIND


def validate_script_event(event: FiredEvent) -> None:
    """Script entries must use a real kind; widget existence is checked at fire."""
    if event.kind not in EVENT_KINDS:
        raise ValueError(f"unknown event kind {event.kind!r}")
