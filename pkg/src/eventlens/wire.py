"""Agent-to-host transport: framed messages over a byte stream.

Frame layout (normative, bit-exact):

    magic   4 bytes  "GTRC"
    version 1 byte   0x01
    msgType 1 byte   1=Hello 2=Event 3=Snapshot 4=Bye
    length  4 bytes  big-endian payload byte count (max 16 MiB)
    payload canonical structured text of the message body (Bye: empty)

Event messages carry per-event coverage deltas as sorted line lists;
snapshot messages carry the full cumulative bitmap as run-length ranges so
the host can verify that the union of deltas it reconstructed matches the
agent's view. The in-process transport pushes the same encoded bytes the
socket transport would, so both are observationally identical.
"""

from __future__ import annotations

import json
import socket
import struct
import threading
from dataclasses import dataclass
from typing import Callable, Iterable

from . import canon
from .events import EventRecord

MAGIC = b"GTRC"
VERSION = 1
MSG_HELLO, MSG_EVENT, MSG_SNAPSHOT, MSG_BYE = 1, 2, 3, 4
_MSG_TYPES = (MSG_HELLO, MSG_EVENT, MSG_SNAPSHOT, MSG_BYE)
MAX_PAYLOAD = 16 * 1024 * 1024
HEADER = struct.Struct(">4sBBI")
DEFAULT_AGENT_PORT = 4790
DEFAULT_SNAPSHOT_EVERY = 50


class ProtocolError(Exception):
    pass


class CorruptFrameError(ProtocolError):
    """Bad magic, unknown message type or oversized length."""


class UnsupportedVersionError(ProtocolError):
    pass


class TruncatedFrameError(ProtocolError):
    """One-shot decode hit end of data mid-frame."""


class ProtocolOrderError(ProtocolError):
    """Hello missing, duplicated, or a message after Bye."""


class SeqGapError(ProtocolError):
    pass


class SnapshotDivergenceError(ProtocolError):
    """Agent's cumulative bitmap disagrees with the union of deltas."""


# --------------------------------------------------------------------------
# Messages
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Hello:
    program_hash: str
    total_app_lines: int
    program_name: str

    def body(self) -> dict:
        return {
            "programHash": self.program_hash,
            "totalAppLines": self.total_app_lines,
            "programName": self.program_name,
        }


@dataclass(frozen=True)
class EventMessage:
    record: EventRecord

    def body(self) -> dict:
        return self.record.to_dict()


@dataclass(frozen=True)
class Snapshot:
    seq: int
    ranges: tuple[tuple[int, int], ...]  # sorted inclusive [lo, hi] runs

    def body(self) -> dict:
        return {"seq": self.seq, "ranges": [list(r) for r in self.ranges]}


@dataclass(frozen=True)
class Bye:
    pass


Message = Hello | EventMessage | Snapshot | Bye

_TYPE_OF = {Hello: MSG_HELLO, EventMessage: MSG_EVENT, Snapshot: MSG_SNAPSHOT, Bye: MSG_BYE}


def lines_to_ranges(lines: Iterable[int]) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for line in sorted(lines):
        if out and line == out[-1][1] + 1:
            out[-1][1] = line
        else:
            out.append([line, line])
    return tuple((lo, hi) for lo, hi in out)


def mask_to_ranges(mask: int) -> tuple[tuple[int, int], ...]:
    lines = []
    i = 0
    while mask:
        if mask & 1:
            lines.append(i)
        mask >>= 1
        i += 1
    return lines_to_ranges(lines)


def ranges_to_mask(ranges: Iterable[tuple[int, int]]) -> int:
    mask = 0
    for lo, hi in ranges:
        mask |= (1 << (hi + 1)) - (1 << lo)
    return mask


# --------------------------------------------------------------------------
# Codec
# --------------------------------------------------------------------------


def encode(msg: Message) -> bytes:
    payload = b"" if isinstance(msg, Bye) else canon.canonical_bytes(msg.body())
    if len(payload) > MAX_PAYLOAD:
        raise CorruptFrameError(f"payload of {len(payload)} bytes exceeds 16 MiB")
    return HEADER.pack(MAGIC, VERSION, _TYPE_OF[type(msg)], len(payload)) + payload


def _parse_payload(msg_type: int, payload: bytes) -> Message:
    if msg_type == MSG_BYE:
        return Bye()
    try:
        body = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptFrameError(f"unparseable payload: {exc}") from exc
    try:
        if msg_type == MSG_HELLO:
            return Hello(
                program_hash=body["programHash"],
                total_app_lines=int(body["totalAppLines"]),
                program_name=body["programName"],
            )
        if msg_type == MSG_EVENT:
            return EventMessage(EventRecord.from_dict(body))
        return Snapshot(
            seq=int(body["seq"]),
            ranges=tuple((int(r[0]), int(r[1])) for r in body["ranges"]),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise CorruptFrameError(f"malformed message body: {exc}") from exc


class FrameDecoder:
    """Incremental decoder; frames may arrive split at any byte boundary."""

    def __init__(self) -> None:
        self._buf = bytearray()

    def feed(self, data: bytes) -> list[Message]:
        self._buf.extend(data)
        out: list[Message] = []
        while True:
            msg = self._try_decode()
            if msg is None:
                return out
            out.append(msg)

    def _try_decode(self) -> Message | None:
        buf = self._buf
        # Validate eagerly: corruption is reported as soon as the offending
        # byte is buffered, before any payload arrives.
        if len(buf) >= 4 and bytes(buf[:4]) != MAGIC:
            raise CorruptFrameError(f"bad magic {bytes(buf[:4])!r}")
        if len(buf) >= 5 and buf[4] != VERSION:
            raise UnsupportedVersionError(f"unsupported version {buf[4]}")
        if len(buf) >= 6 and buf[5] not in _MSG_TYPES:
            raise CorruptFrameError(f"unknown message type {buf[5]}")
        if len(buf) < HEADER.size:
            return None
        _, _, msg_type, length = HEADER.unpack(bytes(buf[: HEADER.size]))
        if length > MAX_PAYLOAD:
            raise CorruptFrameError(f"length {length} exceeds 16 MiB")
        if len(buf) < HEADER.size + length:
            return None
        payload = bytes(buf[HEADER.size : HEADER.size + length])
        del buf[: HEADER.size + length]
        return _parse_payload(msg_type, payload)

    @property
    def pending_bytes(self) -> int:
        return len(self._buf)


def decode(data: bytes) -> Message:
    """Decode exactly one frame; trailing bytes are an error."""
    decoder = FrameDecoder()
    messages = decoder.feed(data)
    if not messages:
        raise TruncatedFrameError(f"incomplete frame ({len(data)} bytes)")
    if len(messages) > 1 or decoder.pending_bytes:
        raise CorruptFrameError("trailing bytes after frame")
    return messages[0]


# --------------------------------------------------------------------------
# Agent side
# --------------------------------------------------------------------------


class AgentEmitter:
    """Serializes an interpreter's records onto a transport.

    Wire as the interpreter's ``emit`` callback. Sends one Hello up front,
    one Event frame per record and a cumulative Snapshot frame every
    ``snapshot_every`` events (and on request).
    """

    def __init__(
        self,
        interp,
        write: Callable[[bytes], None],
        snapshot_every: int = DEFAULT_SNAPSHOT_EVERY,
    ):
        self._interp = interp
        self._write = write
        self._snapshot_every = snapshot_every
        self._since_snapshot = 0
        interp.emit = self.emit_record

    def send_hello(self) -> None:
        model = self._interp.model
        self._write(
            encode(
                Hello(
                    program_hash=model.content_hash,
                    total_app_lines=model.total_app_lines,
                    program_name=model.name,
                )
            )
        )

    def emit_record(self, record: EventRecord) -> None:
        self._write(encode(EventMessage(record)))
        self._since_snapshot += 1
        if self._since_snapshot >= self._snapshot_every:
            self.request_snapshot()

    def request_snapshot(self) -> None:
        self._since_snapshot = 0
        self._write(
            encode(
                Snapshot(
                    seq=self._interp.state.event_seq - 1,
                    ranges=mask_to_ranges(self._interp.state.coverage_mask),
                )
            )
        )

    def send_bye(self) -> None:
        self._write(encode(Bye()))


# --------------------------------------------------------------------------
# Host side
# --------------------------------------------------------------------------


class Host:
    """Receives frames, enforces protocol order and hands records out.

    Listeners get each record in seq order, exactly once, on the thread that
    feeds the host. They must not block; slow consumers belong behind their
    own bounded queues (the session service enforces a 10,000-record bound
    per subscriber).
    """

    def __init__(self) -> None:
        self._decoder = FrameDecoder()
        self._listeners: list[Callable[[EventRecord], None]] = []
        self.hello: Hello | None = None
        self.closed = False
        self._next_seq = 0
        self._union_mask = 0

    def add_listener(self, callback: Callable[[EventRecord], None]) -> None:
        self._listeners.append(callback)

    def feed(self, data: bytes) -> list[EventRecord]:
        records: list[EventRecord] = []
        for msg in self._decoder.feed(data):
            record = self._handle(msg)
            if record is not None:
                records.append(record)
        return records

    def _handle(self, msg: Message) -> EventRecord | None:
        if self.closed:
            raise ProtocolOrderError("message after Bye")
        if self.hello is None:
            if not isinstance(msg, Hello):
                raise ProtocolOrderError(
                    f"{type(msg).__name__} before Hello"
                )
            self.hello = msg
            return None
        if isinstance(msg, Hello):
            raise ProtocolOrderError("second Hello on one connection")
        if isinstance(msg, Bye):
            self.closed = True
            return None
        if isinstance(msg, Snapshot):
            if msg.seq != self._next_seq - 1:
                raise SeqGapError(
                    f"snapshot for seq {msg.seq}, last event was {self._next_seq - 1}"
                )
            if ranges_to_mask(msg.ranges) != self._union_mask:
                raise SnapshotDivergenceError(
                    f"snapshot at seq {msg.seq} disagrees with union of deltas"
                )
            return None
        record = msg.record
        if record.seq != self._next_seq:
            raise SeqGapError(f"expected seq {self._next_seq}, got {record.seq}")
        self._next_seq += 1
        for line in record.coverage_delta:
            self._union_mask |= 1 << line
        for listener in self._listeners:
            listener(record)
        return record


def host_accept(chunks: Iterable[bytes]) -> tuple[Hello, list[EventRecord]]:
    """Consume a whole stream; returns the validated Hello and all records."""
    host = Host()
    records: list[EventRecord] = []
    for chunk in chunks:
        records.extend(host.feed(chunk))
    if host.hello is None:
        raise ProtocolOrderError("stream ended before Hello")
    return host.hello, records


# --------------------------------------------------------------------------
# Transports
# --------------------------------------------------------------------------


class InProcessTransport:
    """Feeds encoded bytes straight into a host; same frames, no socket."""

    def __init__(self, host: Host):
        self._host = host

    def write(self, data: bytes) -> None:
        self._host.feed(data)

    def close(self) -> None:
        pass


class TcpAgentLink:
    """Agent end of the socket transport."""

    def __init__(self, port: int, address: str = "127.0.0.1"):
        self._sock = socket.create_connection((address, port), timeout=10)

    def write(self, data: bytes) -> None:
        self._sock.sendall(data)

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass


class TcpHostServer:
    """Listens for one agent connection and pumps its bytes into a host."""

    def __init__(self, host: Host, port: int = DEFAULT_AGENT_PORT):
        self._host = host
        self.error: Exception | None = None
        self._server = socket.create_server(("127.0.0.1", port))
        self.port = self._server.getsockname()[1]
        self._thread = threading.Thread(target=self._serve, daemon=True)
        self._thread.start()

    def _serve(self) -> None:
        try:
            conn, _ = self._server.accept()
            with conn:
                while True:
                    data = conn.recv(65536)
                    if not data:
                        return
                    self._host.feed(data)
        except Exception as exc:  # surfaced to the service on next poll
            self.error = exc

    def close(self) -> None:
        try:
            self._server.close()
        except OSError:
            pass
