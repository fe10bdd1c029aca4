"""Canonical structured-text serialization shared by every on-disk artifact.

All machine-readable documents (programs, call-graph caches, wire payloads,
reports) are JSON rendered in one canonical form: keys sorted, 2-space
indent, trailing newline. Byte determinism of every artifact follows from
this single choice.
"""

from __future__ import annotations

import hashlib
import json


def canonical_text(obj) -> str:
    """Render *obj* (plain dicts/lists/scalars) in canonical form."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def canonical_bytes(obj) -> bytes:
    return canonical_text(obj).encode("utf-8")


def content_hash(text: str) -> str:
    """64-bit digest of a canonical document, as 16 hex chars."""
    return hashlib.blake2b(text.encode("utf-8"), digest_size=8).hexdigest()
