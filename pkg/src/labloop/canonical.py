"""Canonical JSON encoding shared by every serialized contract.

Canonical form: UTF-8, sorted keys, no insignificant whitespace, one
trailing LF. Two structurally equal documents always encode to the same
bytes, which is what the determinism and wire-equivalence tests compare.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

# Keys whose values vary between otherwise identical executions.
VOLATILE_KEYS = frozenset({"wall_time_ms", "timestamp", "submitted_at", "created_at",
                           "updated_at", "total_wall_time_ms", "mean_wall_time_ms"})


def canonical_dumps(doc: Any) -> str:
    """Encode a JSON-able document in canonical form (with trailing LF)."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False, allow_nan=False) + "\n"


def canonical_bytes(doc: Any) -> bytes:
    return canonical_dumps(doc).encode("utf-8")


def content_digest(doc: Any, length: int = 12) -> str:
    """Short stable digest of a document's canonical encoding."""
    return hashlib.sha256(canonical_bytes(doc)).hexdigest()[:length]


def strip_volatile(doc: Any, extra: frozenset[str] | set[str] = frozenset()) -> Any:
    """Recursively drop timing/timestamp keys so payloads can be compared."""
    drop = VOLATILE_KEYS | set(extra)
    if isinstance(doc, dict):
        return {k: strip_volatile(v, extra) for k, v in doc.items() if k not in drop}
    if isinstance(doc, list):
        return [strip_volatile(v, extra) for v in doc]
    return doc
