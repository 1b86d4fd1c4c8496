"""Run events: the append-only record everything else is derived from."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone

EVENT_KINDS = ("state_changed", "unit_completed", "unit_failed", "debate_turn",
               "verdict", "revision", "report_ready", "error")


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class RunEvent:
    seq: int                     # gapless from 1
    timestamp: str
    kind: str
    payload: dict

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.seq < 1:
            raise ValueError("event seq starts at 1")

    def to_dict(self) -> dict:
        return {"seq": self.seq, "timestamp": self.timestamp,
                "kind": self.kind, "payload": self.payload}

    @classmethod
    def from_dict(cls, doc: dict) -> "RunEvent":
        return cls(int(doc["seq"]), doc["timestamp"], doc["kind"], doc["payload"])
