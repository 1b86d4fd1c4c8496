"""Run persistence: one directory per run.

    events.jsonl   append-only, one canonical-JSON event per line
    run.json       current snapshot, rewritten atomically via temp + rename

The event log is the source of truth; the snapshot exists so API reads
never have to replay. Both are written on every event.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from labloop.canonical import canonical_dumps
from labloop.orchestrator.events import RunEvent, utc_now
from labloop.orchestrator.state import RunState, fold_events


class RunStore:
    def __init__(self, run_dir: str | Path):
        self.run_dir = Path(run_dir)
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.events_path = self.run_dir / "events.jsonl"
        self.snapshot_path = self.run_dir / "run.json"

    @property
    def run_id(self) -> str:
        return self.run_dir.name

    def read_events(self, after_seq: int = 0) -> list[RunEvent]:
        if not self.events_path.exists():
            return []
        events = []
        with open(self.events_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = RunEvent.from_dict(json.loads(line))
                if event.seq > after_seq:
                    events.append(event)
        return events

    def load_state(self) -> RunState | None:
        events = self.read_events()
        if not events:
            return None
        return fold_events(self.run_id, events)

    def read_snapshot(self) -> dict | None:
        if not self.snapshot_path.exists():
            return None
        with open(self.snapshot_path, encoding="utf-8") as fh:
            return json.load(fh)

    def append(self, state: RunState, kind: str, payload: dict) -> RunEvent:
        """Apply an event to the state, then persist log and snapshot."""
        event = RunEvent(seq=state.last_seq + 1, timestamp=utc_now(),
                         kind=kind, payload=payload)
        state.apply(event)
        with open(self.events_path, "a", encoding="utf-8") as fh:
            fh.write(canonical_dumps(event.to_dict()))
            fh.flush()
            os.fsync(fh.fileno())
        self._write_snapshot(state)
        return event

    def _write_snapshot(self, state: RunState):
        doc = dict(state.to_dict(), updated_at=utc_now())
        tmp = self.snapshot_path.with_suffix(".json.tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(canonical_dumps(doc))
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self.snapshot_path)


def list_runs(root: str | Path) -> list[RunStore]:
    root = Path(root)
    if not root.exists():
        return []
    stores = [RunStore(p) for p in sorted(root.iterdir())
              if (p / "events.jsonl").exists()]
    return stores
