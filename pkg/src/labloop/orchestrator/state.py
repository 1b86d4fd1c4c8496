"""Run state: a pure fold over the event log.

The engine never mutates state directly; it emits events and applies them
through ``RunState.apply``, so the snapshot and the event log cannot drift
apart. Transition legality is enforced here, making an illegal transition
unrepresentable in a persisted log.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from labloop.orchestrator.events import RunEvent

RUN_STATES = ("created", "pre_experiment", "experimenting", "discussing",
              "revising", "reporting", "finished", "aborted")
TERMINAL_STATES = ("finished", "aborted")

LEGAL_TRANSITIONS = {
    "created": {"pre_experiment", "aborted"},
    "pre_experiment": {"experimenting", "aborted"},
    "experimenting": {"discussing", "aborted"},
    "discussing": {"reporting", "revising", "aborted"},
    "revising": {"pre_experiment", "aborted"},
    "reporting": {"finished", "aborted"},
    "finished": set(),
    "aborted": set(),
}


class IllegalTransition(RuntimeError):
    pass


@dataclass
class RunState:
    run_id: str
    hypothesis: dict = field(default_factory=dict)
    state: str = "created"
    iteration: int = 0
    n_trials: int = 3
    fmax: float = 0.05
    iterations: list[dict] = field(default_factory=list)
    final_decision: str | None = None
    report: dict | None = None
    error: str | None = None
    last_seq: int = 0

    @property
    def current(self) -> dict | None:
        """The in-flight iteration record (spec, results, transcript, verdict)."""
        return self.iterations[-1] if self.iterations else None

    def apply(self, event: RunEvent) -> "RunState":
        if event.seq != self.last_seq + 1:
            raise ValueError(f"event seq {event.seq} breaks gapless order "
                             f"(expected {self.last_seq + 1})")
        self.last_seq = event.seq
        payload = event.payload

        if event.kind == "state_changed":
            to = payload["to"]
            if to not in RUN_STATES:
                raise IllegalTransition(f"unknown state {to!r}")
            if event.seq == 1:
                if to != "created":
                    raise IllegalTransition("a run must begin in created")
            elif to not in LEGAL_TRANSITIONS[self.state]:
                raise IllegalTransition(f"{self.state} -> {to} is not allowed")
            if event.seq == 1:
                self.hypothesis = payload["hypothesis"]
                self.n_trials = int(payload.get("n_trials", self.n_trials))
                self.fmax = float(payload.get("fmax", self.fmax))
            if to == "revising":
                self.iteration = int(payload["iteration"])
            if to == "experimenting":
                self.iterations.append({
                    "iteration": self.iteration,
                    "canonical": payload["canonical"],
                    "spec": payload["spec"],
                    "n_trials": self.n_trials,
                    "fmax": self.fmax,
                    "results": {},
                    "transcript": [],
                    "verdict": None,
                })
            if to == "reporting":
                self.final_decision = payload.get("final_decision")
            self.state = to
            return self

        if event.kind in ("unit_completed", "unit_failed"):
            self._require_iteration(event)
            self.current["results"][payload["unit_id"]] = payload["outcome"]
            return self

        if event.kind == "debate_turn":
            self._require_iteration(event)
            self.current["transcript"].append(
                {k: payload[k] for k in ("round_index", "role", "argument")})
            return self

        if event.kind == "verdict":
            self._require_iteration(event)
            self.current["verdict"] = payload["verdict"]
            return self

        if event.kind == "revision":
            self.n_trials = int(payload["plan"]["n_trials"])
            self.fmax = float(payload["plan"]["fmax"])
            return self

        if event.kind == "report_ready":
            self.report = payload["report"]
            self.final_decision = payload["report"]["final_decision"]
            return self

        if event.kind == "error":
            self.error = payload["message"]
            return self

        raise ValueError(f"unhandled event kind {event.kind}")

    def _require_iteration(self, event: RunEvent):
        if not self.iterations:
            raise IllegalTransition(
                f"{event.kind} event before any experimenting phase")

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "hypothesis": self.hypothesis,
            "state": self.state,
            "iteration": self.iteration,
            "n_trials": self.n_trials,
            "fmax": self.fmax,
            "iterations": self.iterations,
            "final_decision": self.final_decision,
            "report": self.report,
            "error": self.error,
            "last_seq": self.last_seq,
        }

    def summary(self) -> dict:
        completed = total = 0
        if self.current:
            spec_units = self.current["spec"]["units"]
            total = len(spec_units)
            completed = sum(1 for uid in self.current["results"]
                            if any(u["unit_id"] == uid for u in spec_units))
        return {
            "run_id": self.run_id,
            "state": self.state,
            "iteration": self.iteration,
            "hypothesis_text": self.hypothesis.get("text", ""),
            "completed_units": completed,
            "total_units": total,
            "final_decision": self.final_decision,
        }


def fold_events(run_id: str, events: list[RunEvent]) -> RunState:
    state = RunState(run_id=run_id)
    for event in events:
        state.apply(event)
    return state
