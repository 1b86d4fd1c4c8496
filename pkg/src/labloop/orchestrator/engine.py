"""The run loop: pre-experiment -> experiment -> discussion, looping through
revision until the sufficiency gate finalizes a report.

Every step is emitted as an event and persisted before anything reacts to
it, so a run killed at any point resumes from its directory and, because
unit execution is deterministic, finishes with the same report.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import requests

from labloop.compute.backend import ComputeBackend, select_backend
from labloop.discussion.agents import ExternalAgent, ScriptedAgentSet
from labloop.discussion.debate import adversarial_debate
from labloop.discussion.evidence import NoEvidence, summarize_evidence
from labloop.discussion.gate import GateConfig, Verdict, decide_next
from labloop.discussion.voting import expert_vote
from labloop.frontend.assemble import assemble_units
from labloop.frontend.canonicalize import CanonicalizationError, canonicalize
from labloop.frontend.grammar import GrammarMismatch
from labloop.frontend.registry import MaterialRegistry
from labloop.frontend.resolve import resolve_materials, resolve_spec
from labloop.frontend.types import (
    CanonicalHypothesis,
    ExperimentSpec,
    Hypothesis,
    UnitFailure,
)
from labloop.orchestrator.report import build_report
from labloop.orchestrator.state import RunState, TERMINAL_STATES
from labloop.orchestrator.store import RunStore

log = logging.getLogger(__name__)


class AbortedByUser(RuntimeError):
    pass


class BackendUnreachable(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    compute_mode: str = "auto"          # auto | local | remote
    compute_url: str | None = None
    strategy: str = "adversarial"       # adversarial | voting
    agents_mode: str = "scripted"       # scripted | llm
    llm_endpoint: str | None = None
    llm_model: str | None = None
    llm_api_key_env: str = "LABLOOP_API_KEY"
    rounds: int = 2
    n_experts: int = 5
    confidence_threshold: float = 0.7
    max_iterations: int = 3
    n_trials: int = 3
    defaults: dict = field(default_factory=dict)   # ResolvedSpec overrides
    workers: int = 4
    retry_backoff: tuple[float, ...] = (1.0, 2.0, 4.0)
    poll_interval: float = 0.05

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        compute = doc.get("compute", {})
        discussion = doc.get("discussion", {})
        llm = doc.get("llm", {})
        return cls(
            compute_mode=compute.get("mode", "auto"),
            compute_url=compute.get("url"),
            strategy=discussion.get("strategy", "adversarial"),
            agents_mode=discussion.get("agents", "scripted"),
            llm_endpoint=llm.get("endpoint"),
            llm_model=llm.get("model"),
            llm_api_key_env=llm.get("api_key_env", "LABLOOP_API_KEY"),
            rounds=int(discussion.get("rounds", 2)),
            n_experts=int(discussion.get("n_experts", 5)),
            confidence_threshold=float(discussion.get("confidence_threshold", 0.7)),
            max_iterations=int(discussion.get("max_iterations", 3)),
            n_trials=int(doc.get("n_trials", 3)),
            defaults=dict(doc.get("defaults", {})),
        )

    def gate(self) -> GateConfig:
        return GateConfig(self.confidence_threshold, self.max_iterations)

    def build_agents(self):
        if self.agents_mode == "llm":
            if not (self.llm_endpoint and self.llm_model):
                raise ValueError("llm agents need llm_endpoint and llm_model")
            return ExternalAgent(self.llm_endpoint, self.llm_model, self.llm_api_key_env)
        return ScriptedAgentSet()

    def build_backend(self) -> ComputeBackend:
        return select_backend(self.compute_mode, self.compute_url, workers=self.workers)


class RunEngine:
    def __init__(self, store: RunStore, config: RunConfig,
                 registry: MaterialRegistry | None = None,
                 backend: ComputeBackend | None = None,
                 on_event: Callable | None = None,
                 abort_check: Callable[[], bool] | None = None):
        self.store = store
        self.config = config
        self.registry = registry or MaterialRegistry.builtin()
        self.backend = backend or config.build_backend()
        self.agents = config.build_agents()
        self.on_event = on_event
        self.abort_check = abort_check or (lambda: False)
        self.state: RunState | None = None
        self._started = time.perf_counter()

    # -- event plumbing ----------------------------------------------------

    def emit(self, kind: str, payload: dict):
        event = self.store.append(self.state, kind, payload)
        if self.on_event is not None:
            self.on_event(event)

    def _check_abort(self):
        if self.abort_check():
            raise AbortedByUser("abort requested")

    # -- life cycle --------------------------------------------------------

    def start(self, hypothesis: Hypothesis) -> dict:
        """Create the run (or resume it if events already exist) and drive it
        to a terminal state; returns the report document."""
        self.state = self.store.load_state()
        if self.state is None:
            self.state = RunState(run_id=self.store.run_id)
            overrides = dict(self.config.defaults)
            self.emit("state_changed", {
                "to": "created",
                "hypothesis": hypothesis.to_dict(),
                "n_trials": self.config.n_trials,
                "fmax": float(overrides.get("fmax", 0.05)),
            })
        return self._drive()

    def resume(self) -> dict:
        self.state = self.store.load_state()
        if self.state is None:
            raise FileNotFoundError(f"no run at {self.store.run_dir}")
        return self._drive()

    def _drive(self) -> dict:
        try:
            while self.state.state not in TERMINAL_STATES:
                self._check_abort()
                handler = getattr(self, f"_stage_{self.state.state}")
                handler()
        except AbortedByUser:
            self._abort("aborted by user")
        except BackendUnreachable as exc:
            self._abort(f"compute backend unreachable: {exc}")
        if self.state.report is not None:
            return self.state.report
        raise RuntimeError("run ended without a report")  # pragma: no cover

    def _abort(self, message: str):
        if self.state.state in TERMINAL_STATES:
            return
        self.emit("error", {"message": message, "state": self.state.state})
        report = build_report(self.state, "inconclusive", self._elapsed_ms())
        self.emit("report_ready", {"report": report})
        self.emit("state_changed", {"to": "aborted"})

    def _elapsed_ms(self) -> float:
        return (time.perf_counter() - self._started) * 1000.0

    # -- stages ------------------------------------------------------------

    def _stage_created(self):
        self.emit("state_changed", {"to": "pre_experiment"})

    def _stage_pre_experiment(self):
        hypothesis = Hypothesis.from_dict(self.state.hypothesis)
        mode = "agent" if self.config.agents_mode == "llm" else "grammar"
        try:
            canonical = canonicalize(hypothesis, mode=mode, agent=self.agents)
        except (CanonicalizationError, GrammarMismatch) as exc:
            self.emit("error", {"message": f"canonicalization failed: {exc}",
                                "state": "pre_experiment"})
            report = build_report(self.state, "inconclusive", self._elapsed_ms())
            self.emit("report_ready", {"report": report})
            self.emit("state_changed", {"to": "aborted"})
            return

        materials = resolve_materials(canonical, self.registry)
        overrides = dict(self.config.defaults)
        overrides["fmax"] = self.state.fmax
        resolved = resolve_spec(canonical, overrides)
        if isinstance(resolved, UnitFailure):
            self.emit("error", {"message": f"spec resolution failed: {resolved.message}",
                                "state": "pre_experiment"})
            report = build_report(self.state, "inconclusive", self._elapsed_ms())
            self.emit("report_ready", {"report": report})
            self.emit("state_changed", {"to": "aborted"})
            return

        spec = assemble_units(canonical, materials, resolved, self.state.n_trials)
        self.emit("state_changed", {"to": "experimenting",
                                    "canonical": canonical.to_dict(),
                                    "spec": spec.to_dict()})

    def _stage_experimenting(self):
        record = self.state.current
        spec = ExperimentSpec.from_dict(record["spec"])
        recorded = set(record["results"])

        def on_unit(doc: dict):
            self._check_abort()
            if doc["unit_id"] in recorded:
                return  # resumed run: already persisted, values are identical
            recorded.add(doc["unit_id"])
            kind = "unit_failed" if "stage" in doc else "unit_completed"
            self.emit(kind, {"unit_id": doc["unit_id"], "outcome": doc,
                             "iteration": record["iteration"]})

        self._run_spec_with_retries(spec, on_unit)
        for failure in spec.failures:
            if failure.unit_id not in recorded:
                recorded.add(failure.unit_id)
                self.emit("unit_failed", {"unit_id": failure.unit_id,
                                          "outcome": failure.to_dict(),
                                          "iteration": record["iteration"]})
        self.emit("state_changed", {"to": "discussing"})

    def _run_spec_with_retries(self, spec: ExperimentSpec, on_unit):
        attempts = len(self.config.retry_backoff) + 1
        for attempt in range(attempts):
            try:
                self.backend.run_spec(spec, on_unit=on_unit)
                return
            except requests.RequestException as exc:
                if attempt == attempts - 1:
                    raise BackendUnreachable(str(exc)) from exc
                delay = self.config.retry_backoff[attempt]
                log.warning("compute backend unreachable (%s); retry in %.1fs",
                            exc, delay)
                time.sleep(delay)

    def _stage_discussing(self):
        record = self.state.current
        canonical = CanonicalHypothesis.from_dict(record["canonical"])
        results = [record["results"][uid] for uid in sorted(record["results"])]
        try:
            evidence = summarize_evidence(results, canonical.claim,
                                          list(canonical.target_materials))
        except NoEvidence:
            evidence = None

        already = {(t["round_index"], t["role"]) for t in record["transcript"]}

        if self.config.strategy == "voting":
            tally = expert_vote(evidence, self.config.n_experts, self.agents)
            for k, ballot in enumerate(tally.votes):
                if (0, ballot["agent_id"]) not in already:
                    self.emit("debate_turn", {"iteration": record["iteration"],
                                              "round_index": 0,
                                              "role": ballot["agent_id"],
                                              "argument": ballot})
            transcript = tally
        else:
            debate = adversarial_debate(evidence, self.agents, self.config.rounds)
            for entry in debate.rounds:
                for side in ("supporter", "skeptic"):
                    key = (entry["round_index"], side)
                    if key not in already:
                        self.emit("debate_turn", {"iteration": record["iteration"],
                                                  "round_index": entry["round_index"],
                                                  "role": side,
                                                  "argument": entry[f"{side}_argument"]})
            transcript = debate

        verdict = Verdict.from_transcript(
            "voting" if self.config.strategy == "voting" else "adversarial",
            transcript, record["iteration"])
        self.emit("verdict", {"iteration": record["iteration"],
                              "verdict": verdict.to_dict()})

        action = decide_next(verdict, self.config.gate(),
                             self.state.n_trials, self.state.fmax)
        if action.action == "finalize":
            self.emit("state_changed", {"to": "reporting",
                                        "final_decision": action.final_decision})
        else:
            self.emit("state_changed", {"to": "revising",
                                        "iteration": record["iteration"] + 1})
            self.emit("revision", {"iteration": record["iteration"] + 1,
                                   "plan": action.plan.to_dict()})
            self.emit("state_changed", {"to": "pre_experiment"})

    def _stage_revising(self):
        # only reached on resume after a crash between revising and
        # pre_experiment; the revision event is already folded
        self.emit("state_changed", {"to": "pre_experiment"})

    def _stage_reporting(self):
        report = build_report(self.state, self.state.final_decision or "inconclusive",
                              self._elapsed_ms())
        self.emit("report_ready", {"report": report})
        self.emit("state_changed", {"to": "finished"})


def execute_run(hypothesis: Hypothesis, config: RunConfig, run_dir: str | Path,
                registry: MaterialRegistry | None = None,
                backend: ComputeBackend | None = None,
                on_event: Callable | None = None,
                abort_check: Callable[[], bool] | None = None) -> dict:
    """Drive the full loop for one hypothesis; resumes if run_dir has events."""
    engine = RunEngine(RunStore(run_dir), config, registry=registry,
                       backend=backend, on_event=on_event, abort_check=abort_check)
    return engine.start(hypothesis)


def resume_run(run_dir: str | Path, config: RunConfig,
               registry: MaterialRegistry | None = None,
               backend: ComputeBackend | None = None,
               on_event: Callable | None = None,
               abort_check: Callable[[], bool] | None = None) -> dict:
    engine = RunEngine(RunStore(run_dir), config, registry=registry,
                       backend=backend, on_event=on_event, abort_check=abort_check)
    return engine.resume()
