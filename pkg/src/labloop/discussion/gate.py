"""The sufficiency gate: finalize with a decision or send the experiment
back for another iteration with doubled trials and a tightened force
threshold. The claim text itself is never rewritten; revisions change the
experimental plan only, and the report records that choice."""

from __future__ import annotations

from dataclasses import dataclass

from labloop.discussion.debate import DebateTranscript
from labloop.discussion.voting import VoteTally

TRIALS_FACTOR = 2
FMAX_FACTOR = 0.4


@dataclass(frozen=True)
class Verdict:
    strategy: str                # adversarial | voting
    decision: str                # supported | refuted | insufficient
    confidence: float
    transcript: DebateTranscript | VoteTally
    iteration: int

    @classmethod
    def from_transcript(cls, strategy: str,
                        transcript: DebateTranscript | VoteTally,
                        iteration: int) -> "Verdict":
        if isinstance(transcript, DebateTranscript):
            decision = transcript.ruling["decision"]
            confidence = float(transcript.ruling["confidence"])
        else:
            decision = transcript.decision
            confidence = transcript.confidence
        return cls(strategy, decision, confidence, transcript, iteration)

    def to_dict(self) -> dict:
        return {"strategy": self.strategy, "decision": self.decision,
                "confidence": self.confidence,
                "transcript": self.transcript.to_dict(),
                "iteration": self.iteration}

    @classmethod
    def from_dict(cls, doc: dict) -> "Verdict":
        transcript: DebateTranscript | VoteTally
        if doc["strategy"] == "adversarial":
            transcript = DebateTranscript.from_dict(doc["transcript"])
        else:
            transcript = VoteTally.from_dict(doc["transcript"])
        return cls(doc["strategy"], doc["decision"], float(doc["confidence"]),
                   transcript, int(doc["iteration"]))


@dataclass(frozen=True)
class GateConfig:
    confidence_threshold: float = 0.7
    max_iterations: int = 3


@dataclass(frozen=True)
class RevisionPlan:
    n_trials: int
    fmax: float
    rationale: str

    def to_dict(self) -> dict:
        return {"n_trials": self.n_trials, "fmax": self.fmax,
                "rationale": self.rationale}


@dataclass(frozen=True)
class DecisionAction:
    action: str                  # finalize | revise
    final_decision: str | None = None
    plan: RevisionPlan | None = None


def final_decision_label(decision: str) -> str:
    return "inconclusive" if decision == "insufficient" else decision


def decide_next(verdict: Verdict, config: GateConfig,
                n_trials: int, fmax: float) -> DecisionAction:
    """Finalize on sufficient confidence or exhausted budget, else revise."""
    if verdict.confidence >= config.confidence_threshold:
        return DecisionAction("finalize",
                              final_decision=final_decision_label(verdict.decision))
    if verdict.iteration + 1 >= config.max_iterations:
        return DecisionAction("finalize", final_decision="inconclusive")
    plan = RevisionPlan(
        n_trials=n_trials * TRIALS_FACTOR,
        fmax=fmax * FMAX_FACTOR,
        rationale=(f"confidence {verdict.confidence:.3f} below threshold "
                   f"{config.confidence_threshold}; doubling trials to "
                   f"{n_trials * TRIALS_FACTOR} and tightening fmax to "
                   f"{fmax * FMAX_FACTOR:.4g} eV/Å"),
    )
    return DecisionAction("revise", plan=plan)
