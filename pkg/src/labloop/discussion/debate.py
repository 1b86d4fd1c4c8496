"""Adversarial discussion: alternating supporter/skeptic rounds, one judge
ruling at the end. With scripted agents the ruling is a pure function of
the evidence."""

from __future__ import annotations

from dataclasses import dataclass

from labloop.discussion.agents import AgentFailure, validate_argument
from labloop.discussion.evidence import EvidenceSummary

DEFAULT_ROUNDS = 2


@dataclass(frozen=True)
class DebateTranscript:
    rounds: tuple[dict, ...]     # {round_index, supporter_argument, skeptic_argument}
    ruling: dict                 # {decision, confidence, rationale, ...}

    def to_dict(self) -> dict:
        return {"rounds": list(self.rounds), "ruling": self.ruling}

    @classmethod
    def from_dict(cls, doc: dict) -> "DebateTranscript":
        return cls(tuple(doc["rounds"]), doc["ruling"])


def adversarial_debate(evidence: EvidenceSummary | None, agents,
                       rounds: int = DEFAULT_ROUNDS) -> DebateTranscript:
    """Run the configured number of rounds; agent failures do not abort the
    debate, they are recorded and the ruling falls back to insufficient."""
    if rounds < 1:
        raise ValueError("at least one round of debate is required")
    evidence_doc = evidence.to_dict() if evidence is not None else None

    transcript_rounds: list[dict] = []
    prior: list[dict] = []
    failed = False
    for index in range(rounds):
        entry: dict = {"round_index": index}
        for side in ("supporter", "skeptic"):
            context = {"role": side, "round_index": index,
                       "evidence": evidence_doc, "prior_arguments": list(prior)}
            try:
                argument = agents.respond(side, context)
                validate_argument(side, argument)
            except AgentFailure as exc:
                argument = {"text": f"[agent failure: {exc}]", "cites": ["margin"],
                            "failed": True}
                failed = True
            entry[f"{side}_argument"] = argument
            prior.append({"role": side, **argument})
        transcript_rounds.append(entry)

    if failed:
        ruling = {"decision": "insufficient", "confidence": 0.0,
                  "rationale": "an agent failed during the debate; no ruling "
                               "can rest on its arguments"}
    else:
        context = {"role": "judge", "evidence": evidence_doc,
                   "prior_arguments": prior}
        try:
            ruling = agents.respond("judge", context)
            validate_argument("judge", ruling)
        except AgentFailure as exc:
            ruling = {"decision": "insufficient", "confidence": 0.0,
                      "rationale": f"judge failed: {exc}"}

    return DebateTranscript(rounds=tuple(transcript_rounds), ruling=ruling)
