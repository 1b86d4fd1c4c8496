"""Expert voting: independent threshold voters resolved by strict majority.

Panel thresholds are evenly spaced over [1, 3] standard errors, so a
margin above three standard errors convinces everyone and one below one
standard error convinces no one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from labloop.discussion.agents import AgentFailure, ScriptedAgentSet, validate_argument
from labloop.discussion.evidence import EvidenceSummary

DEFAULT_PANEL = 5
THRESHOLD_RANGE = (1.0, 3.0)


class EvenPanel(ValueError):
    """Panels must be odd so yes/no majorities cannot deadlock outright."""


@dataclass(frozen=True)
class VoteTally:
    votes: tuple[dict, ...]      # {agent_id, vote, rationale}
    decision: str
    confidence: float

    def to_dict(self) -> dict:
        return {"votes": list(self.votes), "decision": self.decision,
                "confidence": self.confidence}

    @classmethod
    def from_dict(cls, doc: dict) -> "VoteTally":
        return cls(tuple(doc["votes"]), doc["decision"], doc["confidence"])


def tally_votes(votes: list[str]) -> tuple[str, float]:
    """Majority over non-abstain votes; all-abstain and ties are insufficient.

    Returns (decision, fraction of non-abstain votes agreeing).
    """
    yes = votes.count("yes")
    no = votes.count("no")
    cast = yes + no
    if cast == 0 or yes == no:
        return "insufficient", 0.0
    if yes > no:
        return "supported", yes / cast
    return "refuted", no / cast


def panel_thresholds(n_experts: int) -> list[float]:
    lo, hi = THRESHOLD_RANGE
    return [float(t) for t in np.linspace(lo, hi, n_experts)]


def expert_vote(evidence: EvidenceSummary | None, n_experts: int = DEFAULT_PANEL,
                agents=None) -> VoteTally:
    if n_experts % 2 == 0:
        raise EvenPanel(f"panel size must be odd, got {n_experts}")
    if n_experts < 3:
        raise ValueError(f"panel needs at least 3 experts, got {n_experts}")
    agents = agents or ScriptedAgentSet()
    evidence_doc = evidence.to_dict() if evidence is not None else None

    ballots: list[dict] = []
    for k, threshold in enumerate(panel_thresholds(n_experts)):
        context = {"role": "expert", "agent_id": f"expert_{k}",
                   "threshold": threshold, "evidence": evidence_doc}
        try:
            ballot = agents.respond("expert", context)
            validate_argument("expert", ballot)
        except AgentFailure as exc:
            ballot = {"vote": "abstain", "rationale": f"[agent failure: {exc}]"}
        ballots.append({"agent_id": f"expert_{k}", "vote": ballot["vote"],
                        "rationale": ballot.get("rationale", "")})

    decision, confidence = tally_votes([b["vote"] for b in ballots])
    return VoteTally(votes=tuple(ballots), decision=decision, confidence=confidence)
