"""Evidence adjudication: summaries, adversarial debate, expert voting."""

from labloop.discussion.evidence import EvidenceSummary, NoEvidence, summarize_evidence
from labloop.discussion.agents import (
    AgentFailure,
    ExternalAgent,
    ScriptedAgentSet,
)
from labloop.discussion.debate import DebateTranscript, adversarial_debate
from labloop.discussion.voting import EvenPanel, VoteTally, expert_vote, tally_votes
from labloop.discussion.gate import (
    DecisionAction,
    GateConfig,
    RevisionPlan,
    Verdict,
    decide_next,
)

__all__ = [
    "EvidenceSummary",
    "NoEvidence",
    "summarize_evidence",
    "ScriptedAgentSet",
    "ExternalAgent",
    "AgentFailure",
    "DebateTranscript",
    "adversarial_debate",
    "VoteTally",
    "EvenPanel",
    "expert_vote",
    "tally_votes",
    "Verdict",
    "GateConfig",
    "RevisionPlan",
    "DecisionAction",
    "decide_next",
]
