"""Hypothesis canonicalization: grammar mode is the deterministic reference
path, agent mode delegates to a pluggable agent and re-validates its output.
"""

from __future__ import annotations

from labloop.frontend.grammar import GrammarMismatch, parse_claim, render_claim
from labloop.frontend.types import CanonicalHypothesis, Claim, Hypothesis


class CanonicalizationError(ValueError):
    pass


class EmptyHypothesis(CanonicalizationError):
    pass


class AgentOutputInvalid(CanonicalizationError):
    pass


def _from_claim(claim: Claim) -> CanonicalHypothesis:
    intent = "compare" if claim.form == "relational" else "verify"
    question = f"Is the claim '{render_claim(claim)}' supported by in-silico evidence?"
    return CanonicalHypothesis(
        intent=intent,
        research_questions=(question,),
        claim=claim,
        target_materials=tuple(claim.materials()),
        category=claim.category,
    )


def canonicalize(hypothesis: Hypothesis, mode: str = "grammar",
                 agent=None) -> CanonicalHypothesis:
    """Distill free text into a structured claim.

    mode "grammar" parses against the constrained claim grammar; mode
    "agent" asks ``agent.respond("canonicalizer", ...)`` for a canonical
    document and validates it against the same invariants.
    """
    text = hypothesis.text.strip()
    if not text:
        raise EmptyHypothesis("hypothesis text is empty")

    if mode == "grammar":
        return _from_claim(parse_claim(text))

    if mode == "agent":
        if agent is None:
            raise ValueError("agent mode requires an agent")
        context = {"role": "canonicalizer", "hypothesis_text": text}
        doc = agent.respond("canonicalizer", context)
        try:
            claim = Claim.from_dict(doc["claim"])
            canonical = CanonicalHypothesis(
                intent=doc.get("intent", "verify"),
                research_questions=tuple(doc.get("research_questions")
                                         or (f"Is the claim '{render_claim(claim)}' "
                                             f"supported by in-silico evidence?",)),
                claim=claim,
                target_materials=tuple(doc.get("target_materials") or claim.materials()),
                category=doc.get("category", claim.category),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise AgentOutputInvalid(f"agent returned an invalid claim: {exc}") from exc
        return canonical

    raise ValueError(f"unknown canonicalization mode {mode!r}")


__all__ = ["canonicalize", "CanonicalizationError", "EmptyHypothesis",
           "AgentOutputInvalid", "GrammarMismatch"]
