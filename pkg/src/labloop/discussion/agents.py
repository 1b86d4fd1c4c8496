"""Agent implementations behind one contract: respond(role, context) -> doc.

ScriptedAgentSet is the deterministic reference used by every test; its
rule table:

    judge      supported  iff margin > 2*stderr and every unit converged
               refuted    iff margin < -2*stderr
               insufficient otherwise
               confidence = min(1, |margin| / (3*stderr)) for stderr > 0,
               else 1 for a nonzero margin, else 0
    skeptic    cites unconverged units, a margin within 2*stderr, and
               incomplete convergence counts
    supporter  cites the complementary facts
    expert     votes yes/no when the margin clears its personal threshold
               (in stderr units), abstains otherwise

ExternalAgent adapts an LLM HTTP endpoint to the same contract; outputs
are schema-validated and any violation surfaces as AgentFailure (debate
then falls back to an insufficient ruling).
"""

from __future__ import annotations

import json
import os
from functools import lru_cache
from importlib import resources

import jsonschema
import requests

from labloop.frontend.grammar import parse_claim


class AgentFailure(RuntimeError):
    """An agent returned unusable output."""


def judge_rule(margin: float | None, stderr: float | None,
               all_converged: bool) -> tuple[str, float]:
    """The scripted decision rule; pure so tests can call it directly."""
    if margin is None:
        return "insufficient", 0.0
    if stderr is None or stderr == 0.0:
        confidence = 1.0 if margin != 0.0 else 0.0
    else:
        confidence = min(1.0, abs(margin) / (3.0 * stderr))
    threshold = 2.0 * (stderr or 0.0)
    if margin > threshold and all_converged:
        return "supported", confidence
    if margin < -threshold:
        return "refuted", confidence
    return "insufficient", confidence


def _evidence_facts(evidence: dict | None) -> dict:
    if evidence is None:
        return {"margin": None, "stderr": None, "all_converged": False,
                "failed_units": [], "converged_units": [], "n_trials": 0,
                "n_converged": 0, "unit": ""}
    per_material = evidence["per_material"]
    failed = [u for s in per_material.values() for u in s["failed_units"]]
    converged = [u for s in per_material.values() for u in s["converged_units"]]
    return {
        "margin": evidence["margin"],
        "stderr": evidence["margin_stderr"],
        "all_converged": all(s["n_converged"] == s["n_trials"]
                             for s in per_material.values()),
        "failed_units": failed,
        "converged_units": converged,
        "n_trials": sum(s["n_trials"] for s in per_material.values()),
        "n_converged": sum(s["n_converged"] for s in per_material.values()),
        "unit": evidence["claim"].get("property", ""),
    }


class ScriptedAgentSet:
    """Deterministic rule-based agents; the reference implementation."""

    def respond(self, role: str, context: dict) -> dict:
        if role == "canonicalizer":
            claim = parse_claim(context["hypothesis_text"])
            return {"claim": claim.to_dict()}
        if role == "supporter":
            return self._supporter(context)
        if role == "skeptic":
            return self._skeptic(context)
        if role == "judge":
            return self._judge(context)
        if role == "expert":
            return self._expert(context)
        raise AgentFailure(f"unknown role {role!r}")

    def _supporter(self, context: dict) -> dict:
        f = _evidence_facts(context.get("evidence"))
        if f["margin"] is None:
            return {"text": "No converged evidence is available yet; I cannot "
                            "argue the claim is supported, only that it is untested.",
                    "cites": ["n_converged"]}
        cites = ["margin"] + f["converged_units"][:3]
        sig = (f"{f['margin'] / f['stderr']:.2f} standard errors"
               if f["stderr"] else "an exact margin with zero spread")
        text = (f"The evidence favors the claim: the margin is {f['margin']:.6g} "
                f"({sig}), from {f['n_converged']} converged of {f['n_trials']} trials.")
        if f["all_converged"]:
            text += " Every trial converged, so the aggregates are trustworthy."
            cites.append("n_trials")
        return {"text": text, "cites": cites}

    def _skeptic(self, context: dict) -> dict:
        f = _evidence_facts(context.get("evidence"))
        complaints = []
        cites = []
        if f["margin"] is None:
            complaints.append("there is no defined margin because a side of the "
                              "claim has zero converged trials")
            cites.append("margin")
        if f["failed_units"]:
            complaints.append(f"units {', '.join(f['failed_units'])} never converged")
            cites.extend(f["failed_units"])
        if f["n_converged"] < f["n_trials"]:
            complaints.append(f"only {f['n_converged']} of {f['n_trials']} trials "
                              "produced usable numbers")
            cites.append("n_converged")
        if f["margin"] is not None and f["stderr"] is not None \
                and abs(f["margin"]) <= 2.0 * f["stderr"]:
            complaints.append(f"the margin {f['margin']:.6g} sits within two "
                              f"standard errors ({f['stderr']:.6g}) of zero")
            cites.append("margin_stderr")
        if not complaints:
            complaints.append("the margin is statistically clear; I can only note "
                              "that it rests on the stated error model")
            cites.append("margin_stderr")
        return {"text": "I challenge the claim: " + "; ".join(complaints) + ".",
                "cites": cites}

    def _judge(self, context: dict) -> dict:
        f = _evidence_facts(context.get("evidence"))
        decision, confidence = judge_rule(f["margin"], f["stderr"], f["all_converged"])
        if f["margin"] is None:
            rationale = "No margin could be computed, so the evidence is insufficient."
        else:
            rationale = (f"Margin {f['margin']:.6g} against a standard error of "
                         f"{f['stderr']:.6g}; convergence "
                         f"{f['n_converged']}/{f['n_trials']}. Decision follows the "
                         f"two-standard-error rule.")
        return {"decision": decision, "confidence": confidence,
                "rationale": rationale, "cites": ["margin", "margin_stderr"]}

    def _expert(self, context: dict) -> dict:
        f = _evidence_facts(context.get("evidence"))
        t = context["threshold"]
        if f["margin"] is None or f["stderr"] is None:
            return {"vote": "abstain",
                    "rationale": "no defined margin; abstaining"}
        edge = t * f["stderr"]
        if f["margin"] > edge:
            vote = "yes"
        elif f["margin"] < -edge:
            vote = "no"
        else:
            vote = "abstain"
        return {"vote": vote,
                "rationale": f"margin {f['margin']:.6g} vs threshold "
                             f"{t:.2f} standard errors ({edge:.6g})"}


class ExternalAgent:
    """LLM-provider adapter: one HTTP endpoint, chat-style JSON in and out.

    The endpoint receives {"model", "messages"} and must return either
    {"content": "..."} or an OpenAI-style choices list whose content is a
    JSON argument document. The API key is read from the named environment
    variable at call time.
    """

    def __init__(self, endpoint: str, model: str, api_key_env: str = "LABLOOP_API_KEY",
                 timeout: float = 60.0):
        self.endpoint = endpoint
        self.model = model
        self.api_key_env = api_key_env
        self.timeout = timeout

    def respond(self, role: str, context: dict) -> dict:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        body = {
            "model": self.model,
            "messages": [
                {"role": "system",
                 "content": f"You are the {role} in a materials-claim review. "
                            "Reply with a single JSON object and nothing else."},
                {"role": "user", "content": json.dumps(context, sort_keys=True)},
            ],
        }
        try:
            resp = requests.post(self.endpoint, json=body, headers=headers,
                                 timeout=self.timeout)
            resp.raise_for_status()
            payload = resp.json()
        except (requests.RequestException, ValueError) as exc:
            raise AgentFailure(f"agent endpoint error: {exc}") from exc

        if "content" in payload:
            content = payload["content"]
        else:
            try:
                content = payload["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError) as exc:
                raise AgentFailure("agent response has no content") from exc
        try:
            doc = json.loads(content)
        except (TypeError, json.JSONDecodeError) as exc:
            raise AgentFailure("agent content is not JSON") from exc
        validate_argument(role, doc)
        return doc


@lru_cache(maxsize=None)
def _argument_validator(role: str) -> jsonschema.Draft202012Validator:
    schema = json.loads(resources.files("labloop.data").joinpath(
        "schemas/agent_argument.schema.json").read_text("utf-8"))
    if role not in schema["$defs"]:
        raise AgentFailure(f"unknown role {role!r}")
    return jsonschema.Draft202012Validator(
        {"$defs": schema["$defs"], "$ref": f"#/$defs/{role}"})


def validate_argument(role: str, doc) -> None:
    """Check a document against the published per-role argument schema."""
    errors = list(_argument_validator(role).iter_errors(doc))
    if errors:
        raise AgentFailure(f"{role} argument violates schema: {errors[0].message}")
