"""Validation reports: the structured final output plus a rendered document.

Section order of the rendered form is fixed: hypothesis, claim,
per-iteration evidence, transcript, verdict, final decision.
"""

from __future__ import annotations

from labloop.frontend.types import PROPERTY_UNITS, parse_unit_id
from labloop.orchestrator.state import RunState


class IncompleteRun(RuntimeError):
    pass


def _unit_row(unit_id: str, outcome: dict) -> dict:
    if "stage" in outcome:
        return {"unit_id": unit_id, "status": f"failed ({outcome['stage']})",
                "message": outcome["message"], "properties": {}}
    props = {name: outcome["properties"][name]["value"]
             for name in outcome.get("properties", {})}
    status = "converged" if outcome.get("relaxation", {}).get("converged") else "unconverged"
    return {"unit_id": unit_id, "status": status, "properties": props}


def _iteration_block(record: dict) -> dict:
    spec = record["spec"]
    results = record["results"]
    rows = [_unit_row(uid, results[uid]) for uid in sorted(results, key=parse_unit_id)]
    return {
        "iteration": record["iteration"],
        "spec_summary": {
            "spec_id": spec["spec_id"],
            "n_units": len(spec["units"]),
            "n_pre_experiment_failures": len(spec["failures"]),
            "n_trials": record["n_trials"],
            "fmax": record["fmax"],
        },
        "unit_table": rows,
        "transcript": record["transcript"],
        "verdict": record["verdict"],
    }


def build_report(state: RunState, final_decision: str,
                 total_wall_time_ms: float) -> dict:
    canonical = state.iterations[0]["canonical"] if state.iterations else None
    return {
        "hypothesis_text": state.hypothesis.get("text", ""),
        "canonical": canonical,
        "iterations": [_iteration_block(r) for r in state.iterations],
        "final_decision": final_decision,
        "total_iterations": len(state.iterations),
        "total_wall_time_ms": total_wall_time_ms,
        "revision_policy": "revisions re-parameterize the experiment "
                           "(trials, fmax); the claim text is never rewritten",
    }


def generate_report(state: RunState) -> dict:
    """Report for a run that reached reporting (or a terminal state)."""
    if state.state not in ("reporting", "finished", "aborted"):
        raise IncompleteRun(f"run is still {state.state}")
    if state.report is not None:
        return state.report
    decision = state.final_decision or "inconclusive"
    return build_report(state, decision, 0.0)


def render_report(report: dict) -> str:
    lines = ["# Validation Report", ""]
    lines += ["## Hypothesis", "", report["hypothesis_text"], ""]

    lines += ["## Canonical Claim", ""]
    canonical = report.get("canonical")
    if canonical:
        claim = canonical["claim"]
        lines.append(f"- property: {claim['property']} [{PROPERTY_UNITS[claim['property']]}]")
        lines.append(f"- subject: {claim['subject']}")
        lines.append(f"- comparator: {claim['comparator']}")
        lines.append(f"- reference: {claim['reference']}")
        if "tolerance" in claim:
            lines.append(f"- tolerance: {claim['tolerance']}")
        lines.append(f"- category: {canonical['category']}")
    else:
        lines.append("(canonicalization did not complete)")
    lines.append("")

    for block in report["iterations"]:
        n = block["iteration"]
        lines += [f"## Iteration {n}: Evidence", ""]
        summary = block["spec_summary"]
        lines.append(f"- spec {summary['spec_id']}: {summary['n_units']} units, "
                     f"{summary['n_trials']} trials, fmax {summary['fmax']} eV/Å, "
                     f"{summary['n_pre_experiment_failures']} pre-experiment failures")
        lines.append("")
        lines.append("| unit | status | properties |")
        lines.append("|------|--------|------------|")
        for row in block["unit_table"]:
            props = ", ".join(f"{k}={v:.6g}" for k, v in row["properties"].items())
            lines.append(f"| {row['unit_id']} | {row['status']} | {props} |")
        lines.append("")

        lines += [f"## Iteration {n}: Transcript", ""]
        for turn in block["transcript"]:
            argument = turn["argument"]
            body = argument.get("text") or argument.get("rationale") \
                or f"vote: {argument.get('vote')}"
            lines.append(f"- [round {turn['round_index']}] **{turn['role']}**: {body}")
        lines.append("")

        lines += [f"## Iteration {n}: Verdict", ""]
        verdict = block["verdict"]
        if verdict:
            lines.append(f"- strategy: {verdict['strategy']}")
            lines.append(f"- decision: {verdict['decision']}")
            lines.append(f"- confidence: {verdict['confidence']:.3f}")
        else:
            lines.append("(no verdict reached)")
        lines.append("")

    lines += ["## Final Decision", "",
              f"**{report['final_decision']}** after {report['total_iterations']} "
              f"iteration(s).", ""]
    return "\n".join(lines)
