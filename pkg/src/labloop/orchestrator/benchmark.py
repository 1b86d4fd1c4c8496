"""Benchmark harness: binary yes/no verification over a case file.

A case is correct when the run's final decision maps onto its ground
truth (supported -> yes, refuted -> no); inconclusive always counts as
incorrect. Ground truths for the bundled file were produced by the direct
oracle below: relax each material standalone at the documented defaults
and evaluate the comparator outside the pipeline.
"""

from __future__ import annotations

import json
import tempfile
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from labloop.calculator.potential import PotentialParams
from labloop.calculator.properties import compute_properties
from labloop.calculator.relax import relax
from labloop.frontend.grammar import parse_claim
from labloop.frontend.registry import MaterialRegistry
from labloop.frontend.types import CATEGORIES, Claim, Hypothesis, TaskConfig
from labloop.orchestrator.engine import RunConfig, execute_run
from labloop.orchestrator.events import utc_now
from labloop.structure.cif import parse_cif

DECISION_TO_ANSWER = {"supported": "yes", "refuted": "no"}


class EmptyBenchmark(ValueError):
    pass


@dataclass(frozen=True)
class BenchmarkCase:
    case_id: str
    hypothesis_text: str
    category: str
    ground_truth: str            # yes | no
    ground_truth_provenance: str

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")
        if self.ground_truth not in ("yes", "no"):
            raise ValueError("ground_truth must be yes or no")
        if not self.ground_truth_provenance:
            raise ValueError("ground_truth_provenance must be non-empty")
        parse_claim(self.hypothesis_text)  # must be grammatical

    def to_dict(self) -> dict:
        return {"case_id": self.case_id, "hypothesis_text": self.hypothesis_text,
                "category": self.category, "ground_truth": self.ground_truth,
                "ground_truth_provenance": self.ground_truth_provenance}

    @classmethod
    def from_dict(cls, doc: dict) -> "BenchmarkCase":
        return cls(doc["case_id"], doc["hypothesis_text"], doc["category"],
                   doc["ground_truth"], doc["ground_truth_provenance"])


def load_cases(path: str | Path) -> list[BenchmarkCase]:
    with open(path, encoding="utf-8") as fh:
        return [BenchmarkCase.from_dict(doc) for doc in json.load(fh)]


def bundled_cases() -> list[BenchmarkCase]:
    text = resources.files("labloop.data").joinpath("benchmark.json").read_text("utf-8")
    return [BenchmarkCase.from_dict(doc) for doc in json.loads(text)]


# -- direct oracle ----------------------------------------------------------

def oracle_properties(material_key: str,
                      registry: MaterialRegistry | None = None,
                      params: PotentialParams | None = None) -> dict[str, float]:
    """Relax one material at the documented defaults and extract all three
    properties, bypassing spec assembly, trials, and discussion entirely."""
    registry = registry or MaterialRegistry.builtin()
    params = params or PotentialParams.builtin()
    record = registry.get(material_key)
    structure = parse_cif(record.cif_text)
    outcome = relax(structure, params, TaskConfig())
    values: dict[str, float] = {}
    for category in CATEGORIES:
        for name, entry in compute_properties(
                outcome, params, category, record.atoms_per_conventional_cell).items():
            values[name] = entry["value"]
    return values


def evaluate_claim(claim: Claim, values: dict[str, dict[str, float]]) -> bool:
    """Truth of a claim given per-material oracle property values."""
    subject = values[claim.subject][claim.property]
    if claim.reference_material is not None:
        reference = values[claim.reference_material][claim.property]
    else:
        reference = claim.reference_value
    if claim.comparator == "GT":
        return subject > reference
    if claim.comparator == "LT":
        return subject < reference
    return abs(subject - reference) <= claim.tolerance


# -- harness ----------------------------------------------------------------

def run_benchmark(cases: list[BenchmarkCase], config: RunConfig,
                  work_dir: str | Path | None = None,
                  registry: MaterialRegistry | None = None,
                  backend=None) -> dict:
    if not cases:
        raise EmptyBenchmark("no benchmark cases supplied")
    work_dir = Path(work_dir) if work_dir else Path(tempfile.mkdtemp(prefix="labloop-bench-"))

    per_case = []
    correct_by_category: dict[str, list[bool]] = {c: [] for c in CATEGORIES}
    n_refined = 0
    wall_times = []
    for case in cases:
        started = time.perf_counter()
        hypothesis = Hypothesis(id=case.case_id, text=case.hypothesis_text,
                                submitted_at=utc_now())
        report = execute_run(hypothesis, config, work_dir / case.case_id,
                             registry=registry, backend=backend)
        wall_ms = (time.perf_counter() - started) * 1000.0
        wall_times.append(wall_ms)
        decision = report["final_decision"]
        answer = DECISION_TO_ANSWER.get(decision)
        is_correct = answer == case.ground_truth
        refined = report["total_iterations"] > 1
        n_refined += refined
        correct_by_category[case.category].append(is_correct)
        per_case.append({
            "case_id": case.case_id,
            "category": case.category,
            "decision": decision,
            "expected": case.ground_truth,
            "correct": is_correct,
            "iterations": report["total_iterations"],
            "wall_time_ms": wall_ms,
        })

    all_flags = [c["correct"] for c in per_case]
    return {
        "overall_accuracy": sum(all_flags) / len(all_flags),
        "per_category_accuracy": {
            category: (sum(flags) / len(flags) if flags else None)
            for category, flags in correct_by_category.items()
        },
        "n_cases": len(cases),
        "n_refined": n_refined,
        "mean_wall_time_ms": sum(wall_times) / len(wall_times),
        "cases": per_case,
    }
