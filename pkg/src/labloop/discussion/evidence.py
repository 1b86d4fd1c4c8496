"""Aggregate per-unit results into the statistics the agents argue over.

The margin is signed so that positive always supports the claim:

    GT      mean(subject) - reference
    LT      reference - mean(subject)
    WITHIN  tolerance - |mean(subject) - reference|

where reference is the threshold value or the reference material's mean.
Its standard error propagates from the per-material standard errors of the
mean (sample std over converged trials, n-1 denominator).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from labloop.frontend.types import Claim, parse_unit_id


class NoEvidence(RuntimeError):
    """Zero converged trials overall; there is nothing to argue about."""


@dataclass(frozen=True)
class MaterialStats:
    n_trials: int
    n_converged: int
    mean: float | None
    sample_std: float | None
    stderr: float | None
    unit: str
    converged_units: tuple[str, ...]
    failed_units: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"n_trials": self.n_trials, "n_converged": self.n_converged,
                "mean": self.mean, "sample_std": self.sample_std,
                "stderr": self.stderr, "unit": self.unit,
                "converged_units": list(self.converged_units),
                "failed_units": list(self.failed_units)}


@dataclass(frozen=True)
class EvidenceSummary:
    claim: Claim
    per_material: dict[str, MaterialStats]
    margin: float | None
    margin_stderr: float | None

    @property
    def all_converged(self) -> bool:
        return all(s.n_converged == s.n_trials for s in self.per_material.values())

    @property
    def unit(self) -> str:
        return self.claim.unit

    def to_dict(self) -> dict:
        return {
            "claim": self.claim.to_dict(),
            "per_material": {k: v.to_dict() for k, v in self.per_material.items()},
            "margin": self.margin,
            "margin_stderr": self.margin_stderr,
        }


def _stats(values: list[float], trials: int, unit: str,
           converged: list[str], failed: list[str]) -> MaterialStats:
    if not values:
        return MaterialStats(trials, 0, None, None, None, unit,
                             tuple(converged), tuple(failed))
    n = len(values)
    mean = sum(values) / n
    std = math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1)) if n > 1 else 0.0
    return MaterialStats(trials, n, mean, std, std / math.sqrt(n), unit,
                         tuple(converged), tuple(failed))


def summarize_evidence(results: list[dict], claim: Claim,
                       material_order: list[str]) -> EvidenceSummary:
    """Fold result documents (wire format) into per-material aggregates.

    ``material_order`` maps the unit-id material index back to material
    keys; it is the canonical hypothesis's target_materials list.
    """
    prop = claim.property
    values: dict[str, list[float]] = {key: [] for key in material_order}
    converged: dict[str, list[str]] = {key: [] for key in material_order}
    failed: dict[str, list[str]] = {key: [] for key in material_order}
    trials: dict[str, int] = {key: 0 for key in material_order}

    for doc in results:
        i, _ = parse_unit_id(doc["unit_id"])
        key = material_order[i]
        trials[key] += 1
        if "stage" in doc or not doc.get("relaxation", {}).get("converged", False):
            failed[key].append(doc["unit_id"])
            continue
        converged[key].append(doc["unit_id"])
        values[key].append(float(doc["properties"][prop]["value"]))

    if not any(values.values()):
        raise NoEvidence("no unit produced a converged result")

    per_material = {key: _stats(values[key], trials[key], claim.unit,
                                converged[key], failed[key])
                    for key in material_order}

    subject = per_material.get(claim.subject)
    margin = stderr = None
    if subject is not None and subject.mean is not None:
        if claim.reference_material is not None:
            ref_stats = per_material.get(claim.reference_material)
            if ref_stats is not None and ref_stats.mean is not None:
                reference = ref_stats.mean
                stderr = math.sqrt(subject.stderr ** 2 + ref_stats.stderr ** 2)
            else:
                reference = None
        else:
            reference = claim.reference_value
            stderr = subject.stderr
        if reference is not None:
            if claim.comparator == "GT":
                margin = subject.mean - reference
            elif claim.comparator == "LT":
                margin = reference - subject.mean
            else:  # WITHIN
                margin = claim.tolerance - abs(subject.mean - reference)
        else:
            stderr = None

    return EvidenceSummary(claim=claim, per_material=per_material,
                           margin=margin, margin_stderr=stderr)
