#!/usr/bin/env python3
"""Regenerate the bundled benchmark file.

Each case's ground truth comes from the direct oracle: standalone
relaxation + property extraction per material at the documented defaults,
with the comparator evaluated outside the pipeline. Run from the repo
root; rewrites src/labloop/data/benchmark.json.
"""

import json
from pathlib import Path

import labloop
from labloop.frontend.grammar import parse_claim
from labloop.orchestrator.benchmark import evaluate_claim, oracle_properties

CASE_TEXTS = [
    # energetic
    ("energetic-1", "The cohesive energy per atom of Ar-fcc is less than -0.05 eV/atom"),
    ("energetic-2", "The cohesive energy per atom of Xe-fcc is less than that of Kr-fcc"),
    ("energetic-3", "The cohesive energy per atom of Ar-fcc is less than that of Kr-fcc"),
    ("energetic-4", "The cohesive energy per atom of Xe-fcc is greater than -0.1 eV/atom"),
    # mechanical
    ("mechanical-1", "The bulk modulus of Xe-fcc is greater than that of Ar-fcc"),
    ("mechanical-2", "The bulk modulus of Kr-fcc is greater than 2.5 GPa"),
    ("mechanical-3", "The bulk modulus of Ar-fcc is greater than that of Kr-fcc"),
    ("mechanical-4", "The bulk modulus of Xe-fcc is less than 3.0 GPa"),
    # structural
    ("structural-1", "The lattice constant of Ar-fcc is less than 5.5 Å"),
    ("structural-2", "The lattice constant of Xe-fcc is greater than that of Kr-fcc"),
    ("structural-3", "The lattice constant of Kr-fcc is within 0.05 Å of 5.65 Å"),
    ("structural-4", "The lattice constant of Ar-fcc is within 0.01 Å of 5.4 Å"),
]


def main():
    values = {key: oracle_properties(key) for key in ("Ar-fcc", "Kr-fcc", "Xe-fcc")}
    for key, props in values.items():
        print(key, {k: round(v, 6) for k, v in props.items()})

    cases = []
    for case_id, text in CASE_TEXTS:
        claim = parse_claim(text)
        truth = evaluate_claim(claim, values)
        subject_value = values[claim.subject][claim.property]
        if claim.reference_material:
            ref_desc = (f"{claim.reference_material}.{claim.property}="
                        f"{values[claim.reference_material][claim.property]:.6f}")
        else:
            ref_desc = f"{claim.reference_value}"
        provenance = (f"direct-oracle labloop-{labloop.__version__}: standalone "
                      f"relax+properties at defaults; {claim.subject}.{claim.property}="
                      f"{subject_value:.6f} {claim.comparator} {ref_desc} -> "
                      f"{'yes' if truth else 'no'}")
        cases.append({
            "case_id": case_id,
            "hypothesis_text": text,
            "category": claim.category,
            "ground_truth": "yes" if truth else "no",
            "ground_truth_provenance": provenance,
        })
        print(f"{case_id}: {cases[-1]['ground_truth']}")

    out = Path(__file__).resolve().parent.parent / "src/labloop/data/benchmark.json"
    out.write_text(json.dumps(cases, indent=2, ensure_ascii=False) + "\n", "utf-8")
    print(f"wrote {out} ({len(cases)} cases)")


if __name__ == "__main__":
    main()
