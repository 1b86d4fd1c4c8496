"""Experiment-spec validation: JSON Schema plus cross-field rules.

Diagnostics are plain strings "path: rule", returned as data; an empty
list means the document is a valid ExperimentSpec. The structural layer
is the published JSON Schema; coverage/uniqueness/seed rules live here
because JSON Schema cannot express them.
"""

from __future__ import annotations

import json
import re
from functools import lru_cache
from importlib import resources

import jsonschema

_UNIT_ID_RE = re.compile(r"^m(\d+)-t(\d+)$")


@lru_cache(maxsize=None)
def experiment_spec_schema() -> dict:
    text = resources.files("labloop.data").joinpath(
        "schemas/experiment_spec.schema.json").read_text("utf-8")
    return json.loads(text)


def _json_path(error: jsonschema.ValidationError) -> str:
    path = "$"
    for part in error.absolute_path:
        path += f"[{part}]" if isinstance(part, int) else f".{part}"
    return path


def validate_spec(document: dict) -> list[str]:
    """Return diagnostics; empty iff the document is a valid spec."""
    validator = jsonschema.Draft202012Validator(experiment_spec_schema())
    diagnostics = [f"{_json_path(err)}: {err.message}"
                   for err in sorted(validator.iter_errors(document), key=_json_path)]
    if diagnostics:
        return diagnostics

    units = document["units"]
    failures = document["failures"]

    seen: dict[str, str] = {}
    grid: dict[tuple[int, int], str] = {}
    for k, unit in enumerate(units):
        uid = unit["unit_id"]
        if uid in seen:
            diagnostics.append(f"$.units[{k}].unit_id: duplicate unit_id {uid!r}")
            continue
        seen[uid] = f"units[{k}]"
        i, j = (int(g) for g in _UNIT_ID_RE.match(uid).groups())
        grid[(i, j)] = uid
        base = unit["resolved"]["calculator"]["seed"]
        expected = base + 1000 * i + j
        if unit["perturbation_seed"] != expected:
            diagnostics.append(
                f"$.units[{k}].perturbation_seed: must equal calculator seed "
                f"+ 1000*{i} + {j} = {expected}, got {unit['perturbation_seed']}")

    for k, failure in enumerate(failures):
        uid = failure["unit_id"]
        m = _UNIT_ID_RE.match(uid)
        if not m:
            diagnostics.append(
                f"$.failures[{k}].unit_id: {uid!r} is not a grid id m<i>-t<j>")
            continue
        if uid in seen:
            diagnostics.append(
                f"$.failures[{k}].unit_id: {uid!r} already used by {seen[uid]}")
            continue
        seen[uid] = f"failures[{k}]"
        i, j = (int(g) for g in m.groups())
        grid[(i, j)] = uid

    if grid:
        n_mat = max(i for i, _ in grid) + 1
        n_tri = max(j for _, j in grid) + 1
        missing = [(i, j) for i in range(n_mat) for j in range(n_tri)
                   if (i, j) not in grid]
        if missing:
            diagnostics.append(
                "$.units: material x trial grid has holes at "
                + ", ".join(f"m{i}-t{j}" for i, j in missing[:8])
                + ("..." if len(missing) > 8 else ""))

    return diagnostics
