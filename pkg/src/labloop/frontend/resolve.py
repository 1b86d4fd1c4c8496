"""Material and simulation-parameter resolution.

Per-material failures are returned as data, never raised, so one bad
material cannot suppress the others.
"""

from __future__ import annotations

from dataclasses import replace

from labloop.frontend.registry import MaterialRegistry
from labloop.frontend.types import (
    KNOWN_MODELS,
    KNOWN_OPTIMIZERS,
    PRECISIONS,
    CalculatorConfig,
    CanonicalHypothesis,
    MaterialRecord,
    ResolvedSpec,
    TaskConfig,
    UnitFailure,
)
from labloop.structure.cif import CifParseError, parse_cif

_CALC_FIELDS = {"model", "precision", "device", "seed"}
_TASK_FIELDS = {"optimizer", "fmax", "max_steps", "cell_relax"}


def resolve_materials(canonical: CanonicalHypothesis,
                      registry: MaterialRegistry) -> list[MaterialRecord | UnitFailure]:
    """One entry per target material, order preserved; failures are data."""
    out: list[MaterialRecord | UnitFailure] = []
    for key in canonical.target_materials:
        if key not in registry:
            out.append(UnitFailure(
                unit_id=key, stage="material_resolution",
                message=f"material {key!r} not found in registry {registry.version}",
                recoverable=False))
            continue
        record = registry.get(key)
        try:
            structure = parse_cif(record.cif_text)
        except CifParseError as exc:
            out.append(UnitFailure(
                unit_id=key, stage="material_resolution",
                message=f"registry CIF for {key!r} is unusable: {exc}",
                recoverable=False))
            continue
        if record.atoms_per_conventional_cell is None:
            record = replace(record, atoms_per_conventional_cell=len(structure))
        out.append(record)
    return out


def resolve_spec(canonical: CanonicalHypothesis,
                 overrides: dict | None = None) -> ResolvedSpec | UnitFailure:
    """Fill documented defaults, apply flat overrides, check ranges."""
    calc = CalculatorConfig().to_dict()
    task = TaskConfig().to_dict()
    for key, value in (overrides or {}).items():
        if key in _CALC_FIELDS:
            calc[key] = value
        elif key in _TASK_FIELDS:
            task[key] = value
        else:
            return _spec_failure(f"unknown parameter {key!r}")

    if calc["model"] not in KNOWN_MODELS:
        return _spec_failure(f"unknown model {calc['model']!r} (known: {list(KNOWN_MODELS)})")
    if calc["precision"] not in PRECISIONS:
        return _spec_failure(f"unknown precision {calc['precision']!r}")
    if not isinstance(calc["seed"], int) or isinstance(calc["seed"], bool):
        return _spec_failure(f"seed must be an integer, got {calc['seed']!r}")
    if task["optimizer"] not in KNOWN_OPTIMIZERS:
        return _spec_failure(f"unknown optimizer {task['optimizer']!r}")
    if not task["fmax"] > 0:
        return _spec_failure(f"fmax must be > 0 eV/Å, got {task['fmax']}")
    if int(task["max_steps"]) < 1:
        return _spec_failure(f"max_steps must be >= 1, got {task['max_steps']}")

    return ResolvedSpec(CalculatorConfig.from_dict(calc), TaskConfig.from_dict(task))


def _spec_failure(message: str) -> UnitFailure:
    return UnitFailure(unit_id="spec", stage="spec_resolution",
                       message=message, recoverable=False)
