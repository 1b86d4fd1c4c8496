"""Unit assembly: expand materials x trials into a validated ExperimentSpec."""

from __future__ import annotations

import re

from labloop.canonical import content_digest
from labloop.frontend.types import (
    CanonicalHypothesis,
    ExecutionUnit,
    ExperimentSpec,
    MaterialRecord,
    ResolvedSpec,
    UnitFailure,
    format_unit_id,
)
from labloop.orchestrator.schema import validate_spec

_UNIT_PATH_RE = re.compile(r"^\$\.units\[(\d+)\]")


class InvalidTrialCount(ValueError):
    pass


class SchemaValidationFailure(RuntimeError):
    """Assembled document failed its own schema; signals an internal bug."""

    def __init__(self, diagnostics: list[str]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(diagnostics))


def assemble_units(canonical: CanonicalHypothesis,
                   materials: list[MaterialRecord | UnitFailure],
                   resolved: ResolvedSpec,
                   n_trials: int) -> ExperimentSpec:
    """Build one ExecutionUnit per resolved material-trial pair.

    Failed materials contribute one UnitFailure per would-be trial, so the
    units and failures together tile the material x trial grid exactly.
    Pure function: equal inputs give byte-identical canonical output.
    """
    if n_trials < 1:
        raise InvalidTrialCount(f"n_trials must be >= 1, got {n_trials}")

    base_seed = resolved.calculator.seed
    units: list[ExecutionUnit] = []
    failures: list[UnitFailure] = []
    for i, entry in enumerate(materials):
        for j in range(n_trials):
            uid = format_unit_id(i, j)
            if isinstance(entry, MaterialRecord):
                units.append(ExecutionUnit(
                    unit_id=uid, material=entry, trial_index=j, resolved=resolved,
                    perturbation_seed=base_seed + 1000 * i + j))
            else:
                failures.append(UnitFailure(
                    unit_id=uid, stage=entry.stage, message=entry.message,
                    recoverable=entry.recoverable))

    spec = _finish(canonical, units, failures)
    diagnostics = validate_spec(spec.to_dict())
    if diagnostics:
        spec = _quarantine(canonical, units, failures, diagnostics)
    return spec


def _finish(canonical: CanonicalHypothesis, units: list[ExecutionUnit],
            failures: list[UnitFailure]) -> ExperimentSpec:
    body = {
        "canonical_ref": canonical.id,
        "units": [u.to_dict() for u in units],
        "failures": [f.to_dict() for f in failures],
    }
    return ExperimentSpec(spec_id="spec-" + content_digest(body),
                          canonical_ref=canonical.id,
                          units=tuple(units), failures=tuple(failures))


def _quarantine(canonical: CanonicalHypothesis, units: list[ExecutionUnit],
                failures: list[UnitFailure], diagnostics: list[str]) -> ExperimentSpec:
    """Convert schema-invalid units into schema_validation failures."""
    bad: dict[int, list[str]] = {}
    for diag in diagnostics:
        m = _UNIT_PATH_RE.match(diag)
        if not m:
            raise SchemaValidationFailure(diagnostics)
        bad.setdefault(int(m.group(1)), []).append(diag)

    kept: list[ExecutionUnit] = []
    quarantined = list(failures)
    for k, unit in enumerate(units):
        if k in bad:
            quarantined.append(UnitFailure(
                unit_id=unit.unit_id, stage="schema_validation",
                message="; ".join(bad[k]), recoverable=False))
        else:
            kept.append(unit)

    spec = _finish(canonical, kept, quarantined)
    remaining = validate_spec(spec.to_dict())
    if remaining:
        raise SchemaValidationFailure(remaining)
    return spec
