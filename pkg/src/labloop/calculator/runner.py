"""Execute one material-trial unit: parse, perturb, relax, extract.

Failures come back as UnitFailure data so sibling units always proceed.
Apart from wall_time_ms the result is a pure function of the unit and the
potential parameters.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

import labloop
from labloop.calculator.potential import NumericalBlowup, PotentialParams, UnknownSpecies
from labloop.calculator.properties import EOSFitFailure, NotConverged, compute_properties
from labloop.calculator.relax import RelaxationOutcome, relax
from labloop.frontend.types import CATEGORIES, ExecutionUnit, UnitFailure
from labloop.structure.cif import CifParseError, parse_cif
from labloop.structure.model import Structure

TRIAL_DISPLACEMENT = 0.01        # Å, uniform bound per Cartesian component


@dataclass(frozen=True)
class SimulationResult:
    unit_id: str
    properties: dict[str, dict]
    relaxation: RelaxationOutcome
    provenance: dict
    wall_time_ms: float

    def to_dict(self) -> dict:
        return {
            "unit_id": self.unit_id,
            "properties": self.properties,
            "relaxation": self.relaxation.to_dict(),
            "provenance": self.provenance,
            "wall_time_ms": self.wall_time_ms,
        }


def apply_trial_perturbation(s: Structure, trial_index: int, seed: int) -> Structure:
    """Seeded random displacement of every Cartesian component; trial 0 is exact."""
    if trial_index == 0:
        return s
    rng = np.random.default_rng(seed)
    delta = rng.uniform(-TRIAL_DISPLACEMENT, TRIAL_DISPLACEMENT, size=(len(s), 3))
    return s.with_cart_coords(s.cart_coords + delta)


def run_unit(unit: ExecutionUnit, params: PotentialParams) -> SimulationResult | UnitFailure:
    """Run one unit end to end; never raises for per-unit problems.

    All three property categories are computed so downstream consumers can
    evaluate any claim against the same result document.
    """
    started = time.perf_counter()
    calc = unit.resolved.calculator
    try:
        structure = parse_cif(unit.material.cif_text)
    except CifParseError as exc:
        return UnitFailure(unit_id=unit.unit_id, stage="parse",
                           message=str(exc), recoverable=False)

    try:
        params.check_species(structure.species)
        perturbed = apply_trial_perturbation(structure, unit.trial_index,
                                             unit.perturbation_seed)
        outcome = relax(perturbed, params, unit.resolved.task, calc.precision)
        properties: dict[str, dict] = {}
        for category in CATEGORIES:
            properties.update(compute_properties(
                outcome, params, category,
                unit.material.atoms_per_conventional_cell, calc.precision))
    except (NotConverged, NumericalBlowup, EOSFitFailure, UnknownSpecies) as exc:
        return UnitFailure(unit_id=unit.unit_id, stage="simulation",
                           message=f"{type(exc).__name__}: {exc}", recoverable=True)

    wall_ms = (time.perf_counter() - started) * 1000.0
    return SimulationResult(
        unit_id=unit.unit_id,
        properties=properties,
        relaxation=outcome,
        provenance={"model": calc.model, "precision": calc.precision,
                    "device": calc.device, "seed": calc.seed,
                    "code_version": labloop.__version__},
        wall_time_ms=wall_ms,
    )
