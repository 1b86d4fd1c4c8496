"""Deterministic in-silico property backend: shifted pair potential, FIRE
relaxation, and energetic/mechanical/structural property extraction."""

from labloop.calculator.potential import (
    NumericalBlowup,
    PotentialParams,
    UnknownSpecies,
    energy_forces,
)
from labloop.calculator.relax import RelaxationOutcome, relax
from labloop.calculator.properties import (
    EOSFitFailure,
    NotConverged,
    birch_murnaghan_energy,
    compute_properties,
    fit_birch_murnaghan,
)
from labloop.calculator.runner import SimulationResult, run_unit

__all__ = [
    "PotentialParams",
    "UnknownSpecies",
    "NumericalBlowup",
    "energy_forces",
    "relax",
    "RelaxationOutcome",
    "compute_properties",
    "fit_birch_murnaghan",
    "birch_murnaghan_energy",
    "EOSFitFailure",
    "NotConverged",
    "run_unit",
    "SimulationResult",
]
