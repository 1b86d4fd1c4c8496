"""Free-text claims to schema-validated experiment specs."""

from labloop.frontend.types import (
    CanonicalHypothesis,
    Claim,
    ExecutionUnit,
    ExperimentSpec,
    Hypothesis,
    MaterialRecord,
    ResolvedSpec,
    UnitFailure,
)
from labloop.frontend.grammar import GrammarMismatch, parse_claim, render_claim
from labloop.frontend.canonicalize import (
    AgentOutputInvalid,
    CanonicalizationError,
    EmptyHypothesis,
    canonicalize,
)
from labloop.frontend.registry import MaterialRegistry
from labloop.frontend.resolve import resolve_materials, resolve_spec
from labloop.frontend.assemble import InvalidTrialCount, SchemaValidationFailure, assemble_units

__all__ = [
    "Hypothesis",
    "CanonicalHypothesis",
    "Claim",
    "MaterialRecord",
    "ResolvedSpec",
    "ExecutionUnit",
    "ExperimentSpec",
    "UnitFailure",
    "parse_claim",
    "render_claim",
    "GrammarMismatch",
    "canonicalize",
    "CanonicalizationError",
    "EmptyHypothesis",
    "AgentOutputInvalid",
    "MaterialRegistry",
    "resolve_materials",
    "resolve_spec",
    "assemble_units",
    "InvalidTrialCount",
    "SchemaValidationFailure",
]
