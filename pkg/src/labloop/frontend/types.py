"""Domain types for the pre-experiment pipeline.

Everything here serializes through to_dict/from_dict pairs; the dict shapes
are the published JSON contracts (see data/schemas/).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from labloop.canonical import content_digest

SCHEMA_VERSION = "1"

PROPERTY_UNITS = {
    "cohesive_energy_per_atom": "eV/atom",
    "bulk_modulus": "GPa",
    "lattice_constant": "Å",
}
PROPERTY_CATEGORY = {
    "cohesive_energy_per_atom": "energetic",
    "bulk_modulus": "mechanical",
    "lattice_constant": "structural",
}
CATEGORIES = ("energetic", "mechanical", "structural")
INTENTS = ("verify", "compare", "screen")
COMPARATORS = ("GT", "LT", "WITHIN")
FAILURE_STAGES = ("material_resolution", "spec_resolution", "schema_validation",
                  "parse", "simulation")
KNOWN_MODELS = ("lj-toy",)
KNOWN_OPTIMIZERS = ("fire",)
PRECISIONS = ("float64", "float32")

_UNIT_ID_RE = re.compile(r"^m(\d+)-t(\d+)$")


def format_unit_id(material_index: int, trial_index: int) -> str:
    return f"m{material_index}-t{trial_index}"


def parse_unit_id(unit_id: str) -> tuple[int, int]:
    m = _UNIT_ID_RE.match(unit_id)
    if not m:
        raise ValueError(f"not a unit id: {unit_id!r}")
    return int(m.group(1)), int(m.group(2))


@dataclass(frozen=True)
class Hypothesis:
    """Raw submission; emptiness is policed by canonicalize (EmptyHypothesis)."""

    id: str
    text: str
    submitted_at: str

    def to_dict(self) -> dict:
        return {"id": self.id, "text": self.text, "submitted_at": self.submitted_at}

    @classmethod
    def from_dict(cls, doc: dict) -> "Hypothesis":
        return cls(doc["id"], doc["text"], doc["submitted_at"])


@dataclass(frozen=True)
class Claim:
    """A binary-checkable statement about one property of one material."""

    property: str
    form: str                    # threshold | relational
    subject: str
    comparator: str              # GT | LT | WITHIN
    reference_value: float | None = None
    reference_unit: str | None = None
    reference_material: str | None = None
    tolerance: float | None = None

    def __post_init__(self):
        if self.property not in PROPERTY_UNITS:
            raise ValueError(f"unknown property {self.property!r}")
        if self.comparator not in COMPARATORS:
            raise ValueError(f"unknown comparator {self.comparator!r}")
        if self.form == "threshold":
            if self.reference_value is None or self.reference_material is not None:
                raise ValueError("threshold form needs a scalar reference")
            if self.reference_unit != PROPERTY_UNITS[self.property]:
                raise ValueError(
                    f"reference unit {self.reference_unit!r} does not match "
                    f"{self.property} ({PROPERTY_UNITS[self.property]})")
        elif self.form == "relational":
            if self.reference_material is None or self.reference_value is not None:
                raise ValueError("relational form needs a material reference")
            if self.reference_material == self.subject:
                raise ValueError("relational reference must name a distinct material")
        else:
            raise ValueError(f"unknown claim form {self.form!r}")
        if self.comparator == "WITHIN":
            if self.tolerance is None or self.tolerance < 0:
                raise ValueError("WITHIN requires tolerance >= 0")
        elif self.tolerance is not None:
            raise ValueError("tolerance only allowed with WITHIN")

    @property
    def category(self) -> str:
        return PROPERTY_CATEGORY[self.property]

    @property
    def unit(self) -> str:
        return PROPERTY_UNITS[self.property]

    def materials(self) -> list[str]:
        out = [self.subject]
        if self.reference_material is not None:
            out.append(self.reference_material)
        return out

    def to_dict(self) -> dict:
        if self.form == "threshold":
            reference: dict = {"value": self.reference_value, "unit": self.reference_unit}
        else:
            reference = {"material": self.reference_material}
        doc = {"property": self.property, "form": self.form, "subject": self.subject,
               "comparator": self.comparator, "reference": reference}
        if self.tolerance is not None:
            doc["tolerance"] = self.tolerance
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Claim":
        ref = doc["reference"]
        return cls(
            property=doc["property"], form=doc["form"], subject=doc["subject"],
            comparator=doc["comparator"],
            reference_value=ref.get("value"), reference_unit=ref.get("unit"),
            reference_material=ref.get("material"),
            tolerance=doc.get("tolerance"),
        )


@dataclass(frozen=True)
class CanonicalHypothesis:
    intent: str
    research_questions: tuple[str, ...]
    claim: Claim
    target_materials: tuple[str, ...]
    category: str

    def __post_init__(self):
        if self.intent not in INTENTS:
            raise ValueError(f"unknown intent {self.intent!r}")
        if not self.research_questions:
            raise ValueError("at least one research question required")
        if not self.target_materials:
            raise ValueError("at least one target material required")
        missing = [m for m in self.claim.materials() if m not in self.target_materials]
        if missing:
            raise ValueError(f"claim references materials not targeted: {missing}")
        if self.category != self.claim.category:
            raise ValueError(
                f"category {self.category!r} inconsistent with property "
                f"{self.claim.property!r} ({self.claim.category})")
        object.__setattr__(self, "research_questions", tuple(self.research_questions))
        object.__setattr__(self, "target_materials", tuple(self.target_materials))

    @property
    def id(self) -> str:
        return "ch-" + content_digest(self.to_dict())

    def to_dict(self) -> dict:
        return {
            "intent": self.intent,
            "research_questions": list(self.research_questions),
            "claim": self.claim.to_dict(),
            "target_materials": list(self.target_materials),
            "category": self.category,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CanonicalHypothesis":
        return cls(doc["intent"], tuple(doc["research_questions"]),
                   Claim.from_dict(doc["claim"]), tuple(doc["target_materials"]),
                   doc["category"])


@dataclass(frozen=True)
class MaterialRecord:
    key: str
    formula: str
    cif_text: str
    provenance: str
    atoms_per_conventional_cell: int | None = None

    def __post_init__(self):
        if not self.provenance:
            raise ValueError("provenance must be non-empty")

    def to_dict(self) -> dict:
        doc = {"key": self.key, "formula": self.formula, "cif_text": self.cif_text,
               "provenance": self.provenance}
        if self.atoms_per_conventional_cell is not None:
            doc["atoms_per_conventional_cell"] = self.atoms_per_conventional_cell
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "MaterialRecord":
        return cls(doc["key"], doc["formula"], doc["cif_text"], doc["provenance"],
                   doc.get("atoms_per_conventional_cell"))


@dataclass(frozen=True)
class CalculatorConfig:
    model: str = "lj-toy"
    precision: str = "float64"
    device: str = "cpu"
    seed: int = 42

    def to_dict(self) -> dict:
        return {"model": self.model, "precision": self.precision,
                "device": self.device, "seed": self.seed}

    @classmethod
    def from_dict(cls, doc: dict) -> "CalculatorConfig":
        return cls(doc["model"], doc["precision"], doc["device"], int(doc["seed"]))


@dataclass(frozen=True)
class TaskConfig:
    optimizer: str = "fire"
    fmax: float = 0.05           # eV/Å
    max_steps: int = 500
    cell_relax: bool = True

    def to_dict(self) -> dict:
        return {"optimizer": self.optimizer, "fmax": self.fmax,
                "max_steps": self.max_steps, "cell_relax": self.cell_relax}

    @classmethod
    def from_dict(cls, doc: dict) -> "TaskConfig":
        return cls(doc["optimizer"], float(doc["fmax"]), int(doc["max_steps"]),
                   bool(doc["cell_relax"]))


@dataclass(frozen=True)
class ResolvedSpec:
    calculator: CalculatorConfig = field(default_factory=CalculatorConfig)
    task: TaskConfig = field(default_factory=TaskConfig)

    def to_dict(self) -> dict:
        return {"calculator": self.calculator.to_dict(), "task": self.task.to_dict()}

    @classmethod
    def from_dict(cls, doc: dict) -> "ResolvedSpec":
        return cls(CalculatorConfig.from_dict(doc["calculator"]),
                   TaskConfig.from_dict(doc["task"]))


@dataclass(frozen=True)
class ExecutionUnit:
    unit_id: str
    material: MaterialRecord
    trial_index: int
    resolved: ResolvedSpec
    perturbation_seed: int

    def to_dict(self) -> dict:
        return {
            "unit_id": self.unit_id,
            "material": self.material.to_dict(),
            "trial_index": self.trial_index,
            "resolved": self.resolved.to_dict(),
            "perturbation_seed": self.perturbation_seed,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExecutionUnit":
        return cls(doc["unit_id"], MaterialRecord.from_dict(doc["material"]),
                   int(doc["trial_index"]), ResolvedSpec.from_dict(doc["resolved"]),
                   int(doc["perturbation_seed"]))


@dataclass(frozen=True)
class UnitFailure:
    unit_id: str                 # grid id, or material key / "spec" before units exist
    stage: str
    message: str
    recoverable: bool = False

    def __post_init__(self):
        if self.stage not in FAILURE_STAGES:
            raise ValueError(f"unknown failure stage {self.stage!r}")
        if not self.message:
            raise ValueError("failure message must be non-empty")

    def to_dict(self) -> dict:
        return {"unit_id": self.unit_id, "stage": self.stage,
                "message": self.message, "recoverable": self.recoverable}

    @classmethod
    def from_dict(cls, doc: dict) -> "UnitFailure":
        return cls(doc["unit_id"], doc["stage"], doc["message"], bool(doc["recoverable"]))


@dataclass(frozen=True)
class ExperimentSpec:
    spec_id: str
    canonical_ref: str
    units: tuple[ExecutionUnit, ...]
    failures: tuple[UnitFailure, ...]
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "spec_id": self.spec_id,
            "canonical_ref": self.canonical_ref,
            "units": [u.to_dict() for u in self.units],
            "failures": [f.to_dict() for f in self.failures],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentSpec":
        return cls(doc["spec_id"], doc["canonical_ref"],
                   tuple(ExecutionUnit.from_dict(u) for u in doc["units"]),
                   tuple(UnitFailure.from_dict(f) for f in doc["failures"]),
                   doc["schema_version"])
