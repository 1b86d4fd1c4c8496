"""The constrained claim grammar and its canonical renderer.

    claim := "The" property "of" MATERIAL
                 ( "is greater than" | "is less than" ) reference
           | "The" property "of" MATERIAL "is within" NUMBER UNIT "of" reference
    reference := "that of" MATERIAL | NUMBER UNIT
    property  := "bulk modulus" | "cohesive energy per atom" | "lattice constant"

Keywords are case-insensitive; material keys keep their case. Rendering a
parsed claim through render_claim and re-parsing yields an equal claim.
"""

from __future__ import annotations

import re

from labloop.frontend.types import PROPERTY_UNITS, Claim

PROPERTY_PHRASES = {
    ("bulk", "modulus"): "bulk_modulus",
    ("cohesive", "energy", "per", "atom"): "cohesive_energy_per_atom",
    ("lattice", "constant"): "lattice_constant",
}
PROPERTY_TEXT = {v: " ".join(k) for k, v in PROPERTY_PHRASES.items()}

# Accepted unit spellings, normalized to the canonical symbol.
UNIT_ALIASES = {
    "ev/atom": "eV/atom",
    "gpa": "GPa",
    "å": "Å",
    "angstrom": "Å",
    "angstroms": "Å",
}

_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_MATERIAL_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")


class GrammarMismatch(ValueError):
    """Text does not match any production; reports the longest-matched prefix."""

    def __init__(self, text: str, matched_tokens: list[str], expected: str):
        self.matched_prefix = " ".join(matched_tokens)
        self.expected = expected
        super().__init__(
            f"claim grammar mismatch after {self.matched_prefix!r}: expected {expected}")


class _Cursor:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0
        self.best = 0            # furthest token reached, for error reporting
        self.best_expected = "claim"

    def _note(self, expected: str):
        if self.pos >= self.best:
            self.best = self.pos
            self.best_expected = expected

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take_keyword(self, *words: str) -> bool:
        if self.pos + len(words) > len(self.tokens):
            self._note(" ".join(words))
            return False
        for k, word in enumerate(words):
            if self.tokens[self.pos + k].lower() != word:
                self._note(" ".join(words))
                return False
        self.pos += len(words)
        return True

    def take_number(self) -> float | None:
        tok = self.peek()
        if tok is not None and _NUMBER_RE.match(tok):
            self.pos += 1
            return float(tok)
        self._note("a number")
        return None

    def take_unit(self) -> str | None:
        tok = self.peek()
        if tok is not None and tok.lower() in UNIT_ALIASES:
            self.pos += 1
            return UNIT_ALIASES[tok.lower()]
        self._note("a unit (eV/atom, GPa, Å)")
        return None

    def take_material(self) -> str | None:
        tok = self.peek()
        if tok is not None and _MATERIAL_RE.match(tok):
            self.pos += 1
            return tok
        self._note("a material key")
        return None

    def fail(self, text: str):
        raise GrammarMismatch(text, self.tokens[:self.best], self.best_expected)


def _take_property(cur: _Cursor) -> str | None:
    for phrase, name in PROPERTY_PHRASES.items():
        if cur.take_keyword(*phrase):
            return name
    return None


def _take_reference(cur: _Cursor) -> tuple[str | None, float | None, str | None]:
    """Returns (material, value, unit); exactly one side is populated."""
    if cur.take_keyword("that", "of"):
        material = cur.take_material()
        return material, None, None
    value = cur.take_number()
    if value is None:
        return None, None, None
    unit = cur.take_unit()
    return None, value, unit


def parse_claim(text: str) -> Claim:
    tokens = text.split()
    cur = _Cursor(tokens)

    if not cur.take_keyword("the"):
        cur.fail(text)
    prop = _take_property(cur)
    if prop is None:
        cur.fail(text)
    if not cur.take_keyword("of"):
        cur.fail(text)
    subject = cur.take_material()
    if subject is None:
        cur.fail(text)

    comparator: str | None = None
    tolerance: float | None = None
    if cur.take_keyword("is", "greater", "than"):
        comparator = "GT"
    elif cur.take_keyword("is", "less", "than"):
        comparator = "LT"
    elif cur.take_keyword("is", "within"):
        comparator = "WITHIN"
        tolerance = cur.take_number()
        if tolerance is None:
            cur.fail(text)
        tol_unit = cur.take_unit()
        if tol_unit is None or tol_unit != PROPERTY_UNITS[prop]:
            cur._note(f"tolerance unit {PROPERTY_UNITS[prop]}")
            cur.fail(text)
        if not cur.take_keyword("of"):
            cur.fail(text)
    else:
        cur.fail(text)

    ref_material, ref_value, ref_unit = _take_reference(cur)
    if ref_material is None and ref_value is None:
        cur.fail(text)
    if ref_value is not None:
        if ref_unit is None or ref_unit != PROPERTY_UNITS[prop]:
            cur._note(f"reference unit {PROPERTY_UNITS[prop]}")
            cur.fail(text)
    if cur.pos != len(tokens):
        cur._note("end of claim")
        cur.fail(text)

    form = "relational" if ref_material is not None else "threshold"
    try:
        return Claim(property=prop, form=form, subject=subject, comparator=comparator,
                     reference_value=ref_value, reference_unit=ref_unit,
                     reference_material=ref_material, tolerance=tolerance)
    except ValueError as exc:
        # e.g. self-referential relational claim
        raise GrammarMismatch(text, tokens, str(exc)) from exc


def render_claim(claim: Claim) -> str:
    """Canonical template; parse_claim(render_claim(c)) is structurally c."""
    prop_text = PROPERTY_TEXT[claim.property]
    if claim.reference_material is not None:
        ref = f"that of {claim.reference_material}"
    else:
        ref = f"{claim.reference_value!r} {claim.reference_unit}"
    if claim.comparator == "GT":
        return f"The {prop_text} of {claim.subject} is greater than {ref}"
    if claim.comparator == "LT":
        return f"The {prop_text} of {claim.subject} is less than {ref}"
    return (f"The {prop_text} of {claim.subject} is within "
            f"{claim.tolerance!r} {claim.unit} of {ref}")
