"""Versioned material registry: a bundled JSON file of pre-expanded P1 CIFs.

Registry file format: JSON map key -> {formula, cif, provenance} with an
optional atoms_per_conventional_cell (defaults to the parsed cell's atom
count), used when reporting lattice constants for supercells.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from labloop.frontend.types import MaterialRecord


class MaterialRegistry:
    def __init__(self, entries: dict[str, dict], version: str = "unversioned"):
        self.version = version
        self._entries = entries

    @classmethod
    def from_file(cls, path: str | Path) -> "MaterialRegistry":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh), version=str(path))

    @classmethod
    def builtin(cls) -> "MaterialRegistry":
        text = resources.files("labloop.data").joinpath("materials.json").read_text("utf-8")
        return cls(json.loads(text), version="builtin:v1")

    def keys(self) -> list[str]:
        return sorted(self._entries)

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def get(self, key: str) -> MaterialRecord:
        entry = self._entries[key]
        return MaterialRecord(
            key=key,
            formula=entry["formula"],
            cif_text=entry["cif"],
            provenance=entry.get("provenance", self.version),
            atoms_per_conventional_cell=entry.get("atoms_per_conventional_cell"),
        )
