"""Reader/writer for the P1 CIF subset used by the material registry.

Recognized tags: _cell_length_{a,b,c}, _cell_angle_{alpha,beta,gamma} and a
loop over _atom_site_type_symbol / _atom_site_fract_{x,y,z}. Anything else
is skipped with a warning. Symmetry operations are not expanded; registry
entries are stored pre-expanded to P1.
"""

from __future__ import annotations

import logging
import math
import re

import numpy as np

from labloop.structure.model import ELEMENT_SYMBOLS, Structure

log = logging.getLogger(__name__)

CELL_TAGS = ("_cell_length_a", "_cell_length_b", "_cell_length_c",
             "_cell_angle_alpha", "_cell_angle_beta", "_cell_angle_gamma")
SITE_TAGS = ("_atom_site_type_symbol", "_atom_site_fract_x",
             "_atom_site_fract_y", "_atom_site_fract_z")

_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?(\(\d+\))?$")


class CifParseError(ValueError):
    """CIF text the subset parser cannot accept; carries the offending line."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        where = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"{message}{where}")


def _parse_number(token: str, line_no: int) -> float:
    # CIF numbers may carry a parenthesized standard uncertainty: 5.40(2)
    if not _NUMBER_RE.match(token):
        raise CifParseError(f"expected a number, got {token!r}", line_no)
    return float(re.sub(r"\(\d+\)$", "", token))


def lattice_from_parameters(a: float, b: float, c: float,
                            alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Standard cell construction: a along x, b in the xy plane."""
    al, be, ga = (math.radians(x) for x in (alpha, beta, gamma))
    cos_al, cos_be, cos_ga = math.cos(al), math.cos(be), math.cos(ga)
    sin_ga = math.sin(ga)
    cx = c * cos_be
    cy = c * (cos_al - cos_be * cos_ga) / sin_ga
    cz_sq = c * c - cx * cx - cy * cy
    if cz_sq <= 0:
        raise CifParseError("cell angles do not define a positive-volume cell")
    return np.array([
        [a, 0.0, 0.0],
        [b * cos_ga, b * sin_ga, 0.0],
        [cx, cy, math.sqrt(cz_sq)],
    ])


def lattice_to_parameters(lattice: np.ndarray) -> tuple[float, float, float, float, float, float]:
    a, b, c = (float(np.linalg.norm(v)) for v in lattice)

    def angle(u, v):
        return math.degrees(math.acos(float(np.dot(u, v)) / (np.linalg.norm(u) * np.linalg.norm(v))))

    return a, b, c, angle(lattice[1], lattice[2]), angle(lattice[0], lattice[2]), angle(lattice[0], lattice[1])


def parse_cif(text: str) -> Structure:
    """Parse the CIF subset into a periodic Structure.

    Raises CifParseError (with line number) for missing cell parameters,
    malformed atom-site loops, unknown element symbols, or zero atoms.
    """
    cell: dict[str, float] = {}
    species: list[str] = []
    frac: list[list[float]] = []

    lines = text.splitlines()
    idx = 0
    while idx < len(lines):
        line_no = idx + 1
        line = lines[idx].split("#", 1)[0].strip()
        idx += 1
        if not line:
            continue
        tokens = line.split()
        tag = tokens[0]

        if tag.lower() in CELL_TAGS:
            if len(tokens) < 2:
                raise CifParseError(f"{tag} has no value", line_no)
            cell[tag.lower()] = _parse_number(tokens[1], line_no)
            continue

        if tag.lower() == "loop_":
            header: list[str] = []
            while idx < len(lines):
                probe = lines[idx].split("#", 1)[0].strip()
                if probe.startswith("_"):
                    header.append(probe.split()[0].lower())
                    idx += 1
                else:
                    break
            if not any(h in SITE_TAGS for h in header):
                # some other loop; skip its data rows
                while idx < len(lines):
                    probe = lines[idx].split("#", 1)[0].strip()
                    if not probe or probe.startswith(("_", "loop_", "data_")):
                        break
                    idx += 1
                log.warning("ignoring CIF loop with tags %s", header)
                continue
            missing = [t for t in SITE_TAGS if t not in header]
            if missing:
                raise CifParseError(f"atom-site loop missing tags {missing}", idx)
            col = {h: k for k, h in enumerate(header)}
            while idx < len(lines):
                row_no = idx + 1
                probe = lines[idx].split("#", 1)[0].strip()
                if not probe or probe.startswith(("_", "loop_", "data_")):
                    break
                idx += 1
                fields = probe.split()
                if len(fields) != len(header):
                    raise CifParseError(
                        f"atom-site row has {len(fields)} fields, loop declares {len(header)}",
                        row_no)
                symbol = fields[col["_atom_site_type_symbol"]]
                if symbol not in ELEMENT_SYMBOLS:
                    raise CifParseError(f"unknown element symbol {symbol!r}", row_no)
                species.append(symbol)
                frac.append([_parse_number(fields[col[f"_atom_site_fract_{ax}"]], row_no)
                             for ax in "xyz"])
            continue

        if tag.startswith("data_"):
            continue
        if tag.startswith("_"):
            log.warning("ignoring CIF tag %s", tag)
            continue
        raise CifParseError(f"unrecognized CIF content {line!r}", line_no)

    missing_cell = [t for t in CELL_TAGS if t not in cell]
    if missing_cell:
        raise CifParseError(f"missing cell parameters: {missing_cell}")
    if not species:
        raise CifParseError("CIF defines zero atoms")

    lattice = lattice_from_parameters(
        cell["_cell_length_a"], cell["_cell_length_b"], cell["_cell_length_c"],
        cell["_cell_angle_alpha"], cell["_cell_angle_beta"], cell["_cell_angle_gamma"])
    return Structure(lattice, tuple(species), np.array(frac), periodic=True)


def write_cif(s: Structure, name: str = "structure") -> str:
    """Emit the same CIF subset parse_cif reads; round-trips to 1e-12 Å."""
    a, b, c, alpha, beta, gamma = lattice_to_parameters(s.lattice)
    out = [f"data_{name}"]
    for tag, value in zip(CELL_TAGS, (a, b, c, alpha, beta, gamma)):
        out.append(f"{tag}   {value:.17g}")
    out.append("loop_")
    out.extend(f"{t}" for t in SITE_TAGS)
    for symbol, (x, y, z) in zip(s.species, s.frac_coords):
        out.append(f"{symbol} {x:.17g} {y:.17g} {z:.17g}")
    return "\n".join(out) + "\n"
