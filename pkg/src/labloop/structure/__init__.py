"""Crystal structures: CIF subset I/O, supercells, periodic neighbor pairs."""

from labloop.structure.model import InvalidReps, PairList, Structure
from labloop.structure.cif import CifParseError, parse_cif, write_cif
from labloop.structure.neighbors import NonPositiveCutoff, neighbor_pairs

__all__ = [
    "Structure",
    "PairList",
    "InvalidReps",
    "CifParseError",
    "parse_cif",
    "write_cif",
    "NonPositiveCutoff",
    "neighbor_pairs",
]
