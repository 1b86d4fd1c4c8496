"""Periodic crystal model: lattice rows are the a, b, c vectors in Å.

Coordinates are stored fractional; Cartesian positions are derived as
``cart = frac @ lattice`` (row-vector convention).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Symbols accepted by the CIF parser. Covers the full periodic table so a
# registry entry is never rejected for an exotic but legitimate element.
ELEMENT_SYMBOLS = frozenset(
    "H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni "
    "Cu Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I "
    "Xe Cs Ba La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt "
    "Au Hg Tl Pb Bi Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr "
    "Rf Db Sg Bh Hs Mt Ds Rg Cn Nh Fl Mc Lv Ts Og".split()
)


class InvalidReps(ValueError):
    """Supercell repetition counts must all be >= 1."""


@dataclass(frozen=True)
class Structure:
    lattice: np.ndarray          # (3, 3), rows = a, b, c [Å]
    species: tuple[str, ...]
    frac_coords: np.ndarray      # (N, 3), wrapped into [0, 1) when periodic
    periodic: bool = True

    def __post_init__(self):
        lattice = np.asarray(self.lattice, dtype=float).reshape(3, 3)
        frac = np.asarray(self.frac_coords, dtype=float).reshape(-1, 3)
        if len(self.species) != len(frac) or len(frac) < 1:
            raise ValueError("species and frac_coords must have equal, nonzero length")
        if self.periodic:
            if np.linalg.det(lattice) <= 0:
                raise ValueError("periodic lattice must have positive determinant")
            frac = frac - np.floor(frac)
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "frac_coords", frac)
        object.__setattr__(self, "species", tuple(self.species))
        self.lattice.setflags(write=False)
        self.frac_coords.setflags(write=False)

    def __len__(self) -> int:
        return len(self.species)

    @property
    def cart_coords(self) -> np.ndarray:
        return self.frac_coords @ self.lattice

    @property
    def volume(self) -> float:
        return float(abs(np.linalg.det(self.lattice)))

    def cell_heights(self) -> np.ndarray:
        """Perpendicular extent of the cell along each lattice direction."""
        vol = abs(np.linalg.det(self.lattice))
        cross = np.stack([
            np.cross(self.lattice[1], self.lattice[2]),
            np.cross(self.lattice[2], self.lattice[0]),
            np.cross(self.lattice[0], self.lattice[1]),
        ])
        return vol / np.linalg.norm(cross, axis=1)

    def with_frac_coords(self, frac: np.ndarray) -> "Structure":
        return Structure(self.lattice.copy(), self.species, np.array(frac), self.periodic)

    def with_cart_coords(self, cart: np.ndarray) -> "Structure":
        frac = np.asarray(cart, dtype=float) @ np.linalg.inv(self.lattice)
        return self.with_frac_coords(frac)

    def with_lattice(self, lattice: np.ndarray) -> "Structure":
        """Same fractional coordinates in a new cell."""
        return Structure(np.array(lattice, dtype=float), self.species,
                         self.frac_coords.copy(), self.periodic)

    @classmethod
    def from_cartesian(cls, species, cart, lattice=None, periodic=False) -> "Structure":
        """Build a (typically non-periodic) structure from Cartesian positions.

        Without an explicit lattice a generous cubic box is used purely as
        the frac<->cart conversion frame; positions are not translated.
        """
        cart = np.asarray(cart, dtype=float).reshape(-1, 3)
        if lattice is None:
            span = float(np.max(np.abs(cart))) if cart.size else 1.0
            lattice = np.eye(3) * max(4.0 * span, 100.0)
        lattice = np.asarray(lattice, dtype=float)
        frac = cart @ np.linalg.inv(lattice)
        return cls(lattice, tuple(species), frac, periodic)

    def to_dict(self) -> dict:
        return {
            "lattice": self.lattice.tolist(),
            "species": list(self.species),
            "frac_coords": self.frac_coords.tolist(),
            "periodic": self.periodic,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Structure":
        return cls(np.array(doc["lattice"], dtype=float), tuple(doc["species"]),
                   np.array(doc["frac_coords"], dtype=float), bool(doc["periodic"]))


def make_supercell(s: Structure, reps: tuple[int, int, int]) -> Structure:
    """Replicate a periodic cell reps[k] times along lattice vector k."""
    nx, ny, nz = (int(r) for r in reps)
    if min(nx, ny, nz) < 1:
        raise InvalidReps(f"repetitions must be >= 1, got {reps}")
    if not s.periodic:
        raise ValueError("supercell requires a periodic structure")
    shifts = np.array([(i, j, k) for i in range(nx) for j in range(ny) for k in range(nz)],
                      dtype=float)
    scale = np.array([nx, ny, nz], dtype=float)
    frac = ((s.frac_coords[None, :, :] + shifts[:, None, :]) / scale).reshape(-1, 3)
    species = tuple(sp for _ in range(len(shifts)) for sp in s.species)
    lattice = s.lattice * scale[:, None]
    return Structure(lattice, species, frac, True)


@dataclass(frozen=True)
class PairList:
    """Unordered atom pairs within a cutoff, one entry per periodic image.

    ``offset[k]`` is the integer lattice translation applied to atom ``j``;
    self pairs (i == j) appear only with a nonzero offset, counted once per
    {+n, -n} image pair.
    """

    i: np.ndarray                # (P,) int
    j: np.ndarray                # (P,) int
    distance: np.ndarray         # (P,) Å
    offset: np.ndarray           # (P, 3) int
    cutoff: float

    def __len__(self) -> int:
        return len(self.distance)

    def __iter__(self):
        for k in range(len(self)):
            yield (int(self.i[k]), int(self.j[k]), float(self.distance[k]),
                   tuple(int(x) for x in self.offset[k]))
