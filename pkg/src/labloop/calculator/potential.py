"""Cut-and-shifted Lennard-Jones pair potential with Lorentz-Berthelot mixing.

Pair energy inside the cutoff:

    v(r) = 4 eps_ij [ (sig_ij/r)^12 - (sig_ij/r)^6 ] - v_unshifted(r_c)

so every pair contribution vanishes continuously at r_c. The cutoff is
global per structure: r_c = cutoff_factor * max sigma among the species
present (Lorentz-Berthelot means the largest pair sigma is the largest
single-species sigma). Forces are the exact analytic gradient of the
shifted energy; the force itself is discontinuous at r_c by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from labloop.structure.model import Structure
from labloop.structure.neighbors import neighbor_pairs


class UnknownSpecies(KeyError):
    pass


class NumericalBlowup(RuntimeError):
    """A coordinate or energy went non-finite; signals bad parameters."""


@dataclass(frozen=True)
class PotentialParams:
    """Per-species well depths [eV] and length scales [Å]."""

    epsilon: dict[str, float]
    sigma: dict[str, float]
    cutoff_factor: float = 3.0

    def __post_init__(self):
        if set(self.epsilon) != set(self.sigma):
            raise ValueError("epsilon and sigma must cover the same species")
        if any(e <= 0 for e in self.epsilon.values()):
            raise ValueError("epsilon must be positive")
        if any(s <= 0 for s in self.sigma.values()):
            raise ValueError("sigma must be positive")
        if self.cutoff_factor < 2:
            raise ValueError("cutoff_factor must be >= 2")

    @classmethod
    def from_file(cls, path: str | Path, cutoff_factor: float = 3.0) -> "PotentialParams":
        with open(path, encoding="utf-8") as fh:
            table = json.load(fh)
        return cls.from_table(table, cutoff_factor)

    @classmethod
    def from_table(cls, table: dict, cutoff_factor: float = 3.0) -> "PotentialParams":
        return cls(epsilon={k: float(v["epsilon"]) for k, v in table.items()},
                   sigma={k: float(v["sigma"]) for k, v in table.items()},
                   cutoff_factor=cutoff_factor)

    @classmethod
    def builtin(cls, cutoff_factor: float = 3.0) -> "PotentialParams":
        text = resources.files("labloop.data").joinpath("potentials.json").read_text("utf-8")
        return cls.from_table(json.loads(text), cutoff_factor)

    def check_species(self, species) -> None:
        unknown = sorted(set(species) - set(self.epsilon))
        if unknown:
            raise UnknownSpecies(f"no parameters for species {unknown}")

    def cutoff_for(self, species) -> float:
        self.check_species(species)
        return self.cutoff_factor * max(self.sigma[s] for s in set(species))

    def pair_tables(self, species) -> tuple[np.ndarray, np.ndarray]:
        """Per-atom epsilon/sigma arrays; pair values mix per Lorentz-Berthelot."""
        eps = np.array([self.epsilon[s] for s in species])
        sig = np.array([self.sigma[s] for s in species])
        return eps, sig


def _apply_precision(energy: float, forces: np.ndarray,
                     precision: str) -> tuple[float, np.ndarray]:
    if precision == "float32":
        return float(np.float32(energy)), forces.astype(np.float32).astype(np.float64)
    return energy, forces


def energy_forces(s: Structure, p: PotentialParams,
                  precision: str = "float64") -> tuple[float, np.ndarray]:
    """Total energy [eV] and per-atom forces [eV/Å] of the shifted potential.

    float32 precision truncates the accumulated energy and forces to single
    precision at the evaluation boundary; accumulation itself is float64.
    """
    p.check_species(s.species)
    cart = s.cart_coords
    if not np.all(np.isfinite(cart)):
        raise NumericalBlowup("non-finite coordinates")

    cutoff = p.cutoff_for(s.species)
    pairs = neighbor_pairs(s, cutoff)
    n = len(s)
    forces = np.zeros((n, 3))
    if len(pairs) == 0:
        return _apply_precision(0.0, forces, precision)

    eps_atom, sig_atom = p.pair_tables(s.species)
    eps = np.sqrt(eps_atom[pairs.i] * eps_atom[pairs.j])
    sig = 0.5 * (sig_atom[pairs.i] + sig_atom[pairs.j])

    # d points from atom i to the (possibly image-shifted) atom j
    shift = pairs.offset.astype(float) @ s.lattice
    d = cart[pairs.j] + shift - cart[pairs.i]
    r = pairs.distance

    sr6 = (sig / r) ** 6
    sr12 = sr6 ** 2
    src6 = (sig / cutoff) ** 6
    pair_energy = 4.0 * eps * (sr12 - sr6) - 4.0 * eps * (src6 ** 2 - src6)
    energy = float(np.sum(pair_energy))

    # dv/dr = -(24 eps / r) (2 sr12 - sr6); force on i is +v'(r) * d/r
    dvdr = -(24.0 * eps / r) * (2.0 * sr12 - sr6)
    coef = (dvdr / r)[:, None] * d
    np.add.at(forces, pairs.i, coef)
    np.add.at(forces, pairs.j, -coef)

    if not np.isfinite(energy) or not np.all(np.isfinite(forces)):
        raise NumericalBlowup("non-finite energy or forces")
    return _apply_precision(energy, forces, precision)


def max_force_norm(forces: np.ndarray) -> float:
    """Convergence metric: largest per-atom force vector norm."""
    if len(forces) == 0:
        return 0.0
    return float(np.max(np.linalg.norm(forces, axis=1)))
