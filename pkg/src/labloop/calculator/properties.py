"""Property extraction from a relaxed structure.

energetic   cohesive energy per atom = total energy / N (isolated atoms are
            the zero of a pair potential)
structural  lattice constant = cube root of volume per conventional cell
mechanical  bulk modulus from a third-order Birch-Murnaghan fit of E(V)
            sampled at 11 scales within +/-4 % volume of the relaxed cell
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import curve_fit

from labloop.calculator.potential import PotentialParams, energy_forces
from labloop.calculator.relax import RelaxationOutcome

EV_PER_A3_TO_GPA = 160.2176634

EOS_VOLUME_SPAN = 0.04
EOS_N_SAMPLES = 11
# rms residual above this fraction of the sampled energy span fails the fit;
# BM3 is a 4-parameter model of a non-BM potential, so ~1e-4 of the span is
# genuine model error even on clean data
EOS_RESIDUAL_FRACTION = 1e-2


class NotConverged(RuntimeError):
    pass


class EOSFitFailure(RuntimeError):
    pass


def birch_murnaghan_energy(v, e0, v0, b0, b0p):
    """Third-order Birch-Murnaghan E(V); b0 in eV/Å^3."""
    eta = (v0 / v) ** (2.0 / 3.0) - 1.0
    return e0 + 9.0 * v0 * b0 / 16.0 * (eta ** 3 * b0p + eta ** 2 * (6.0 - 4.0 * (v0 / v) ** (2.0 / 3.0)))


def fit_birch_murnaghan(volumes, energies) -> tuple[float, float, float, float, float]:
    """Least-squares BM3 fit; returns (e0, v0, b0 [eV/Å^3], b0p, rms residual)."""
    volumes = np.asarray(volumes, dtype=float)
    energies = np.asarray(energies, dtype=float)
    if len(volumes) < 4:
        raise EOSFitFailure("need at least 4 samples for a 4-parameter fit")

    # quadratic prefit for starting values
    quad = np.polynomial.Polynomial.fit(volumes, energies, 2).convert()
    c0, c1, c2 = quad.coef
    if c2 <= 0:
        raise EOSFitFailure("sampled E(V) has non-positive curvature")
    v0_guess = -c1 / (2.0 * c2)
    if not (volumes.min() * 0.5 < v0_guess < volumes.max() * 1.5):
        v0_guess = float(volumes[np.argmin(energies)])
    p0 = (float(quad(v0_guess)), float(v0_guess), float(2.0 * c2 * v0_guess), 4.0)

    try:
        popt, _ = curve_fit(birch_murnaghan_energy, volumes, energies, p0=p0,
                            maxfev=20000, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    except RuntimeError as exc:
        raise EOSFitFailure(f"BM3 fit did not converge: {exc}") from exc

    e0, v0, b0, b0p = (float(x) for x in popt)
    residual = energies - birch_murnaghan_energy(volumes, *popt)
    rms = float(np.sqrt(np.mean(residual ** 2)))
    span = float(energies.max() - energies.min())
    if b0 <= 0 or v0 <= 0:
        raise EOSFitFailure(f"unphysical fit: V0={v0:.4g} Å^3, B0={b0:.4g} eV/Å^3")
    if rms > EOS_RESIDUAL_FRACTION * max(span, 1e-12):
        raise EOSFitFailure(f"fit residual {rms:.3g} eV exceeds tolerance")
    return e0, v0, b0, b0p, rms


def _sample_eos(structure, p: PotentialParams, precision: str):
    base = structure.lattice.copy()
    factors = np.linspace(1.0 - EOS_VOLUME_SPAN, 1.0 + EOS_VOLUME_SPAN, EOS_N_SAMPLES)
    volumes = []
    energies = []
    for vf in factors:
        scaled = structure.with_lattice(base * vf ** (1.0 / 3.0))
        volumes.append(scaled.volume)
        energies.append(energy_forces(scaled, p, precision)[0])
    return np.array(volumes), np.array(energies)


def compute_properties(outcome: RelaxationOutcome, p: PotentialParams, category: str,
                       atoms_per_conventional_cell: int | None = None,
                       precision: str = "float64") -> dict[str, dict]:
    """Property map {name: {value, unit}} for one category of a converged run."""
    if not outcome.converged:
        raise NotConverged(
            f"relaxation not converged (max force {outcome.max_force:.3g} eV/Å)")
    s = outcome.final_structure
    n = len(s)

    if category == "energetic":
        return {"cohesive_energy_per_atom":
                {"value": outcome.final_energy / n, "unit": "eV/atom"}}

    if category == "structural":
        per_cell = atoms_per_conventional_cell if atoms_per_conventional_cell else n
        a = (s.volume * per_cell / n) ** (1.0 / 3.0)
        return {"lattice_constant": {"value": a, "unit": "Å"}}

    if category == "mechanical":
        volumes, energies = _sample_eos(s, p, precision)
        _, _, b0, _, _ = fit_birch_murnaghan(volumes, energies)
        return {"bulk_modulus": {"value": b0 * EV_PER_A3_TO_GPA, "unit": "GPa"}}

    raise ValueError(f"unknown property category {category!r}")
