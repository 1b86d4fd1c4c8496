"""Geometry relaxation: FIRE dynamics plus isotropic cell optimization.

FIRE parameters follow the standard published defaults (dt_start 0.1,
dt_max 1.0, N_min 5, f_inc 1.1, f_dec 0.5, alpha_start 0.1, f_alpha 0.99)
with one strengthening: a trial step that raises the energy is not taken
as-is; the optimizer backs off to the parabolic minimum along the step (a
plain rejection if even that is uphill) and the velocity resets. Recorded
trajectory energies are therefore non-increasing by construction.

Cell relaxation alternates position FIRE with a golden-section search on a
uniform lattice scale (1e-6 relative tolerance) until the scale stops
moving and forces are converged, or the step budget runs out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from labloop.calculator.potential import (
    NumericalBlowup,
    PotentialParams,
    energy_forces,
    max_force_norm,
)
from labloop.frontend.types import TaskConfig
from labloop.structure.model import Structure

DT_START = 0.1
DT_MAX = 1.0
N_MIN = 5
F_INC = 1.1
F_DEC = 0.5
ALPHA_START = 0.1
F_ALPHA = 0.99

SCALE_BRACKET = (0.9, 1.1)       # relative lattice scale searched per cycle
SCALE_TOL = 1e-6
MAX_CELL_CYCLES = 20


@dataclass(frozen=True)
class RelaxationOutcome:
    final_structure: Structure
    final_energy: float
    max_force: float
    steps_taken: int
    converged: bool
    trajectory_energies: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "final_structure": self.final_structure.to_dict(),
            "final_energy": self.final_energy,
            "max_force": self.max_force,
            "steps_taken": self.steps_taken,
            "converged": self.converged,
            "trajectory_energies": list(self.trajectory_energies),
        }


def golden_section_min(fn, lo: float, hi: float, tol: float) -> float:
    """Argmin of a unimodal function on [lo, hi] to interval width tol."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def _line_polish(s: Structure, energy: float, forces: np.ndarray,
                 p: PotentialParams, precision: str,
                 energies: list[float], rounds: int = 3) -> tuple[Structure, float, np.ndarray]:
    """Parabolic steepest-descent polish once the force criterion is met.

    Moves to the estimated line minimum along the force direction, accepted
    only when both the energy and the force norm improve, so the converged
    state lands near the basin center instead of just inside its edge.
    """
    probe = 0.01
    for _ in range(rounds):
        f_norm = float(np.linalg.norm(forces))
        if f_norm < 1e-14:
            break
        direction = forces / f_norm
        slope = -f_norm
        probe_s = s.with_cart_coords(s.cart_coords + probe * direction)
        probe_energy, _ = energy_forces(probe_s, p, precision)
        curv = (probe_energy - energy - slope * probe) / probe ** 2
        if curv <= 0.0:
            break
        delta = -slope / (2.0 * curv)
        cand = s.with_cart_coords(s.cart_coords + delta * direction)
        cand_energy, cand_forces = energy_forces(cand, p, precision)
        if cand_energy <= energy and max_force_norm(cand_forces) <= max_force_norm(forces):
            s, energy, forces = cand, cand_energy, cand_forces
            energies.append(energy)
            probe = max(delta, 1e-4)
        else:
            break
    return s, energy, forces


def _fire_positions(s: Structure, p: PotentialParams, fmax: float, budget: int,
                    precision: str) -> tuple[Structure, float, np.ndarray, int, list[float]]:
    """FIRE on atomic positions at fixed cell; returns accepted energies."""
    cart = s.cart_coords.copy()
    energy, forces = energy_forces(s, p, precision)
    energies = [energy]
    velocity = np.zeros_like(cart)
    dt = DT_START
    alpha = ALPHA_START
    n_pos = 0
    steps = 0

    while max_force_norm(forces) > fmax and steps < budget:
        steps += 1
        velocity = velocity + dt * forces
        v_norm = float(np.linalg.norm(velocity))
        f_norm = float(np.linalg.norm(forces))
        if f_norm > 0.0:
            velocity = (1.0 - alpha) * velocity + alpha * v_norm * forces / f_norm
        step = dt * velocity
        trial = cart + step
        if not np.all(np.isfinite(trial)):
            raise NumericalBlowup("FIRE produced non-finite coordinates")
        trial_structure = s.with_cart_coords(trial)
        trial_energy, trial_forces = energy_forces(trial_structure, p, precision)
        if trial_energy <= energy:
            cart = trial
            s = trial_structure
            energy, forces = trial_energy, trial_forces
            energies.append(energy)
            n_pos += 1
            if n_pos > N_MIN:
                dt = min(dt * F_INC, DT_MAX)
                alpha *= F_ALPHA
        else:
            # uphill: back off to the parabolic minimum along the attempted
            # step when that helps, otherwise stay put; either way kill the
            # velocity and slow down
            slope = -float(np.sum(forces * step))
            curv = trial_energy - energy - slope
            if slope < 0.0 and curv > 0.0:
                frac = -slope / (2.0 * curv)
                back = s.with_cart_coords(cart + frac * step)
                back_energy, back_forces = energy_forces(back, p, precision)
                if back_energy <= energy:
                    cart = cart + frac * step
                    s = back
                    energy, forces = back_energy, back_forces
                    energies.append(energy)
            velocity[:] = 0.0
            n_pos = 0
            dt *= F_DEC
            alpha = ALPHA_START

    # structures meeting the criterion at entry return as-is (early exit);
    # only a point FIRE actually marched to gets the final line polish
    if steps > 0 and max_force_norm(forces) <= fmax:
        s, energy, forces = _line_polish(s, energy, forces, p, precision, energies)
    return s, energy, forces, steps, energies


def relax(s: Structure, p: PotentialParams, task: TaskConfig,
          precision: str = "float64") -> RelaxationOutcome:
    """Relax positions (and optionally the cell volume) under the potential."""
    if task.optimizer != "fire":
        raise ValueError(f"unsupported optimizer {task.optimizer!r}")

    budget = task.max_steps
    steps_used = 0
    trajectory: list[float] = []

    s, energy, forces, steps, energies = _fire_positions(
        s, p, task.fmax, budget, precision)
    steps_used += steps
    trajectory.extend(energies)

    if task.cell_relax and s.periodic:
        for _ in range(MAX_CELL_CYCLES):
            base_lattice = s.lattice.copy()
            frozen = s

            def cell_energy(scale: float) -> float:
                scaled = frozen.with_lattice(base_lattice * scale)
                return energy_forces(scaled, p, precision)[0]

            best = golden_section_min(cell_energy, *SCALE_BRACKET, SCALE_TOL)
            scaled_energy = cell_energy(best)
            if scaled_energy <= energy:
                s = s.with_lattice(base_lattice * best)
                energy, forces = energy_forces(s, p, precision)
                trajectory.append(energy)
            else:
                best = 1.0
            if steps_used >= budget:
                break
            s, energy, forces, steps, energies = _fire_positions(
                s, p, task.fmax, budget - steps_used, precision)
            steps_used += steps
            trajectory.extend(energies[1:])
            if abs(best - 1.0) < SCALE_TOL and max_force_norm(forces) <= task.fmax:
                break

    max_force = max_force_norm(forces)
    return RelaxationOutcome(
        final_structure=s,
        final_energy=energy,
        max_force=max_force,
        steps_taken=steps_used,
        converged=max_force <= task.fmax,
        trajectory_energies=tuple(trajectory),
    )
