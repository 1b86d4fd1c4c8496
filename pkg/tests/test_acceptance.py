"""Acceptance suite: one test per promised behavior, each printing a
pass/fail line with its measured figure. Run with ``pytest -s`` to see the
lines inline.
"""

import time

import numpy as np
import pytest
import requests

from labloop.calculator import (
    PotentialParams,
    birch_murnaghan_energy,
    energy_forces,
    fit_birch_murnaghan,
    relax,
)
from labloop.calculator.properties import EV_PER_A3_TO_GPA
from labloop.canonical import canonical_dumps, strip_volatile
from labloop.compute import ComputeServer, InProcessBackend, RemoteBackend
from labloop.discussion import tally_votes
from labloop.frontend import (
    MaterialRegistry,
    assemble_units,
    canonicalize,
    resolve_materials,
    resolve_spec,
)
from labloop.frontend.types import ExperimentSpec, Hypothesis, TaskConfig
from labloop.orchestrator.benchmark import bundled_cases, run_benchmark
from labloop.orchestrator.engine import RunConfig, execute_run, resume_run
from labloop.orchestrator.store import RunStore
from labloop.structure import neighbor_pairs, parse_cif
from labloop.structure.model import Structure

REGISTRY = MaterialRegistry.builtin()
SIGMA_AR, EPS_AR = 3.40, 0.0104
AR_PARAMS = PotentialParams(epsilon={"Ar": EPS_AR}, sigma={"Ar": SIGMA_AR})
AR_STRUCT = parse_cif(REGISTRY.get("Ar-fcc").cif_text)


def report_line(name: str, ok: bool, detail: str):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def spec_for(text: str, n_trials=3) -> ExperimentSpec:
    canonical = canonicalize(Hypothesis(id="h", text=text, submitted_at="t"))
    return assemble_units(canonical, resolve_materials(canonical, REGISTRY),
                          resolve_spec(canonical), n_trials)


def random_cell(rng) -> Structure:
    cutoff = AR_PARAMS.cutoff_for(["Ar"])
    base = np.array([(i, j, k) for i in range(2) for j in range(2) for k in range(2)],
                    dtype=float) / 2.0 + 0.25
    while True:
        a = rng.uniform(6.8, 7.6, 3)
        frac = base + rng.uniform(-0.3, 0.3, (8, 3)) / a
        s = Structure(np.diag(a), ("Ar",) * 8, frac)
        d = neighbor_pairs(s, cutoff + 0.01).distance
        if len(d) and d.min() > 0.80 * SIGMA_AR and np.all(np.abs(d - cutoff) > 1e-3):
            return s


def test_force_consistency():
    """>=100 random 8-atom cells; analytic vs central differences, 1e-6
    relative with a 1e-10 absolute floor, inside 10 s."""
    started = time.perf_counter()
    rng = np.random.default_rng(1234)
    h = 1e-5
    worst = 0.0
    for _ in range(100):
        s = random_cell(rng)
        _, forces = energy_forces(s, AR_PARAMS)
        cart = s.cart_coords
        fd = np.zeros_like(forces)
        for atom in range(8):
            for axis in range(3):
                plus, minus = cart.copy(), cart.copy()
                plus[atom, axis] += h
                minus[atom, axis] -= h
                e_plus = energy_forces(s.with_cart_coords(plus), AR_PARAMS)[0]
                e_minus = energy_forces(s.with_cart_coords(minus), AR_PARAMS)[0]
                fd[atom, axis] = -(e_plus - e_minus) / (2 * h)
        err = np.abs(fd - forces) / np.maximum(np.abs(forces), 1e-10 / 1e-6)
        worst = max(worst, float(err.max()))
    elapsed = time.perf_counter() - started
    report_line("force consistency", worst <= 1e-6 and elapsed < 10.0,
                f"worst relative error {worst:.2e} over 100 cells in {elapsed:.1f}s")


def test_analytic_dimer_minimum():
    """Ar dimer relaxes to 2^(1/6) sigma within 1e-3 Å at fmax 1e-4, < 1 s."""
    started = time.perf_counter()
    long_range = PotentialParams(epsilon={"Ar": EPS_AR}, sigma={"Ar": SIGMA_AR},
                                 cutoff_factor=1e6)
    dimer = Structure.from_cartesian(["Ar", "Ar"],
                                     [[0, 0, 0], [1.5 * SIGMA_AR, 0, 0]])
    outcome = relax(dimer, long_range, TaskConfig(fmax=1e-4, cell_relax=False))
    r = float(np.linalg.norm(np.diff(outcome.final_structure.cart_coords, axis=0)))
    error = abs(r - 2 ** (1 / 6) * SIGMA_AR)
    elapsed = time.perf_counter() - started
    report_line("analytic minimum", outcome.converged and error <= 1e-3 and elapsed < 1.0,
                f"|r - 2^(1/6) sigma| = {error:.2e} Å in {elapsed:.2f}s")


def test_eos_recovery():
    """BM3 fit on self-generated data recovers all four parameters to 1e-8."""
    started = time.perf_counter()
    e0, v0, b0, b0p = -1.0, 40.0, 50.0 / EV_PER_A3_TO_GPA, 4.0
    volumes = v0 * np.linspace(0.96, 1.04, 11)
    energies = birch_murnaghan_energy(volumes, e0, v0, b0, b0p)
    fe0, fv0, fb0, fb0p, _ = fit_birch_murnaghan(volumes, energies)
    worst = max(abs(fe0 - e0) / abs(e0), abs(fv0 - v0) / v0,
                abs(fb0 - b0) / b0, abs(fb0p - b0p) / b0p)
    elapsed = time.perf_counter() - started
    report_line("EOS recovery", worst <= 1e-8 and elapsed < 1.0,
                f"worst relative parameter error {worst:.2e} in {elapsed:.2f}s")


def test_lattice_constant_oracle():
    """Relaxed Ar-fcc lattice constant vs 1e4-point scan argmin, < 30 s."""
    started = time.perf_counter()
    outcome = relax(AR_STRUCT, AR_PARAMS, TaskConfig())
    a_relaxed = outcome.final_structure.volume ** (1 / 3)
    base = AR_STRUCT.lattice.copy()
    scales = np.linspace(0.9, 1.1, 10_000)
    energies = [energy_forces(AR_STRUCT.with_lattice(base * sc), AR_PARAMS)[0]
                for sc in scales]
    a_scan = 5.40 * scales[int(np.argmin(energies))]
    step = 5.40 * 0.2 / (len(scales) - 1)
    error = abs(a_relaxed - a_scan)
    elapsed = time.perf_counter() - started
    report_line("lattice-constant oracle", error <= step and elapsed < 30.0,
                f"|a_relax - a_scan| = {error:.2e} Å (scan step {step:.2e}) in {elapsed:.1f}s")


def test_deterministic_benchmark(tmp_path):
    """Bundled 12-case benchmark scores 1.0 with scripted agents and the
    in-process backend, reporting all three category keys, < 2 min."""
    started = time.perf_counter()
    metrics = run_benchmark(bundled_cases(), RunConfig(), work_dir=tmp_path)
    elapsed = time.perf_counter() - started
    ok = (metrics["overall_accuracy"] == 1.0
          and set(metrics["per_category_accuracy"]) == {"energetic", "mechanical",
                                                        "structural"}
          and all(v == 1.0 for v in metrics["per_category_accuracy"].values())
          and elapsed < 120.0)
    report_line("deterministic benchmark", ok,
                f"accuracy {metrics['overall_accuracy']:.3f}, per-category "
                f"{metrics['per_category_accuracy']}, {elapsed:.1f}s")


def test_refinement_loop(tmp_path):
    """The tuned low-margin case revises at least once, terminates within
    max_iterations = 3, and the report keeps every iteration; < 1 min."""
    from test_orchestrator import craft_low_margin_text

    started = time.perf_counter()
    text = craft_low_margin_text()
    hypothesis = Hypothesis(id="h-lowmargin", text=text, submitted_at="t")
    report = execute_run(hypothesis, RunConfig(max_iterations=3), tmp_path / "low")
    elapsed = time.perf_counter() - started
    iterations = report["total_iterations"]
    complete = all(block["transcript"] and block["verdict"]
                   for block in report["iterations"])
    ok = 2 <= iterations <= 3 and complete and elapsed < 60.0
    report_line("refinement loop", ok,
                f"{iterations} iterations (>=1 revision), every iteration "
                f"recorded, {elapsed:.1f}s")


def test_failure_isolation():
    """One corrupt-CIF unit fails with stage=parse; all siblings succeed."""
    spec = spec_for("The bulk modulus of Kr-fcc is greater than that of Ar-fcc")
    doc = spec.to_dict()
    doc["units"][0]["material"]["cif_text"] = "garbage\n"
    results = InProcessBackend().run_spec(ExperimentSpec.from_dict(doc))
    failures = [r for r in results if "stage" in r]
    successes = [r for r in results if "properties" in r]
    ok = (len(results) == 6 and len(failures) == 1
          and failures[0]["stage"] == "parse" and failures[0]["unit_id"] == "m0-t0"
          and len(successes) == 5)
    report_line("failure isolation", ok,
                f"{len(failures)} parse failure, {len(successes)} intact siblings")


def test_wire_equivalence():
    """Every bundled spec gives byte-identical canonical results through the
    HTTP server and the in-process backend (wall times excluded)."""
    server = ComputeServer(workers=4).start()
    try:
        remote = RemoteBackend(server.url)
        local = InProcessBackend()
        checked = 0
        for case in bundled_cases():
            spec = spec_for(case.hypothesis_text)
            local_docs = canonical_dumps(strip_volatile(local.run_spec(spec)))
            remote_docs = canonical_dumps(strip_volatile(remote.run_spec(spec)))
            assert local_docs == remote_docs, case.case_id
            checked += 1
    finally:
        server.stop()
    report_line("wire equivalence", checked == 12,
                f"{checked}/12 bundled specs byte-identical across transports")


def test_crash_resumption(tmp_path):
    """A run killed mid-experimenting resumes to an identical report."""
    class Killed(Exception):
        pass

    text = "The bulk modulus of Kr-fcc is greater than that of Ar-fcc"
    baseline = execute_run(Hypothesis(id="h", text=text, submitted_at="t"),
                           RunConfig(), tmp_path / "base")

    count = {"n": 0}

    def kill_mid_experiment(event):
        count["n"] += 1
        if event.kind == "unit_completed" and count["n"] >= 5:
            raise Killed()

    with pytest.raises(Killed):
        execute_run(Hypothesis(id="h", text=text, submitted_at="t"),
                    RunConfig(), tmp_path / "crashed", on_event=kill_mid_experiment)
    state = RunStore(tmp_path / "crashed").load_state()
    assert state.state == "experimenting"

    resumed = resume_run(tmp_path / "crashed", RunConfig())
    ok = strip_volatile(resumed) == strip_volatile(baseline)
    report_line("crash resumption", ok,
                "resumed report identical to uninterrupted run (timestamps aside)")


def test_voting_correctness():
    """10^4 random vote vectors match a brute-force majority count."""
    rng = np.random.default_rng(99)
    mismatches = 0
    for _ in range(10_000):
        n = int(rng.choice([3, 5, 7, 9, 11]))
        votes = [("yes", "no", "abstain")[k] for k in rng.integers(0, 3, n)]
        decision, confidence = tally_votes(votes)
        yes, no = votes.count("yes"), votes.count("no")
        if yes + no == 0 or yes == no:
            expected = ("insufficient", 0.0)
        elif yes > no:
            expected = ("supported", yes / (yes + no))
        else:
            expected = ("refuted", no / (yes + no))
        mismatches += (decision, confidence) != expected
    all_abstain = tally_votes(["abstain"] * 5)
    ok = mismatches == 0 and all_abstain == ("insufficient", 0.0)
    report_line("voting correctness", ok,
                f"{mismatches} mismatches in 10000 vectors; all-abstain maps "
                f"to insufficient")
