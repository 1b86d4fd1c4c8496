import json
import subprocess
import sys

from labloop.canonical import canonical_dumps
from labloop.frontend import (
    MaterialRegistry,
    assemble_units,
    canonicalize,
    resolve_materials,
    resolve_spec,
)
from labloop.frontend.types import Hypothesis
from labloop.orchestrator.cli import main

CLEAR_TEXT = "The bulk modulus of Kr-fcc is greater than that of Ar-fcc"


def make_spec_file(tmp_path, mutate=None):
    canonical = canonicalize(Hypothesis(id="h", text=CLEAR_TEXT, submitted_at="t"))
    registry = MaterialRegistry.builtin()
    spec = assemble_units(canonical, resolve_materials(canonical, registry),
                          resolve_spec(canonical), 2)
    doc = spec.to_dict()
    if mutate:
        mutate(doc)
    path = tmp_path / "spec.json"
    path.write_text(canonical_dumps(doc), "utf-8")
    return path


def test_run_command_writes_report(tmp_path, capsys):
    code = main(["run", "--hypothesis", CLEAR_TEXT, "--out", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "Final Decision" in out and "supported" in out
    run_dirs = list(tmp_path.iterdir())
    assert len(run_dirs) == 1
    assert (run_dirs[0] / "report.md").exists()
    assert (run_dirs[0] / "events.jsonl").exists()


def test_run_command_bad_hypothesis_exits_1(tmp_path, capsys):
    code = main(["run", "--hypothesis", "utter nonsense", "--out", str(tmp_path)])
    assert code == 1


def test_validate_spec_ok(tmp_path, capsys):
    path = make_spec_file(tmp_path)
    assert main(["validate-spec", "--file", str(path)]) == 0
    assert "valid" in capsys.readouterr().out


def test_validate_spec_diagnostics_exit_1(tmp_path, capsys):
    def mutate(doc):
        doc["units"][0]["resolved"]["task"]["fmax"] = 0

    path = make_spec_file(tmp_path, mutate)
    assert main(["validate-spec", "--file", str(path)]) == 1
    assert "fmax" in capsys.readouterr().out


def test_bench_subset(tmp_path, capsys):
    from labloop.orchestrator.benchmark import bundled_cases
    subset = [c.to_dict() for c in bundled_cases() if c.category == "mechanical"][:2]
    case_file = tmp_path / "cases.json"
    case_file.write_text(json.dumps(subset), "utf-8")
    report_file = tmp_path / "metrics.json"
    code = main(["bench", "--file", str(case_file), "--report", str(report_file),
                 "--out", str(tmp_path / "work")])
    assert code == 0
    metrics = json.loads(report_file.read_text())
    assert metrics["overall_accuracy"] == 1.0
    assert "overall accuracy" in capsys.readouterr().out


def test_module_entrypoint_help():
    proc = subprocess.run([sys.executable, "-m", "labloop", "--help"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert "compute-serve" in proc.stdout
