"""Command-line entry points.

Exit codes: 0 success, 1 validation failure (bad hypothesis, invalid spec,
failed benchmark case file), 2 infrastructure error (backend unreachable,
server failure).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import uuid
from pathlib import Path

from labloop.frontend.types import Hypothesis
from labloop.orchestrator.engine import (
    BackendUnreachable,
    RunConfig,
    execute_run,
)
from labloop.orchestrator.events import utc_now

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INFRA = 2


def _load_config(path: str | None, **overrides) -> RunConfig:
    doc = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    config = RunConfig.from_dict(doc)
    cleaned = {k: v for k, v in overrides.items() if v is not None}
    if cleaned:
        from dataclasses import replace
        config = replace(config, **cleaned)
    return config


def cmd_run(args) -> int:
    config = _load_config(args.config, strategy=args.strategy,
                          agents_mode=args.agents, n_trials=args.trials)
    out_dir = Path(args.out or "runs") / f"run-{uuid.uuid4().hex[:12]}"
    hypothesis = Hypothesis(id=f"h-{uuid.uuid4().hex[:12]}",
                            text=args.hypothesis, submitted_at=utc_now())
    try:
        report = execute_run(hypothesis, config, out_dir)
    except BackendUnreachable as exc:
        print(f"compute backend unreachable: {exc}", file=sys.stderr)
        return EXIT_INFRA

    from labloop.orchestrator.report import render_report
    rendered = render_report(report)
    (out_dir / "report.md").write_text(rendered, "utf-8")
    print(rendered)
    print(f"run directory: {out_dir}")
    if report["final_decision"] == "inconclusive" and not report["iterations"]:
        # canonicalization/spec failure: nothing was ever simulated
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_serve(args) -> int:
    from labloop.orchestrator.api import ApiServer, RunManager
    config = _load_config(args.config)
    manager = RunManager(args.runs, config)
    server = ApiServer(manager, host=args.host, port=args.port,
                       static_dir=args.static)
    print(f"dashboard API on {server.url}"
          + (f", static files from {args.static}" if args.static else ""))
    server.serve_forever()
    return EXIT_OK


def cmd_compute_serve(args) -> int:
    from labloop.compute.server import ComputeServer
    server = ComputeServer(host=args.host, port=args.port, workers=args.workers)
    print(f"compute server on {server.url}")
    server.serve_forever()
    return EXIT_OK


def cmd_bench(args) -> int:
    from labloop.orchestrator.benchmark import bundled_cases, load_cases, run_benchmark
    config = _load_config(args.config)
    try:
        cases = load_cases(args.file) if args.file else bundled_cases()
    except (ValueError, KeyError) as exc:
        print(f"invalid benchmark file: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        metrics = run_benchmark(cases, config, work_dir=args.out)
    except BackendUnreachable as exc:
        print(f"compute backend unreachable: {exc}", file=sys.stderr)
        return EXIT_INFRA
    print(f"overall accuracy: {metrics['overall_accuracy']:.3f} "
          f"({metrics['n_cases']} cases, {metrics['n_refined']} refined)")
    for category, accuracy in metrics["per_category_accuracy"].items():
        shown = "n/a" if accuracy is None else f"{accuracy:.3f}"
        print(f"  {category}: {shown}")
    print(f"mean wall time: {metrics['mean_wall_time_ms']:.0f} ms/case")
    if args.report:
        Path(args.report).write_text(json.dumps(metrics, indent=2) + "\n", "utf-8")
        print(f"wrote {args.report}")
    return EXIT_OK


def cmd_validate_spec(args) -> int:
    from labloop.orchestrator.schema import validate_spec
    try:
        with open(args.file, encoding="utf-8") as fh:
            document = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read spec: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    diagnostics = validate_spec(document)
    if diagnostics:
        for diag in diagnostics:
            print(diag)
        return EXIT_VALIDATION
    print("spec is valid")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="labloop",
        description="Closed-loop validation of materials hypotheses.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="validate one hypothesis end to end")
    p.add_argument("--hypothesis", required=True)
    p.add_argument("--strategy", choices=["adversarial", "voting"])
    p.add_argument("--agents", choices=["scripted", "llm"])
    p.add_argument("--trials", type=int)
    p.add_argument("--out", help="runs directory (default ./runs)")
    p.add_argument("--config", help="JSON config file")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("serve", help="serve the dashboard API (and static UI)")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", help="directory with the built dashboard")
    p.add_argument("--runs", default="runs")
    p.add_argument("--config")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("compute-serve", help="serve the compute job protocol")
    p.add_argument("--port", type=int, default=8081)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--workers", type=int, default=4)
    p.set_defaults(fn=cmd_compute_serve)

    p = sub.add_parser("bench", help="run a benchmark case file")
    p.add_argument("--file", help="JSON case list (default: bundled 12 cases)")
    p.add_argument("--report", help="write metrics JSON here")
    p.add_argument("--out", help="work directory for per-case runs")
    p.add_argument("--config")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("validate-spec", help="check an experiment spec file")
    p.add_argument("--file", required=True)
    p.set_defaults(fn=cmd_validate_spec)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        return args.fn(args)
    except KeyboardInterrupt:
        return EXIT_INFRA


if __name__ == "__main__":
    sys.exit(main())
