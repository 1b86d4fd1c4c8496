"""Unit execution shared by the HTTP server and the in-process backend.

Units run concurrently on a thread pool; the result list is sorted by unit
grid position, so the payload is independent of worker count and
completion order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

from labloop.calculator.potential import PotentialParams
from labloop.calculator.runner import SimulationResult, run_unit
from labloop.frontend.types import ExperimentSpec, UnitFailure, parse_unit_id

DEFAULT_WORKERS = 4

UnitOutcome = SimulationResult | UnitFailure
OnUnit = Callable[[UnitOutcome], None]


def result_sort_key(doc_or_outcome) -> tuple[int, int]:
    unit_id = doc_or_outcome["unit_id"] if isinstance(doc_or_outcome, dict) \
        else doc_or_outcome.unit_id
    return parse_unit_id(unit_id)


def execute_spec(spec: ExperimentSpec, params: PotentialParams,
                 workers: int = DEFAULT_WORKERS,
                 on_unit: OnUnit | None = None) -> list[UnitOutcome]:
    """Run every unit of a spec; failures are entries, never aborts."""
    outcomes: list[UnitOutcome] = []
    if spec.units:
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            futures = [pool.submit(run_unit, unit, params) for unit in spec.units]
            for future in futures:
                outcome = future.result()
                outcomes.append(outcome)
                if on_unit is not None:
                    on_unit(outcome)
    return sorted(outcomes, key=result_sort_key)


def results_to_docs(outcomes: list[UnitOutcome]) -> list[dict]:
    return [o.to_dict() for o in outcomes]


def doc_is_failure(doc: dict) -> bool:
    """Result docs carry 'properties'; failure docs carry 'stage'."""
    return "stage" in doc
