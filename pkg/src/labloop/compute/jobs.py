"""Server-side job bookkeeping: FIFO queue, bounded admission, one job at a
time with its units spread over the worker pool.

State transitions are queued -> running -> done only; ``failed`` is
reserved for infrastructure faults (a crash in the executor itself), never
for per-unit simulation failures, which are ordinary results.
"""

from __future__ import annotations

import itertools
import logging
import queue
import threading
from dataclasses import dataclass, field

from labloop.calculator.potential import PotentialParams
from labloop.compute.executor import DEFAULT_WORKERS, execute_spec, results_to_docs
from labloop.frontend.types import ExperimentSpec

log = logging.getLogger(__name__)

QUEUE_BOUND = 64


class QueueFull(RuntimeError):
    pass


@dataclass
class Job:
    job_id: str
    spec: ExperimentSpec
    state: str = "queued"
    completed_units: int = 0
    total_units: int = 0
    results: list[dict] = field(default_factory=list)
    error: str | None = None

    def status(self) -> dict:
        return {"state": self.state, "completed_units": self.completed_units,
                "total_units": self.total_units}


class JobStore:
    """Owns the queue, the worker thread, and all job state transitions."""

    def __init__(self, params: PotentialParams | None = None,
                 workers: int = DEFAULT_WORKERS, queue_bound: int = QUEUE_BOUND):
        self.params = params or PotentialParams.builtin()
        self.workers = workers
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()
        self._queue: queue.Queue[Job | None] = queue.Queue()
        self._queue_bound = queue_bound
        self._counter = itertools.count(1)
        self._runner = threading.Thread(target=self._run_loop, daemon=True,
                                        name="labloop-compute-runner")
        self._runner.start()

    def submit(self, spec: ExperimentSpec) -> Job:
        with self._lock:
            queued = sum(1 for j in self._jobs.values() if j.state == "queued")
            if queued >= self._queue_bound:
                raise QueueFull(f"job queue bound {self._queue_bound} reached")
            job = Job(job_id=f"job-{next(self._counter):06d}", spec=spec,
                      total_units=len(spec.units))
            self._jobs[job.job_id] = job
        self._queue.put(job)
        return job

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)

    def close(self):
        self._queue.put(None)

    def _run_loop(self):
        while True:
            job = self._queue.get()
            if job is None:
                return
            with self._lock:
                job.state = "running"
            try:
                def count(_):
                    with self._lock:
                        job.completed_units += 1

                outcomes = execute_spec(job.spec, self.params,
                                        workers=self.workers, on_unit=count)
                with self._lock:
                    job.results = results_to_docs(outcomes)
                    job.state = "done"
            except Exception as exc:                       # infrastructure fault
                log.exception("job %s failed", job.job_id)
                with self._lock:
                    job.error = f"{type(exc).__name__}: {exc}"
                    job.state = "failed"
