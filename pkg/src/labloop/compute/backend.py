"""Backend selection: in-process execution or a remote compute server.

The MIND_COMPUTE_URL environment variable selects the remote backend;
absent, units run in-process. Both return identical result documents for
the same spec (the in-process path is the oracle the wire path is tested
against).
"""

from __future__ import annotations

import os
from typing import Callable, Protocol

from labloop.calculator.potential import PotentialParams
from labloop.compute.client import ComputeClient
from labloop.compute.executor import execute_spec, result_sort_key, results_to_docs
from labloop.frontend.types import ExperimentSpec

COMPUTE_URL_ENV = "MIND_COMPUTE_URL"


class ComputeBackend(Protocol):
    def run_spec(self, spec: ExperimentSpec,
                 on_unit: Callable[[dict], None] | None = None) -> list[dict]:
        """Execute all units and return result documents sorted by unit id."""


class InProcessBackend:
    def __init__(self, params: PotentialParams | None = None, workers: int = 4):
        self.params = params or PotentialParams.builtin()
        self.workers = workers

    def run_spec(self, spec, on_unit=None):
        callback = (lambda outcome: on_unit(outcome.to_dict())) if on_unit else None
        return results_to_docs(execute_spec(spec, self.params, self.workers, callback))


class RemoteBackend:
    def __init__(self, url: str, poll_interval: float = 0.05):
        self.client = ComputeClient(url)
        self.poll_interval = poll_interval

    def run_spec(self, spec, on_unit=None):
        job_id = self.client.submit(spec)
        docs = self.client.wait(job_id, poll_interval=self.poll_interval)
        docs = sorted(docs, key=result_sort_key)
        if on_unit is not None:
            for doc in docs:
                on_unit(doc)
        return docs


def select_backend(mode: str = "auto", url: str | None = None,
                   params: PotentialParams | None = None,
                   workers: int = 4) -> ComputeBackend:
    if mode == "remote" or (mode == "auto" and (url or os.environ.get(COMPUTE_URL_ENV))):
        target = url or os.environ.get(COMPUTE_URL_ENV)
        if not target:
            raise ValueError("remote backend selected but no URL configured")
        return RemoteBackend(target)
    return InProcessBackend(params=params, workers=workers)
