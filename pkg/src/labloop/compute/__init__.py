"""Experiment execution: in-process backend, HTTP job server, and client."""

from labloop.compute.executor import execute_spec, result_sort_key, results_to_docs
from labloop.compute.backend import (
    ComputeBackend,
    InProcessBackend,
    RemoteBackend,
    select_backend,
)
from labloop.compute.client import (
    ComputeClient,
    NotFinished,
    Overloaded,
    SchemaRejected,
    UnknownJob,
)
from labloop.compute.server import ComputeServer

__all__ = [
    "execute_spec",
    "results_to_docs",
    "result_sort_key",
    "ComputeBackend",
    "InProcessBackend",
    "RemoteBackend",
    "select_backend",
    "ComputeClient",
    "ComputeServer",
    "SchemaRejected",
    "Overloaded",
    "UnknownJob",
    "NotFinished",
]
