"""HTTP client for the compute job protocol."""

from __future__ import annotations

import time

import requests

from labloop.frontend.types import ExperimentSpec


class ComputeError(RuntimeError):
    pass


class SchemaRejected(ComputeError):
    def __init__(self, diagnostics: list[str]):
        self.diagnostics = diagnostics
        super().__init__(f"spec rejected: {diagnostics}")


class Overloaded(ComputeError):
    pass


class UnknownJob(ComputeError):
    pass


class NotFinished(ComputeError):
    pass


class ComputeClient:
    def __init__(self, base_url: str, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._session = requests.Session()

    def submit(self, spec: ExperimentSpec | dict) -> str:
        document = spec.to_dict() if isinstance(spec, ExperimentSpec) else spec
        resp = self._session.post(f"{self.base_url}/v1/jobs", json=document,
                                  timeout=self.timeout)
        if resp.status_code == 201:
            return resp.json()["job_id"]
        if resp.status_code == 400:
            raise SchemaRejected(resp.json()["error"].get("diagnostics", []))
        if resp.status_code == 503:
            raise Overloaded("compute server queue is full")
        raise ComputeError(f"unexpected response {resp.status_code}: {resp.text}")

    def status(self, job_id: str) -> dict:
        resp = self._session.get(f"{self.base_url}/v1/jobs/{job_id}", timeout=self.timeout)
        if resp.status_code == 200:
            return resp.json()
        if resp.status_code == 404:
            raise UnknownJob(job_id)
        raise ComputeError(f"unexpected response {resp.status_code}: {resp.text}")

    def results(self, job_id: str) -> list[dict]:
        resp = self._session.get(f"{self.base_url}/v1/jobs/{job_id}/results",
                                 timeout=self.timeout)
        if resp.status_code == 200:
            return resp.json()["results"]
        if resp.status_code == 404:
            raise UnknownJob(job_id)
        if resp.status_code == 409:
            raise NotFinished(job_id)
        raise ComputeError(f"unexpected response {resp.status_code}: {resp.text}")

    def wait(self, job_id: str, poll_interval: float = 0.05,
             timeout: float = 600.0, on_progress=None) -> list[dict]:
        """Poll until the job is done and return its results."""
        deadline = time.monotonic() + timeout
        while True:
            status = self.status(job_id)
            if on_progress is not None:
                on_progress(status)
            if status["state"] == "done":
                return self.results(job_id)
            if status["state"] == "failed":
                raise ComputeError(f"job {job_id} failed server-side")
            if time.monotonic() > deadline:
                raise ComputeError(f"timed out waiting for job {job_id}")
            time.sleep(poll_interval)
