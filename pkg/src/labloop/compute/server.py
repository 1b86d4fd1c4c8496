"""Minimal HTTP+JSON job protocol for remote experiment execution.

    POST /v1/jobs                body = ExperimentSpec -> 201 {"job_id": ...}
                                 400 schema_rejected / 503 overloaded
    GET  /v1/jobs/{id}           -> {"state", "completed_units", "total_units"}
    GET  /v1/jobs/{id}/results   -> {"results": [...]}; 409 until done

No authentication; bind address and port are constructor arguments.
Finished jobs stay in memory until shutdown.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from labloop.calculator.potential import PotentialParams
from labloop.compute.jobs import JobStore, QueueFull
from labloop.frontend.types import ExperimentSpec
from labloop.orchestrator.schema import validate_spec

log = logging.getLogger(__name__)

_JOB_RE = re.compile(r"^/v1/jobs/([^/]+)$")
_RESULTS_RE = re.compile(r"^/v1/jobs/([^/]+)/results$")


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    store: JobStore = None  # injected by ComputeServer

    def log_message(self, fmt, *args):
        log.debug("compute-server: " + fmt, *args)

    def _send(self, code: int, doc: dict):
        body = json.dumps(doc).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _error(self, code: int, error_code: str, **extra):
        self._send(code, {"error": {"code": error_code, **extra}})

    def do_POST(self):
        if self.path != "/v1/jobs":
            return self._error(404, "unknown_route")
        try:
            length = int(self.headers.get("Content-Length", "0"))
            document = json.loads(self.rfile.read(length))
        except (ValueError, json.JSONDecodeError):
            return self._error(400, "schema_rejected", diagnostics=["body is not JSON"])
        diagnostics = validate_spec(document) if isinstance(document, dict) \
            else ["top-level document must be an object"]
        if diagnostics:
            return self._error(400, "schema_rejected", diagnostics=diagnostics)
        try:
            job = self.store.submit(ExperimentSpec.from_dict(document))
        except QueueFull:
            return self._error(503, "overloaded")
        self._send(201, {"job_id": job.job_id})

    def do_GET(self):
        m = _RESULTS_RE.match(self.path)
        if m:
            job = self.store.get(m.group(1))
            if job is None:
                return self._error(404, "unknown_job")
            if job.state != "done":
                return self._error(409, "not_finished", state=job.state)
            return self._send(200, {"results": job.results})
        m = _JOB_RE.match(self.path)
        if m:
            job = self.store.get(m.group(1))
            if job is None:
                return self._error(404, "unknown_job")
            return self._send(200, job.status())
        self._error(404, "unknown_route")


class ComputeServer:
    """Threaded HTTP server around a JobStore; start()/stop() for embedding."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0,
                 params: PotentialParams | None = None, workers: int = 4,
                 queue_bound: int = 64):
        self.store = JobStore(params=params, workers=workers, queue_bound=queue_bound)
        handler = type("BoundHandler", (_Handler,), {"store": self.store})
        self._httpd = ThreadingHTTPServer((host, port), handler)
        self._httpd.daemon_threads = True
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "ComputeServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever,
                                        daemon=True, name="labloop-compute-http")
        self._thread.start()
        return self

    def stop(self):
        self._httpd.shutdown()
        self._httpd.server_close()
        self.store.close()
        if self._thread:
            self._thread.join(timeout=5)

    def serve_forever(self):
        log.info("compute server listening on %s", self.url)
        try:
            self._httpd.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()
