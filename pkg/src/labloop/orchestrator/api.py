"""HTTP API backing the dashboard.

    POST /api/runs {hypothesis_text, config?}     -> 201 {"run_id"}
    GET  /api/runs                                -> {"runs": [summaries]}
    GET  /api/runs/{id}                           -> snapshot (run.json)
    GET  /api/runs/{id}/events                    -> SSE: replay from seq 1,
                                                     then follow live
    POST /api/runs/{id}/abort                     -> 202

SSE frames use the event kind as the event name and the payload as data;
the id field carries the seq. Static files (the dashboard build) are
served from an optional directory for all non-/api paths.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import re
import threading
import time
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from labloop.frontend.registry import MaterialRegistry
from labloop.frontend.types import Hypothesis
from labloop.orchestrator.engine import RunConfig, RunEngine
from labloop.orchestrator.events import utc_now
from labloop.orchestrator.state import TERMINAL_STATES
from labloop.orchestrator.store import RunStore, list_runs

log = logging.getLogger(__name__)

_RUN_RE = re.compile(r"^/api/runs/([^/]+)$")
_EVENTS_RE = re.compile(r"^/api/runs/([^/]+)/events$")
_ABORT_RE = re.compile(r"^/api/runs/([^/]+)/abort$")

SSE_POLL_S = 0.15


class RunManager:
    """Owns the runs directory and the background threads driving runs."""

    def __init__(self, runs_root: str | Path, config: RunConfig,
                 registry: MaterialRegistry | None = None):
        self.runs_root = Path(runs_root)
        self.runs_root.mkdir(parents=True, exist_ok=True)
        self.config = config
        self.registry = registry or MaterialRegistry.builtin()
        self._aborts: dict[str, threading.Event] = {}
        self._threads: dict[str, threading.Thread] = {}
        self._lock = threading.Lock()

    def start_run(self, hypothesis_text: str, config_overrides: dict | None = None) -> str:
        run_id = f"run-{uuid.uuid4().hex[:12]}"
        config = self.config
        if config_overrides:
            merged = _config_as_dict(config)
            _deep_update(merged, config_overrides)
            config = RunConfig.from_dict(merged)
        hypothesis = Hypothesis(id=f"h-{uuid.uuid4().hex[:12]}", text=hypothesis_text,
                                submitted_at=utc_now())
        abort = threading.Event()
        engine = RunEngine(RunStore(self.runs_root / run_id), config,
                           registry=self.registry, abort_check=abort.is_set)
        thread = threading.Thread(target=self._drive, args=(engine, hypothesis, run_id),
                                  daemon=True, name=f"labloop-{run_id}")
        with self._lock:
            self._aborts[run_id] = abort
            self._threads[run_id] = thread
        thread.start()
        return run_id

    def _drive(self, engine: RunEngine, hypothesis: Hypothesis, run_id: str):
        try:
            engine.start(hypothesis)
        except Exception:
            log.exception("run %s crashed", run_id)

    def abort(self, run_id: str) -> bool:
        with self._lock:
            event = self._aborts.get(run_id)
        if event is None:
            if not (self.runs_root / run_id / "events.jsonl").exists():
                return False
            return True  # already finished in a previous process; nothing to stop
        event.set()
        return True

    def store(self, run_id: str) -> RunStore | None:
        path = self.runs_root / run_id
        if not (path / "events.jsonl").exists():
            return None
        return RunStore(path)

    def summaries(self) -> list[dict]:
        out = []
        for store in list_runs(self.runs_root):
            snapshot = store.read_snapshot()
            if snapshot:
                out.append({k: snapshot.get(k) for k in
                            ("run_id", "state", "iteration", "final_decision")}
                           | {"hypothesis_text": snapshot.get("hypothesis", {}).get("text", ""),
                              "updated_at": snapshot.get("updated_at")})
        return out


def _config_as_dict(config: RunConfig) -> dict:
    return {
        "compute": {"mode": config.compute_mode, "url": config.compute_url},
        "discussion": {"strategy": config.strategy, "agents": config.agents_mode,
                       "rounds": config.rounds, "n_experts": config.n_experts,
                       "confidence_threshold": config.confidence_threshold,
                       "max_iterations": config.max_iterations},
        "n_trials": config.n_trials,
        "defaults": dict(config.defaults),
    }


def _deep_update(target: dict, patch: dict):
    for key, value in patch.items():
        if isinstance(value, dict) and isinstance(target.get(key), dict):
            _deep_update(target[key], value)
        else:
            target[key] = value


class _ApiHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    manager: RunManager = None
    static_dir: Path | None = None

    def log_message(self, fmt, *args):
        log.debug("api: " + fmt, *args)

    def _send_json(self, code: int, doc: dict):
        body = json.dumps(doc).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        if self.path == "/api/runs":
            try:
                length = int(self.headers.get("Content-Length", "0"))
                doc = json.loads(self.rfile.read(length) or b"{}")
            except (ValueError, json.JSONDecodeError):
                return self._send_json(400, {"error": {"code": "bad_request",
                                                       "message": "body is not JSON"}})
            text = (doc.get("hypothesis_text") or "").strip()
            if not text:
                return self._send_json(400, {"error": {
                    "code": "empty_hypothesis",
                    "message": "hypothesis_text must be non-empty"}})
            run_id = self.manager.start_run(text, doc.get("config"))
            return self._send_json(201, {"run_id": run_id})

        m = _ABORT_RE.match(self.path)
        if m:
            if self.manager.abort(m.group(1)):
                return self._send_json(202, {"state": "aborting"})
            return self._send_json(404, {"error": {"code": "unknown_run"}})
        self._send_json(404, {"error": {"code": "unknown_route"}})

    def do_GET(self):
        if self.path == "/api/runs":
            return self._send_json(200, {"runs": self.manager.summaries()})
        m = _RUN_RE.match(self.path)
        if m:
            store = self.manager.store(m.group(1))
            if store is None:
                return self._send_json(404, {"error": {"code": "unknown_run"}})
            return self._send_json(200, store.read_snapshot() or {})
        m = _EVENTS_RE.match(self.path)
        if m:
            store = self.manager.store(m.group(1))
            if store is None:
                return self._send_json(404, {"error": {"code": "unknown_run"}})
            return self._stream_events(store)
        return self._serve_static()

    def _stream_events(self, store: RunStore):
        self.send_response(200)
        self.send_header("Content-Type", "text/event-stream")
        self.send_header("Cache-Control", "no-cache")
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Connection", "close")
        self.end_headers()
        last_seq = 0
        try:
            while True:
                for event in store.read_events(after_seq=last_seq):
                    last_seq = event.seq
                    # event name = kind, data = payload, seq rides in id
                    frame = (f"id: {event.seq}\n"
                             f"event: {event.kind}\n"
                             f"data: {json.dumps(event.payload)}\n\n")
                    self.wfile.write(frame.encode("utf-8"))
                self.wfile.flush()
                snapshot = store.read_snapshot() or {}
                if snapshot.get("state") in TERMINAL_STATES \
                        and snapshot.get("last_seq", 0) <= last_seq:
                    self.wfile.write(b"event: stream_end\ndata: {}\n\n")
                    self.wfile.flush()
                    return
                time.sleep(SSE_POLL_S)
        except (BrokenPipeError, ConnectionResetError):
            pass  # client went away

    def _serve_static(self):
        if self.static_dir is None:
            return self._send_json(404, {"error": {"code": "unknown_route"}})
        rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
        target = (self.static_dir / rel).resolve()
        if not str(target).startswith(str(self.static_dir.resolve())) \
                or not target.is_file():
            target = self.static_dir / "index.html"
            if not target.is_file():
                return self._send_json(404, {"error": {"code": "not_found"}})
        body = target.read_bytes()
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


class ApiServer:
    def __init__(self, manager: RunManager, host: str = "127.0.0.1", port: int = 0,
                 static_dir: str | Path | None = None):
        handler = type("BoundApiHandler", (_ApiHandler,), {
            "manager": manager,
            "static_dir": Path(static_dir) if static_dir else None,
        })
        self._httpd = ThreadingHTTPServer((host, port), handler)
        self._httpd.daemon_threads = True
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "ApiServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever,
                                        daemon=True, name="labloop-api-http")
        self._thread.start()
        return self

    def stop(self):
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread:
            self._thread.join(timeout=5)

    def serve_forever(self):
        log.info("api server listening on %s", self.url)
        try:
            self._httpd.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()
