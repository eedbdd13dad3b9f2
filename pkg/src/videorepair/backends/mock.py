"""Deterministic scripted mock servers, one per backend role.

A mock is launched with a scenario: a JSON document mapping request
fingerprints to canned responses. Fingerprints hash the canonical
request minus volatile fields (rendered instructions and tensor
payloads by default), so scenarios are written against the stable,
semantic part of each request. A rule may carry a single response or an
ordered response sequence that is consumed call by call — this is how
scenarios express "the same question answers differently once the video
improved".

The t2v mock is behavioral rather than scripted: it honors the
preserve contract. Output pixels where the request's pixel mask is 1
copy the reference input video bit-exactly; the rest is filled from a
pattern keyed by the request seed. Requests without a reference render
the pattern everywhere (initial generation).

Every server exposes GET /__stats with per-path and per-fingerprint
call counters, and GET /healthz. Unscripted requests return HTTP 500
with an ``unscripted_request`` error body so tests fail loudly.
"""

from __future__ import annotations

import json
import logging
import tempfile
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from ..errors import ConfigError
from .roles import BackendRole, PATHS_BY_ROLE, REQUEST_SCHEMA_BY_PATH, RESPONSE_SCHEMA_BY_PATH
from .wire import decode_tensor_field, fingerprint, tensor_payload
from . import schemas

log = logging.getLogger(__name__)

DEFAULT_VOLATILE: dict[BackendRole, frozenset[str]] = {
    BackendRole.LLM_PLANNER: frozenset({"instruction"}),
    BackendRole.VQA: frozenset({"instruction", "image", "qa_pairs"}),
    BackendRole.POINTER: frozenset({"instruction", "image"}),
    BackendRole.SEGMENTER: frozenset({"instruction", "image"}),
    BackendRole.T2V: frozenset({"instruction"}),
    BackendRole.SCORER: frozenset({"instruction", "video"}),
}


class _Rule:
    def __init__(self, path: str, doc: dict):
        self.path = path
        if "responses" in doc:
            self.responses = list(doc["responses"])
            if not self.responses:
                raise ConfigError("rule with empty response sequence")
        else:
            self.responses = [doc["response"]]
        self.repeat_last = bool(doc.get("repeat_last", True))
        self.cursor = 0

    def next_response(self) -> dict:
        if self.cursor < len(self.responses):
            response = self.responses[self.cursor]
            self.cursor += 1
            return response
        if self.repeat_last:
            return self.responses[-1]
        raise ConfigError(f"response sequence for {self.path} exhausted")


class Scenario:
    """Parsed scenario script for one role."""

    def __init__(self, doc: dict):
        self.role = BackendRole(doc["role"])
        self.volatile = frozenset(doc.get("volatile", DEFAULT_VOLATILE[self.role]))
        self.behavior = doc.get("behavior")
        self.rules: dict[str, _Rule] = {}
        for rule_doc in doc.get("rules", []):
            path = rule_doc["path"]
            if path not in PATHS_BY_ROLE[self.role]:
                raise ConfigError(f"path {path} does not belong to role {self.role.value}")
            rule = _Rule(path, rule_doc)
            for response in rule.responses:
                schemas.validate(RESPONSE_SCHEMA_BY_PATH[path], response, role=self.role.value)
            key = self._fingerprint(path, rule_doc["request"])
            if key in self.rules:
                raise ConfigError(f"duplicate scenario rule for fingerprint {key}")
            self.rules[key] = rule
        if self.role == BackendRole.T2V and self.behavior is None:
            self.behavior = "t2v_preserve"

    def _fingerprint(self, path: str, request: dict) -> str:
        return fingerprint({"__path": path, **request}, self.volatile)


class MockBackend:
    """One scripted HTTP server bound to 127.0.0.1 on an ephemeral port."""

    def __init__(self, scenario: Scenario | dict):
        if isinstance(scenario, dict):
            scenario = Scenario(scenario)
        self.scenario = scenario
        self._lock = threading.Lock()
        self._workdir = tempfile.mkdtemp(prefix="videorepair-mock-")
        self.calls_by_path: dict[str, int] = {}
        self.calls_by_fingerprint: dict[str, int] = {}
        handler = _make_handler(self)
        self._server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "MockBackend":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)

    def __enter__(self) -> "MockBackend":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()

    # -- request handling ---------------------------------------------------

    def stats(self) -> dict:
        with self._lock:
            return {
                "role": self.scenario.role.value,
                "total": sum(self.calls_by_path.values()),
                "by_path": dict(self.calls_by_path),
                "by_fingerprint": dict(self.calls_by_fingerprint),
            }

    def dispatch(self, path: str, request: dict) -> tuple[int, dict]:
        role = self.scenario.role
        if path not in PATHS_BY_ROLE[role]:
            return 404, {"error": "unknown_path", "path": path}
        if not schemas.is_valid(REQUEST_SCHEMA_BY_PATH[path], request):
            return 422, {"error": "schema_violation", "path": path}

        key = fingerprint({"__path": path, **request}, self.scenario.volatile)
        with self._lock:
            self.calls_by_path[path] = self.calls_by_path.get(path, 0) + 1
            self.calls_by_fingerprint[key] = self.calls_by_fingerprint.get(key, 0) + 1
            rule = self.scenario.rules.get(key)
            if rule is not None:
                return 200, rule.next_response()

        if self.scenario.behavior == "t2v_preserve" and path == "/v1/generate":
            return 200, _generate_with_preserve(request, self._workdir)

        log.error("unscripted %s request, fingerprint %s", path, key)
        return 500, {
            "error": "unscripted_request",
            "path": path,
            "fingerprint": key,
            "volatile": sorted(self.scenario.volatile),
        }


def _generate_with_preserve(request: dict, workdir: str) -> dict:
    dims = request["dims"]
    shape = (dims["frames"], dims["height"], dims["width"], 3)
    rng = np.random.default_rng(int(request["seed"]) % (1 << 64))
    pattern = rng.integers(0, 256, size=shape, dtype=np.uint8)
    reference = request.get("reference")
    if reference is None:
        video = pattern
    else:
        source = decode_tensor_field(reference["video"])
        mask = decode_tensor_field(reference["pixel_mask"])
        video = np.where(mask[..., None] == 1, source, pattern).astype(np.uint8)
    return {"video": tensor_payload(video, workdir=workdir)}


def _make_handler(backend: MockBackend):
    class Handler(BaseHTTPRequestHandler):
        server_version = "videorepair-mock/1"

        def log_message(self, *args):  # keep test output clean
            pass

        def _send(self, status: int, doc: dict) -> None:
            body = json.dumps(doc).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            if self.path == "/__stats":
                self._send(200, backend.stats())
            elif self.path == "/healthz":
                self._send(200, {"status": "ok", "roles": [backend.scenario.role.value]})
            else:
                self._send(404, {"error": "unknown_path", "path": self.path})

        def do_POST(self):
            length = int(self.headers.get("Content-Length", "0"))
            raw = self.rfile.read(length)
            try:
                request = json.loads(raw)
            except ValueError:
                self._send(422, {"error": "bad_json"})
                return
            try:
                status, doc = backend.dispatch(self.path, request)
            except Exception as exc:  # surface handler bugs as server errors
                log.exception("mock dispatch failed")
                status, doc = 500, {"error": "internal", "detail": str(exc)}
            self._send(status, doc)

    return Handler


class MockCluster:
    """Launch one mock per role from a bundle of scenarios."""

    def __init__(self, scenarios: dict[str | BackendRole, dict | Scenario]):
        self.backends: dict[BackendRole, MockBackend] = {}
        for role, scenario in scenarios.items():
            self.backends[BackendRole(role)] = MockBackend(scenario)

    def start(self) -> "MockCluster":
        for backend in self.backends.values():
            backend.start()
        return self

    def stop(self) -> None:
        for backend in self.backends.values():
            backend.stop()

    def __enter__(self) -> "MockCluster":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()

    def endpoints(self) -> dict[str, str]:
        return {role.value: backend.url for role, backend in self.backends.items()}

    def stats(self, role: str | BackendRole) -> dict:
        return self.backends[BackendRole(role)].stats()
