"""Loopback JSON API over the live loop.

Read endpoints mirror the orchestrator's published state; the three write
endpoints (override, pause, resume) require the shared secret header when one
is configured. Binding beyond 127.0.0.1 is an explicit opt-in: the write
endpoints steer a live agent.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .orchestrator import AlreadyPaused, EmptyOverride, NotPaused, Orchestrator

SECRET_HEADER = "X-Afloop-Secret"


class ApiServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, orchestrator: Orchestrator):
        super().__init__(address, ApiHandler)
        self.orchestrator = orchestrator


class ApiHandler(BaseHTTPRequestHandler):
    server: ApiServer

    def log_message(self, fmt, *args):  # quiet; the event log is the record
        pass

    def _send(self, code: int, payload: dict) -> None:
        body = json.dumps(payload).encode()
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", f"Content-Type, {SECRET_HEADER}")
        self.end_headers()
        self.wfile.write(body)

    def do_OPTIONS(self):
        self._send(204, {})

    def do_GET(self):
        orch = self.server.orchestrator
        url = urlparse(self.path)
        if url.path == "/status":
            self._send(200, orch.status())
        elif url.path == "/deps":
            self._send(200, orch.deps_payload())
        elif url.path == "/sections":
            self._send(200, orch.sections_payload())
        elif url.path == "/bottlenecks":
            self._send(200, orch.bottlenecks_payload())
        elif url.path == "/growth":
            params = parse_qs(url.query)
            try:
                stride = int(params["stride"][0]) if "stride" in params else None
                self._send(200, orch.growth_payload(stride))
            except ValueError:
                self._send(400, {"error": "stride must be a positive integer"})
        else:
            self._send(404, {"error": f"unknown path {url.path}"})

    def _authorized(self) -> bool:
        secret = self.server.orchestrator.config.api_secret
        return not secret or self.headers.get(SECRET_HEADER) == secret

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if not length:
            return {}
        try:
            return json.loads(self.rfile.read(length))
        except json.JSONDecodeError:
            return {}

    def do_POST(self):
        orch = self.server.orchestrator
        path = urlparse(self.path).path
        if path not in ("/override", "/pause", "/resume"):
            self._send(404, {"error": f"unknown path {path}"})
            return
        if not self._authorized():
            self._send(401, {"error": "bad or missing secret"})
            return
        if path == "/override":
            text = self._body().get("text", "")
            try:
                orch.enqueue_override(text)
            except EmptyOverride:
                self._send(400, {"error": "override text must be non-empty"})
                return
            self._send(200, {"status": orch.status()})
        elif path == "/pause":
            try:
                self._send(200, {"status": orch.pause()})
            except AlreadyPaused:
                self._send(409, {"error": "already paused"})
        else:
            try:
                self._send(200, {"status": orch.resume()})
            except NotPaused:
                self._send(409, {"error": "not paused"})


def serve_api(
    orchestrator: Orchestrator, port: int, host: str = "127.0.0.1"
) -> ApiServer:
    """Start the API in a daemon thread; caller owns shutdown()."""
    server = ApiServer((host, port), orchestrator)
    thread = threading.Thread(target=server.serve_forever, daemon=True, name="afloop-api")
    thread.start()
    return server
