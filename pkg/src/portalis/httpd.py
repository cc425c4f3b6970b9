"""HTTP + JSON surface over the gateway, plus static frontend serving.

Stdlib threading server: JSON bodies in, JSON bodies out, engine errors
mapped to status codes in one place. When a static directory is configured,
GET / and GET /ui/* serve the single-page frontend.
"""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional
from urllib.parse import parse_qs, urlparse

from .gateway import PortalGateway, error_body, status_for

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
    ".map": "application/json",
}


class PortalRequestHandler(BaseHTTPRequestHandler):
    gateway: PortalGateway
    static_dir: Optional[Path] = None
    protocol_version = "HTTP/1.1"

    # -- plumbing ------------------------------------------------------------

    def log_message(self, format, *args):  # quiet by default
        pass

    def _send_json(self, status: int, payload) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length", "0") or "0")
        if length == 0:
            return {}
        raw = self.rfile.read(length)
        try:
            parsed = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise ValueError("request body is not valid JSON")
        if not isinstance(parsed, dict):
            raise ValueError("request body must be a JSON object")
        return parsed

    def _handle(self, fn, *args, **kwargs) -> None:
        try:
            self._send_json(200, fn(*args, **kwargs))
        except ValueError as exc:
            self._send_json(400, {"error": "BadRequest", "message": str(exc)})
        except Exception as exc:  # engine errors map by class
            status = status_for(exc)
            if status == 500:
                self._send_json(500, {"error": "InternalError",
                                      "message": str(exc)})
            else:
                self._send_json(status, error_body(exc))

    # -- routing ---------------------------------------------------------------

    def do_GET(self):
        url = urlparse(self.path)
        query = {k: v[0] for k, v in parse_qs(url.query).items()}
        token = query.get("token", "")
        if url.path == "/pages":
            return self._handle(self.gateway.list_pages, token)
        match = re.fullmatch(r"/page/([^/]+)", url.path)
        if match:
            return self._handle(self.gateway.get_page, token, match.group(1))
        match = re.fullmatch(r"/meta/([^/]+)", url.path)
        if match:
            return self._handle(self.gateway.get_metadata, token,
                                match.group(1))
        if self._serve_static(url.path):
            return
        self._send_json(404, {"error": "NotFound",
                              "message": f"no route {url.path}"})

    def do_POST(self):
        url = urlparse(self.path)
        try:
            body = self._read_body()
        except ValueError as exc:
            return self._send_json(400, {"error": "BadRequest",
                                         "message": str(exc)})
        if url.path == "/session":
            return self._handle(self.gateway.open_session,
                                str(body.get("profile", "")))
        if url.path == "/event":
            args = body.get("args") or {}
            if not isinstance(args, dict):
                return self._send_json(400, {
                    "error": "BadRequest", "message": "args must be an object"})
            return self._handle(
                self.gateway.submit_event, str(body.get("token", "")),
                str(body.get("name", "")), args,
                body.get("idempotencyKey"))
        match = re.fullmatch(r"/warehouse/([^/]+)/update", url.path)
        if match:
            change = body.get("change")
            if not isinstance(change, dict):
                return self._send_json(400, {
                    "error": "BadRequest",
                    "message": "change must be an object"})
            return self._handle(self.gateway.warehouse_update, match.group(1),
                                change, bool(body.get("contentCritical")))
        if url.path == "/agent/run":
            tick = body.get("tick", 0)
            if not isinstance(tick, int):
                return self._send_json(400, {"error": "BadRequest",
                                             "message": "tick must be an int"})
            return self._handle(self.gateway.agent_run, tick)
        self._send_json(404, {"error": "NotFound",
                              "message": f"no route {url.path}"})

    def do_DELETE(self):
        url = urlparse(self.path)
        match = re.fullmatch(r"/session/([^/]+)", url.path)
        if match:
            return self._handle(self.gateway.close_session, match.group(1))
        self._send_json(404, {"error": "NotFound",
                              "message": f"no route {url.path}"})

    # -- static frontend ---------------------------------------------------------

    def _serve_static(self, path: str) -> bool:
        if self.static_dir is None:
            return False
        if path == "/":
            path = "/index.html"
        elif path.startswith("/ui/"):
            path = path[len("/ui"):]
        elif path not in ("/index.html",):
            return False
        root = self.static_dir.resolve()
        target = (root / path.lstrip("/")).resolve()
        if not str(target).startswith(str(root)) or not target.is_file():
            self._send_json(404, {"error": "NotFound",
                                  "message": f"no file {path}"})
            return True
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", _CONTENT_TYPES.get(
            target.suffix, "application/octet-stream"))
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)
        return True


def make_server(gateway: PortalGateway, host: str = "127.0.0.1",
                port: int = 0,
                static_dir: Optional[Path] = None) -> ThreadingHTTPServer:
    handler = type("BoundPortalHandler", (PortalRequestHandler,), {
        "gateway": gateway,
        "static_dir": Path(static_dir) if static_dir else None,
    })
    return ThreadingHTTPServer((host, port), handler)


class ServerThread:
    """Run the portal server on a background thread (tests, demos)."""

    def __init__(self, gateway: PortalGateway, host: str = "127.0.0.1",
                 port: int = 0, static_dir: Optional[Path] = None):
        self.server = make_server(gateway, host, port, static_dir)
        self.thread = threading.Thread(
            target=lambda: self.server.serve_forever(poll_interval=0.05),
            daemon=True)

    @property
    def address(self) -> str:
        host, port = self.server.server_address[:2]
        return f"http://{host}:{port}"

    def __enter__(self) -> "ServerThread":
        self.thread.start()
        return self

    def __exit__(self, *exc_info) -> None:
        self.server.shutdown()
        self.server.server_close()
        self.thread.join(timeout=5)
