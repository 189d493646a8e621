"""Wire-protocol server: UTF-8 JSON messages over stdio lines or HTTP.

Protocol (version 1), identical on both transports:
  request   {"type":"score","query":"...","frames":[{"index":i,"asset":"..."}]}
  response  {"type":"scores","scores":[{"index":i,"score":x}]}
  error     {"type":"error","message":"...","fatal":bool}
  handshake {"type":"hello","protocol":1} -> {"type":"ready","protocol":1}
            (stdio; HTTP exposes GET /healthz -> 200 and POST /score)

An unreadable asset answers the request with a non-fatal error naming the
asset; malformed or unknown messages answer with a fatal error. One batch
in flight per connection — pipelining is the client's job.
"""

from __future__ import annotations

import json
import math
import sys
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .backends import AssetError

PROTOCOL_VERSION = 1


class SidecarServer:
    """Transport-independent message handler around one scoring backend."""

    def __init__(self, backend):
        self.backend = backend

    def handle(self, msg: dict) -> dict:
        if not isinstance(msg, dict):
            return _fatal("message must be a JSON object")
        if msg.get("type") == "hello":
            return {"type": "ready", "protocol": PROTOCOL_VERSION}
        if msg.get("type") != "score":
            return _fatal(f"unknown message type {msg.get('type')!r}")
        try:
            frames = [(int(f["index"]), str(f["asset"])) for f in msg["frames"]]
            query = str(msg["query"])
        except (KeyError, TypeError, ValueError) as e:
            return _fatal(f"malformed score request: {e}")
        try:
            values = self.backend.score_batch(query, frames)
        except AssetError as e:
            return {"type": "error", "message": str(e), "fatal": False}
        if len(values) != len(frames) or not all(math.isfinite(v) for v in values):
            return _fatal("backend produced a malformed score batch")
        return {
            "type": "scores",
            "scores": [
                {"index": idx, "score": float(v)}
                for (idx, _), v in zip(frames, values)
            ],
        }


def _fatal(message: str) -> dict:
    return {"type": "error", "message": message, "fatal": True}


def serve_stdio(server: SidecarServer, stdin=None, stdout=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    for line in stdin:
        if not line.strip():
            continue
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as e:
            reply = _fatal(f"bad JSON: {e}")
        else:
            reply = server.handle(msg)
        stdout.write(json.dumps(reply) + "\n")
        stdout.flush()


def make_http_server(server: SidecarServer, port: int = 0) -> ThreadingHTTPServer:
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):  # keep stdio clean for operators
            pass

        def _send(self, code: int, body: bytes, ctype: str = "application/json"):
            self.send_response(code)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            if self.path == "/healthz":
                self._send(200, b"ok", "text/plain")
            else:
                self._send(404, b"not found", "text/plain")

        def do_POST(self):
            if self.path != "/score":
                self._send(404, b"not found", "text/plain")
                return
            length = int(self.headers.get("Content-Length", 0))
            try:
                msg = json.loads(self.rfile.read(length))
                reply = server.handle(msg)
            except json.JSONDecodeError as e:
                reply = _fatal(f"bad JSON: {e}")
            self._send(200, json.dumps(reply).encode("utf-8"))

    return ThreadingHTTPServer(("127.0.0.1", port), Handler)
