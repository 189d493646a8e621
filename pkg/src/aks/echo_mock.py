"""In-repo mock scorer speaking the wire protocol on both transports.

Scoring rule: if the asset locator parses as a float, the score is that
value / 10 (so a manifest whose assets carry timestamps gets timestamp/10);
otherwise a deterministic hash of the asset in [0, 1).

``--fail-every N`` makes every Nth score request answer with a retryable
error, for exercising client retry paths.

Run: python -m aks.echo_mock [--transport stdio|http] [--port P] [--fail-every N]
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

PROTOCOL_VERSION = 1


def echo_score(index: int, asset: str) -> float:
    try:
        return float(asset) / 10.0
    except ValueError:
        digest = hashlib.sha256(asset.encode("utf-8")).digest()
        return int.from_bytes(digest[:4], "big") / 2**32


class MockScorerState:
    """Shared request counter and failure-injection policy."""

    def __init__(self, fail_every: int = 0):
        self.fail_every = fail_every
        self.request_count = 0

    def handle(self, msg: dict) -> dict:
        if msg.get("type") == "hello":
            return {"type": "ready", "protocol": PROTOCOL_VERSION}
        if msg.get("type") != "score":
            return {"type": "error", "message": f"unknown message type {msg.get('type')!r}", "fatal": True}
        self.request_count += 1
        if self.fail_every and self.request_count % self.fail_every == 0:
            return {"type": "error", "message": "injected transient failure", "fatal": False}
        scores = [
            {"index": f["index"], "score": echo_score(int(f["index"]), str(f["asset"]))}
            for f in msg.get("frames", [])
        ]
        return {"type": "scores", "scores": scores}


def serve_stdio(state: MockScorerState, stdin=None, stdout=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    for line in stdin:
        if not line.strip():
            continue
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as e:
            reply = {"type": "error", "message": f"bad JSON: {e}", "fatal": True}
        else:
            reply = state.handle(msg)
        stdout.write(json.dumps(reply) + "\n")
        stdout.flush()


def make_http_server(state: MockScorerState, port: int = 0) -> ThreadingHTTPServer:
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):  # keep test output quiet
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
                reply = state.handle(msg)
            except json.JSONDecodeError as e:
                reply = {"type": "error", "message": f"bad JSON: {e}", "fatal": True}
            self._send(200, json.dumps(reply).encode("utf-8"))

    return ThreadingHTTPServer(("127.0.0.1", port), Handler)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="protocol-conformant mock scorer")
    parser.add_argument("--transport", choices=("stdio", "http"), default="stdio")
    parser.add_argument("--port", type=int, default=8040)
    parser.add_argument("--fail-every", type=int, default=0)
    args = parser.parse_args(argv)
    state = MockScorerState(fail_every=args.fail_every)
    if args.transport == "stdio":
        serve_stdio(state)
    else:
        server = make_http_server(state, args.port)
        print(f"mock scorer listening on {server.server_address[1]}", file=sys.stderr)
        server.serve_forever()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
