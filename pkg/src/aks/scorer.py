"""Pluggable relevance scorers: mocks, synthetic curves, and the remote
wire-protocol client for an external image-text matching sidecar.

The remote protocol (UTF-8 JSON, same messages on both transports):
  request   {"type":"score","query":"...","frames":[{"index":i,"asset":"..."}]}
  response  {"type":"scores","scores":[{"index":i,"score":x}]}
  handshake {"type":"hello","protocol":1} -> {"type":"ready","protocol":1}
            (stdio only; HTTP uses GET /healthz -> 200)
  error     {"type":"error","message":"...","fatal":bool}
"""

from __future__ import annotations

import json
import math
import shlex
import subprocess
import time
from dataclasses import dataclass

import numpy as np
import requests

from .core import FrameManifest, ScoreSeries, infer_fps

PROTOCOL_VERSION = 1


class ScorerError(RuntimeError):
    """Fatal scorer failure (bad response, exhausted retries, bad config)."""


@dataclass(frozen=True)
class PlantedInterval:
    """A ground-truth relevant moment on the candidate index axis."""

    start: int
    end: int
    peak_height: float
    shape: str = "plateau"  # or "gaussian-bump"

    def __post_init__(self):
        if self.start < 0 or self.end <= self.start:
            raise ValueError("interval must satisfy 0 <= start < end")
        if not self.peak_height > 0:
            raise ValueError("peak_height must be > 0")
        if self.shape not in ("plateau", "gaussian-bump"):
            raise ValueError(f"unknown interval shape: {self.shape!r}")


@dataclass(frozen=True)
class SyntheticSpec:
    """Deterministic synthetic score curve: baseline + bumps + seeded noise."""

    horizon: int
    planted_intervals: tuple[PlantedInterval, ...]
    noise_sigma: float = 0.0
    baseline: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(
            self, "planted_intervals", tuple(self.planted_intervals)
        )
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        prev_end = None
        for iv in self.planted_intervals:
            if iv.end > self.horizon:
                raise ValueError("interval extends past the horizon")
            if prev_end is not None and iv.start < prev_end:
                raise ValueError("intervals must be sorted and non-overlapping")
            prev_end = iv.end


@dataclass(frozen=True)
class ScorerSpec:
    """Which scorer to use. kind is one of file/constant/synthetic/remote."""

    kind: str
    path: str | None = None
    value: float | None = None
    synthetic: SyntheticSpec | None = None
    endpoint: str | None = None
    transport: str = "http"  # or "stdio-pipe"
    batch_size: int = 16
    timeout_s: float = 10.0
    max_retries: int = 3

    def __post_init__(self):
        if self.kind not in ("file", "constant", "synthetic", "remote"):
            raise ValueError(f"unknown scorer kind: {self.kind!r}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not self.timeout_s > 0:
            raise ValueError("timeout_s must be > 0")
        needs = {"file": "path", "constant": "value",
                 "synthetic": "synthetic", "remote": "endpoint"}
        if getattr(self, needs[self.kind]) is None:
            raise ValueError(f"scorer kind {self.kind!r} requires {needs[self.kind]}")
        if self.kind == "remote" and self.transport not in ("http", "stdio-pipe"):
            raise ValueError(f"unknown transport: {self.transport!r}")


def generate_synthetic(spec: SyntheticSpec) -> tuple[ScoreSeries, tuple[tuple[int, int], ...]]:
    """Build the score curve and return it with the planted ground truth.

    Noise is zero-mean gaussian from numpy's seeded default generator
    (PCG64), so identical seeds reproduce bit-identical series.
    """
    t = np.arange(spec.horizon, dtype=float)
    scores = np.full(spec.horizon, float(spec.baseline))
    for iv in spec.planted_intervals:
        if iv.shape == "plateau":
            scores[iv.start : iv.end] += iv.peak_height
        else:
            center = (iv.start + iv.end - 1) / 2.0
            sigma = max((iv.end - iv.start) / 6.0, 0.5)
            scores += iv.peak_height * np.exp(-((t - center) ** 2) / (2 * sigma**2))
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        scores = scores + rng.normal(0.0, spec.noise_sigma, spec.horizon)
    series = ScoreSeries(t, scores, native_fps=1.0)
    truth = tuple((iv.start, iv.end) for iv in spec.planted_intervals)
    return series, truth


class _HttpTransport:
    def __init__(self, endpoint: str, timeout_s: float):
        self.base = endpoint.rstrip("/")
        self.timeout_s = timeout_s
        resp = requests.get(f"{self.base}/healthz", timeout=timeout_s)
        if resp.status_code != 200:
            raise ScorerError(f"scorer healthz returned {resp.status_code}")

    def request(self, payload: dict) -> dict:
        resp = requests.post(f"{self.base}/score", json=payload, timeout=self.timeout_s)
        try:
            return resp.json()
        except ValueError as e:
            raise ScorerError(f"non-JSON scorer response: {e}") from e

    def close(self) -> None:
        pass


class _StdioTransport:
    def __init__(self, command: str, timeout_s: float):
        self.proc = subprocess.Popen(
            shlex.split(command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        self.timeout_s = timeout_s
        reply = self.request({"type": "hello", "protocol": PROTOCOL_VERSION})
        if reply.get("type") != "ready" or reply.get("protocol") != PROTOCOL_VERSION:
            raise ScorerError(f"bad handshake from stdio scorer: {reply}")

    def request(self, payload: dict) -> dict:
        assert self.proc.stdin is not None and self.proc.stdout is not None
        self.proc.stdin.write(json.dumps(payload) + "\n")
        self.proc.stdin.flush()
        line = self.proc.stdout.readline()
        if not line:
            raise ScorerError("stdio scorer closed the pipe")
        try:
            return json.loads(line)
        except json.JSONDecodeError as e:
            raise ScorerError(f"non-JSON scorer response: {e}") from e

    def close(self) -> None:
        if self.proc.stdin is not None:
            self.proc.stdin.close()
        self.proc.terminate()
        self.proc.wait(timeout=5)


def _score_batch_remote(transport, query: str, frames: list[tuple[int, str]],
                        max_retries: int) -> dict[int, float]:
    """Send one batch, retrying transient errors; validate index coverage."""
    payload = {
        "type": "score",
        "query": query,
        "frames": [{"index": i, "asset": a} for i, a in frames],
    }
    wanted = {i for i, _ in frames}
    attempts = max_retries + 1
    last_error = "no attempts made"
    for _ in range(attempts):
        try:
            reply = transport.request(payload)
        except (requests.ConnectionError, requests.Timeout) as e:
            last_error = str(e)
            time.sleep(0.01)
            continue
        if reply.get("type") == "error":
            if reply.get("fatal"):
                raise ScorerError(f"fatal scorer error: {reply.get('message')}")
            last_error = str(reply.get("message"))
            continue
        if reply.get("type") != "scores":
            raise ScorerError(f"unexpected scorer message type: {reply.get('type')!r}")
        got: dict[int, float] = {}
        for item in reply.get("scores", []):
            idx = int(item["index"])
            if idx not in wanted or idx in got:
                raise ScorerError(f"scorer returned unexpected or duplicate index {idx}")
            score = float(item["score"])
            if not math.isfinite(score):
                raise ScorerError(f"scorer returned non-finite score for frame {idx}")
            got[idx] = score
        missing = wanted - got.keys()
        if missing:
            raise ScorerError(f"scorer response missing indices {sorted(missing)}")
        return got
    raise ScorerError(f"scorer failed after {max_retries} retries: {last_error}")


def _remote_scores(manifest: FrameManifest, query: str, spec: ScorerSpec) -> np.ndarray:
    if spec.transport == "http":
        transport = _HttpTransport(spec.endpoint, spec.timeout_s)
    else:
        transport = _StdioTransport(spec.endpoint, spec.timeout_s)
    try:
        scores = np.empty(len(manifest))
        frames = list(enumerate(manifest.asset_refs))
        for start in range(0, len(frames), spec.batch_size):
            batch = frames[start : start + spec.batch_size]
            got = _score_batch_remote(transport, query, batch, spec.max_retries)
            for idx, score in got.items():
                scores[idx] = score
        return scores
    finally:
        transport.close()


def score_frames(manifest: FrameManifest, query: str, spec: ScorerSpec) -> ScoreSeries:
    """Produce one finite score per manifest frame, in manifest order."""
    if len(manifest) == 0:
        raise ScorerError("empty manifest")
    if spec.kind == "constant":
        scores = np.full(len(manifest), float(spec.value))
    elif spec.kind == "file":
        from .core import load_scores

        series = load_scores(spec.path)
        if len(series) != len(manifest):
            raise ScorerError(
                f"score file has {len(series)} entries for a "
                f"{len(manifest)}-frame manifest"
            )
        scores = np.asarray(series.scores)
    elif spec.kind == "synthetic":
        if spec.synthetic.horizon != len(manifest):
            raise ScorerError("synthetic spec horizon does not match manifest length")
        series, _ = generate_synthetic(spec.synthetic)
        scores = np.asarray(series.scores)
    else:
        scores = _remote_scores(manifest, query, spec)
    return ScoreSeries(
        manifest.timestamps_s,
        scores,
        native_fps=infer_fps(manifest.timestamps_s),
        query_id=query,
    )
