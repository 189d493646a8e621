"""Scoring backends: a deterministic no-download toy scorer and a real
image-text matching model behind the same ``score_batch`` interface.

``score_batch(query, frames)`` takes ``[(index, asset), ...]`` and returns
one finite float per frame, in input order. Asset trouble raises
``AssetError`` so the server can answer with a retryable per-request
protocol error instead of dying.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass


class AssetError(RuntimeError):
    """A frame asset could not be read or decoded."""

    def __init__(self, asset: str, reason: str):
        super().__init__(f"unreadable asset {asset!r}: {reason}")
        self.asset = asset


@dataclass(frozen=True)
class SidecarConfig:
    """How to run the sidecar: which matcher, where, and on what transport."""

    model_id: str = "openai/clip-vit-base-patch32"
    device: str = "cpu"
    transport: str = "stdio"  # or "http"
    port: int = 8041
    batch_size: int = 8
    toy: bool = False

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.transport not in ("stdio", "http"):
            raise ValueError(f"unknown transport: {self.transport!r}")


class ToyScorer:
    """Deterministic pseudo-scores in [0, 1) from a hash of (query, asset).

    No file IO, no model download: assets are treated as opaque strings, so
    the protocol and its clients can be exercised in CI with made-up
    locators. Same (query, asset) always gives the same score.
    """

    def score_batch(self, query: str, frames: list[tuple[int, str]]) -> list[float]:
        out = []
        for _, asset in frames:
            digest = hashlib.sha256(f"{query}\x00{asset}".encode("utf-8")).digest()
            out.append(int.from_bytes(digest[:4], "big") / 2**32)
        return out


def load_image(asset: str):
    """Open an asset locator as an RGB PIL image or raise AssetError."""
    try:
        from PIL import Image, UnidentifiedImageError
    except ImportError as e:  # pragma: no cover - model extra not installed
        raise AssetError(asset, f"pillow not installed: {e}") from e
    try:
        with Image.open(asset) as img:
            return img.convert("RGB")
    except FileNotFoundError as e:
        raise AssetError(asset, "no such file") from e
    except (OSError, UnidentifiedImageError, ValueError) as e:
        raise AssetError(asset, str(e)) from e


class ModelScorer:
    """Image-text matching scores from a pretrained CLIP-style model.

    Heavy imports happen here, at construction, so toy mode never touches
    torch/transformers. Construction failure (missing weights, bad model
    id) propagates: the CLI turns it into a nonzero startup exit.
    """

    def __init__(self, model_id: str, device: str = "cpu", batch_size: int = 8):
        import torch  # noqa: F401  (kept on self for score_batch)
        from transformers import AutoModel, AutoProcessor

        self._torch = torch
        self.device = device
        self.batch_size = batch_size
        self.model = AutoModel.from_pretrained(model_id).to(device).eval()
        self.processor = AutoProcessor.from_pretrained(model_id)

    def score_batch(self, query: str, frames: list[tuple[int, str]]) -> list[float]:
        images = [load_image(asset) for _, asset in frames]
        scores: list[float] = []
        for start in range(0, len(images), self.batch_size):
            chunk = images[start : start + self.batch_size]
            inputs = self.processor(
                text=[query], images=chunk, return_tensors="pt", padding=True
            ).to(self.device)
            with self._torch.no_grad():
                logits = self.model(**inputs).logits_per_image[:, 0]
            scores.extend(float(v) for v in logits)
        return scores
