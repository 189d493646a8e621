"""Core domain types, score-series I/O, and candidate resampling."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np


class ScoreFileError(ValueError):
    """Malformed or unreadable score/selection/manifest file."""


class Strategy(str, Enum):
    UNI = "UNI"
    TOP = "TOP"
    BIN = "BIN"
    ADA = "ADA"
    ORACLE = "ORACLE"


def _readonly(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ScoreSeries:
    """Ordered per-candidate-frame relevance scores with timestamps.

    Frame indices are implicit: entry ``i`` is frame ``i``, 0-based and
    contiguous. ``native_fps`` is the candidate sampling rate.
    """

    timestamps_s: np.ndarray
    scores: np.ndarray
    native_fps: float
    query_id: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "timestamps_s", _readonly(self.timestamps_s))
        object.__setattr__(self, "scores", _readonly(self.scores))
        t, s = self.timestamps_s, self.scores
        if t.ndim != 1 or s.ndim != 1 or len(t) != len(s):
            raise ValueError("timestamps and scores must be 1-d and equal length")
        if len(s) < 1:
            raise ValueError("score series must contain at least one entry")
        if not np.all(np.isfinite(s)):
            raise ValueError("all scores must be finite")
        if not np.all(np.isfinite(t)):
            raise ValueError("all timestamps must be finite")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("timestamps must be strictly increasing")
        if not (math.isfinite(self.native_fps) and self.native_fps > 0):
            raise ValueError("native_fps must be positive and finite")

    def __len__(self) -> int:
        return len(self.scores)

    @property
    def horizon(self) -> int:
        """T: number of candidate frames."""
        return len(self.scores)


@dataclass(frozen=True)
class SelectionParams:
    """Knobs of the selection objective and the adaptive splitter.

    m: keyframe budget. max_level: maximum recursion depth L of the bin
    hierarchy. s_thr: stop-splitting threshold on the top-vs-all score gap.
    lam: relevance/coverage balance, used only when evaluating the objective.
    """

    m: int
    max_level: int = 0
    s_thr: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.max_level < 0:
            raise ValueError("max_level must be >= 0")
        if not (math.isfinite(self.s_thr) and self.s_thr >= 0):
            raise ValueError("s_thr must be >= 0 and finite")
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ValueError("lam must be >= 0 and finite")
        limit = math.ceil(math.log2(self.m)) if self.m > 1 else 0
        if self.max_level > limit:
            warnings.warn(
                f"max_level={self.max_level} exceeds ceil(log2(m))={limit}; "
                "deep levels add bins with no frames to balance",
                stacklevel=2,
            )


@dataclass(frozen=True)
class KeyframeSelection:
    """The selected index set plus provenance."""

    indices: tuple[int, ...]
    strategy: Strategy
    params: SelectionParams
    source_series_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        idx = self.indices
        if any(i < 0 for i in idx):
            raise ValueError("indices must be non-negative")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be strictly increasing (no duplicates)")

    def validate_for(self, horizon: int) -> None:
        if self.indices and self.indices[-1] >= horizon:
            raise ValueError(
                f"selection index {self.indices[-1]} out of range for T={horizon}"
            )


@dataclass(frozen=True)
class FrameManifest:
    """Mapping from candidate timestamps to opaque frame assets."""

    timestamps_s: np.ndarray
    asset_refs: tuple[str, ...]
    video_id: str = ""
    width: int | None = None
    height: int | None = None
    channels: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "timestamps_s", _readonly(self.timestamps_s))
        object.__setattr__(self, "asset_refs", tuple(str(a) for a in self.asset_refs))
        t = self.timestamps_s
        if len(t) != len(self.asset_refs):
            raise ValueError("timestamps and asset_refs must have equal length")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.asset_refs)


def infer_fps(timestamps_s: np.ndarray) -> float:
    """Candidate rate from median timestamp spacing (tolerates a dropped frame)."""
    t = np.asarray(timestamps_s, dtype=float)
    if len(t) < 2:
        return 1.0
    spacing = float(np.median(np.diff(t)))
    if spacing <= 0:
        raise ValueError("cannot infer fps from non-increasing timestamps")
    return 1.0 / spacing


_REQUIRED_FIELDS = ("index", "timestamp_s", "score")


def _validate_records(records, path) -> None:
    """records: list of (lineno, index, timestamp_s, score)."""
    if not records:
        raise ScoreFileError(f"{path}: empty score file")
    for pos, (lineno, idx, ts, sc) in enumerate(records):
        if idx != pos:
            raise ScoreFileError(
                f"{path}: line {lineno}: expected index {pos}, got {idx} "
                "(indices must be contiguous from 0)"
            )
        if not math.isfinite(sc):
            raise ScoreFileError(f"{path}: line {lineno}: non-finite score")
        if not math.isfinite(ts):
            raise ScoreFileError(f"{path}: line {lineno}: non-finite timestamp")
        if pos > 0 and ts <= records[pos - 1][2]:
            raise ScoreFileError(
                f"{path}: line {lineno}: timestamps must be strictly increasing"
            )


def _detect_format(path: Path, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in ("jsonl", "csv"):
            raise ValueError(f"unknown score file format: {fmt!r}")
        return fmt
    return "csv" if path.suffix.lower() == ".csv" else "jsonl"


def load_scores(path, fmt: str | None = None) -> ScoreSeries:
    """Load a ScoreSeries from a line-delimited JSON or CSV file.

    JSONL: one record per line with fields index/timestamp_s/score; an
    optional first line without "index" is a header carrying native_fps and
    query_id. CSV: header row ``index,timestamp_s,score``; an optional
    leading ``# key=value ...`` comment carries native_fps/query_id.
    """
    path = Path(path)
    fmt = _detect_format(path, fmt)
    text = path.read_text(encoding="utf-8")
    header: dict = {}
    records: list[tuple[int, int, float, float]] = []

    if fmt == "jsonl":
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ScoreFileError(f"{path}: line {lineno}: malformed record: {e}") from e
            if not isinstance(obj, dict):
                raise ScoreFileError(f"{path}: line {lineno}: malformed record")
            if "index" not in obj and not records and not header:
                header = obj
                continue
            try:
                records.append(
                    (lineno, int(obj["index"]), float(obj["timestamp_s"]), float(obj["score"]))
                )
            except (KeyError, TypeError, ValueError) as e:
                raise ScoreFileError(f"{path}: line {lineno}: malformed record: {e}") from e
    else:
        lines = text.splitlines()
        lineno = 0
        it = iter(enumerate(lines, start=1))
        header_row = None
        for lineno, line in it:
            if not line.strip():
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        header[k] = v
                continue
            header_row = line
            break
        if header_row is None:
            raise ScoreFileError(f"{path}: empty score file")
        if [c.strip() for c in header_row.split(",")] != list(_REQUIRED_FIELDS):
            raise ScoreFileError(
                f"{path}: line {lineno}: expected header 'index,timestamp_s,score'"
            )
        for lineno, line in it:
            if not line.strip():
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ScoreFileError(f"{path}: line {lineno}: malformed record")
            try:
                records.append((lineno, int(parts[0]), float(parts[1]), float(parts[2])))
            except ValueError as e:
                raise ScoreFileError(f"{path}: line {lineno}: malformed record: {e}") from e

    _validate_records(records, path)
    timestamps = np.array([r[2] for r in records])
    scores = np.array([r[3] for r in records])
    if "native_fps" in header:
        native_fps = float(header["native_fps"])
    else:
        native_fps = infer_fps(timestamps)
    query_id = header.get("query_id")
    return ScoreSeries(timestamps, scores, native_fps, query_id)


def save_scores(series: ScoreSeries, path, fmt: str | None = None) -> None:
    """Write a ScoreSeries; load_scores on the result reproduces it exactly."""
    path = Path(path)
    fmt = _detect_format(path, fmt)
    lines = []
    if fmt == "jsonl":
        header = {"native_fps": series.native_fps}
        if series.query_id is not None:
            header["query_id"] = series.query_id
        lines.append(json.dumps(header))
        for i in range(len(series)):
            lines.append(
                json.dumps(
                    {
                        "index": i,
                        "timestamp_s": float(series.timestamps_s[i]),
                        "score": float(series.scores[i]),
                    }
                )
            )
    else:
        # the comment line is only needed when the plain table would lose info
        if series.query_id is not None or series.native_fps != infer_fps(series.timestamps_s):
            tokens = [f"native_fps={series.native_fps!r}"]
            if series.query_id is not None:
                tokens.append(f"query_id={series.query_id}")
            lines.append("# " + " ".join(tokens))
        lines.append("index,timestamp_s,score")
        for i in range(len(series)):
            lines.append(f"{i},{float(series.timestamps_s[i])!r},{float(series.scores[i])!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def resample_candidates(series: ScoreSeries, target_fps: float) -> ScoreSeries:
    """Decimate candidates to roughly target_fps, anchored at index 0.

    Keeps every k-th entry with k = max(1, round(native_fps / target_fps)).
    Output is re-indexed contiguously; original timestamps are preserved.
    """
    if not (math.isfinite(target_fps) and target_fps > 0):
        raise ValueError("target_fps must be positive and finite")
    if target_fps >= series.native_fps:
        warnings.warn(
            f"target_fps={target_fps} >= native_fps={series.native_fps}; "
            "returning series unchanged",
            stacklevel=2,
        )
        return series
    k = resample_stride(series.native_fps, target_fps)
    if k == 1:
        return series
    return ScoreSeries(
        series.timestamps_s[::k],
        series.scores[::k],
        series.native_fps / k,
        series.query_id,
    )


def save_selection(selection: KeyframeSelection, series: ScoreSeries, path) -> None:
    """Write a selection file: one header line with strategy and params,
    then one JSON record (index, timestamp_s, score) per selected frame."""
    selection.validate_for(series.horizon)
    p = selection.params
    header = {
        "strategy": selection.strategy.value,
        "m": p.m,
        "max_level": p.max_level,
        "s_thr": p.s_thr,
        "lambda": p.lam,
        "source_series_id": selection.source_series_id,
    }
    lines = [json.dumps(header)]
    for i in selection.indices:
        lines.append(
            json.dumps(
                {
                    "index": i,
                    "timestamp_s": float(series.timestamps_s[i]),
                    "score": float(series.scores[i]),
                }
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_selection(path) -> KeyframeSelection:
    path = Path(path)
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise ScoreFileError(f"{path}: empty selection file")
    try:
        header = json.loads(lines[0])
        params = SelectionParams(
            m=int(header["m"]),
            max_level=int(header["max_level"]),
            s_thr=float(header["s_thr"]),
            lam=float(header["lambda"]),
        )
        strategy = Strategy(header["strategy"])
        indices = tuple(int(json.loads(ln)["index"]) for ln in lines[1:])
    except (KeyError, ValueError, TypeError) as e:
        raise ScoreFileError(f"{path}: malformed selection file: {e}") from e
    return KeyframeSelection(indices, strategy, params, header.get("source_series_id", ""))


def resample_stride(native_fps: float, target_fps: float) -> int:
    """The decimation stride used by resample_candidates (half rounds up)."""
    if target_fps >= native_fps:
        return 1
    return max(1, int(math.floor(native_fps / target_fps + 0.5)))
