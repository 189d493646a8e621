"""Synthetic benchmark harness: strategy/fps/L x s_thr grids, recall against
planted ground truth, and score-curve plot emission.

Cells hold recall/coverage/objective on synthetic corpora; QA accuracy is
out of scope (it needs an MLLM and real video benchmarks).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    KeyframeSelection,
    ScoreSeries,
    SelectionParams,
    Strategy,
    load_scores,
    resample_candidates,
    resample_stride,
)
from .coverage import coverage
from .scorer import PlantedInterval, SyntheticSpec, generate_synthetic
from .strategies import objective, select

RESULT_COLUMNS = ("video", "strategy", "M", "L", "s_thr", "fps", "recall", "coverage", "objective")


def keyframe_recall(selection, truth) -> float:
    """Fraction of ground-truth intervals containing >= 1 selected index."""
    truth = [(int(s), int(e)) for s, e in truth]
    if not truth:
        raise ValueError("truth must be non-empty")
    for s, e in truth:
        if e <= s:
            raise ValueError(f"invalid truth interval [{s}, {e})")
    indices = selection.indices if isinstance(selection, KeyframeSelection) else selection
    idx = sorted(int(i) for i in indices)
    hits = 0
    for s, e in truth:
        lo = np.searchsorted(idx, s, side="left")
        if lo < len(idx) and idx[lo] < e:
            hits += 1
    return hits / len(truth)


def single_moment_corpus(n: int = 100, seed: int = 0, horizon: int = 256) -> tuple[SyntheticSpec, ...]:
    """One 12-frame moment per video, split into 4 adjacent true intervals.

    Scores concentrate in the moment, so top-score selection covers all of
    it while per-bin champions spend most of the budget elsewhere.
    """
    rng = np.random.default_rng(seed)
    specs = []
    for _ in range(n):
        start = int(rng.integers(0, horizon - 12))
        intervals = tuple(
            PlantedInterval(start + 3 * j, start + 3 * (j + 1),
                            float(0.8 + rng.uniform(-0.05, 0.05)), "plateau")
            for j in range(4)
        )
        specs.append(
            SyntheticSpec(horizon, intervals, noise_sigma=0.05, baseline=0.1,
                          seed=int(rng.integers(2**31)))
        )
    return tuple(specs)


def multi_moment_corpus(n: int = 100, seed: int = 0, horizon: int = 256) -> tuple[SyntheticSpec, ...]:
    """Six well-separated moments of varying height per video.

    Top-score selection piles onto the tallest moment; binned selection
    spreads over the axis and hits many moments.
    """
    rng = np.random.default_rng(seed)
    slot_starts = np.arange(0, horizon - 8, 16)
    specs = []
    for _ in range(n):
        starts = sorted(rng.choice(slot_starts, size=6, replace=False).tolist())
        intervals = tuple(
            PlantedInterval(int(s), int(s) + 8, float(0.2 + rng.uniform(0, 0.1)), "plateau")
            for s in starts
        )
        specs.append(
            SyntheticSpec(horizon, intervals, noise_sigma=0.05, baseline=0.1,
                          seed=int(rng.integers(2**31)))
        )
    return tuple(specs)


PRESET_CORPORA = {
    "single-moment": single_moment_corpus,
    "multi-moment": multi_moment_corpus,
}


@dataclass(frozen=True)
class BenchConfig:
    """Grid axes and corpus for one benchmark run."""

    corpus: tuple[SyntheticSpec, ...] = ()
    corpus_files: tuple[tuple[str, str], ...] = ()  # (scores_path, truth_path)
    strategies: tuple[Strategy, ...] = (Strategy.TOP, Strategy.BIN, Strategy.ADA)
    m_values: tuple[int, ...] = (4,)
    l_values: tuple[int, ...] = (2,)
    s_thr_values: tuple[float, ...] = (0.5,)
    fps_values: tuple[float, ...] = (1.0,)
    seed: int = 0
    lam: float = 1.0
    output_dir: str = "bench_out"

    def validate(self) -> None:
        if not (self.corpus or self.corpus_files):
            raise ValueError("corpus must be non-empty")
        for name, axis in (
            ("strategies", self.strategies),
            ("m_values", self.m_values),
            ("l_values", self.l_values),
            ("s_thr_values", self.s_thr_values),
            ("fps_values", self.fps_values),
        ):
            if not axis:
                raise ValueError(f"{name} must be non-empty")
        if any(l < 1 for l in self.l_values):
            raise ValueError("grid L values must be >= 1")


def load_bench_config(path) -> BenchConfig:
    """Read a JSON config file; see README for the documented keys."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    seed = int(raw.get("seed", 0))
    corpus: tuple[SyntheticSpec, ...] = ()
    if "preset" in raw:
        maker = PRESET_CORPORA.get(raw["preset"])
        if maker is None:
            raise ValueError(f"unknown corpus preset: {raw['preset']!r}")
        corpus = maker(n=int(raw.get("videos", 100)), seed=seed)
    elif "corpus" in raw:
        specs = []
        for entry in raw["corpus"]:
            intervals = tuple(
                PlantedInterval(int(iv["start"]), int(iv["end"]),
                                float(iv["peak_height"]), iv.get("shape", "plateau"))
                for iv in entry["planted_intervals"]
            )
            specs.append(
                SyntheticSpec(
                    int(entry["T"]), intervals,
                    noise_sigma=float(entry.get("noise_sigma", 0.0)),
                    baseline=float(entry.get("baseline", 0.0)),
                    seed=int(entry.get("seed", 0)),
                )
            )
        corpus = tuple(specs)
    corpus_files = tuple(
        (str(e["scores"]), str(e["truth"])) for e in raw.get("corpus_files", [])
    )
    return BenchConfig(
        corpus=corpus,
        corpus_files=corpus_files,
        strategies=tuple(Strategy(s.upper()) for s in raw.get("strategies", ["TOP", "BIN", "ADA"])),
        m_values=tuple(int(v) for v in raw.get("m", [4])),
        l_values=tuple(int(v) for v in raw.get("max_level", [2])),
        s_thr_values=tuple(float(v) for v in raw.get("s_thr", [0.5])),
        fps_values=tuple(float(v) for v in raw.get("target_fps", [1.0])),
        seed=seed,
        lam=float(raw.get("lambda", 1.0)),
        output_dir=str(raw.get("output_dir", "bench_out")),
    )


@dataclass(frozen=True)
class GridRow:
    video: str
    strategy: str
    m: int
    max_level: int
    s_thr: float
    fps: float
    recall: float
    coverage: float
    objective: float


@dataclass(frozen=True)
class GridReport:
    rows: tuple[GridRow, ...]
    results_path: str
    summary_path: str


def _load_corpus(config: BenchConfig):
    """Yield (video_name, series, truth_intervals)."""
    videos = []
    for i, spec in enumerate(config.corpus):
        series, truth = generate_synthetic(spec)
        videos.append((f"v{i:03d}", series, truth))
    offset = len(config.corpus)
    for j, (scores_path, truth_path) in enumerate(config.corpus_files):
        series = load_scores(scores_path)
        truth = tuple(
            (int(s), int(e))
            for s, e in json.loads(Path(truth_path).read_text(encoding="utf-8"))
        )
        videos.append((f"v{offset + j:03d}", series, truth))
    return videos


def run_grid(config: BenchConfig) -> GridReport:
    """Run every (video, strategy, M, L, s_thr, fps) cell and write reports.

    Deterministic given the config: cells are evaluated in a fixed order and
    all randomness comes from the per-video synthetic seeds.
    """
    config.validate()
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    videos = _load_corpus(config)
    rows: list[GridRow] = []
    for name, base_series, truth in videos:
        for strategy in config.strategies:
            for m in config.m_values:
                for max_level in config.l_values:
                    for s_thr in config.s_thr_values:
                        for fps in config.fps_values:
                            try:
                                rows.append(
                                    _run_cell(name, base_series, truth, strategy,
                                              m, max_level, s_thr, fps, config.lam)
                                )
                            except Exception as e:
                                raise RuntimeError(
                                    f"grid cell failed: video={name} strategy={strategy.value} "
                                    f"M={m} L={max_level} s_thr={s_thr} fps={fps}: {e}"
                                ) from e
    results_path = out_dir / "results.csv"
    summary_path = out_dir / "summary.txt"
    _write_results(rows, results_path)
    _write_summary(rows, summary_path)
    return GridReport(tuple(rows), str(results_path), str(summary_path))


def _run_cell(name, base_series, truth, strategy, m, max_level, s_thr, fps, lam) -> GridRow:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        series = resample_candidates(base_series, fps)
        stride = resample_stride(base_series.native_fps, fps)
        params = SelectionParams(m=m, max_level=max_level, s_thr=s_thr)
        sel = select(series, strategy, params)
    original_indices = [i * stride for i in sel.indices]
    rec = keyframe_recall(original_indices, truth)
    cov = coverage(sel, series.horizon, max_level)
    obj = objective(series, sel, lam, max_level)
    return GridRow(name, strategy.value, m, max_level, s_thr, fps, rec, cov, obj)


def _write_results(rows: list[GridRow], path: Path) -> None:
    lines = [",".join(RESULT_COLUMNS)]
    for r in rows:
        lines.append(
            f"{r.video},{r.strategy},{r.m},{r.max_level},{r.s_thr:g},{r.fps:g},"
            f"{r.recall:.6f},{r.coverage:.6f},{r.objective:.6f}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_summary(rows: list[GridRow], path: Path) -> None:
    groups: dict[tuple, list[GridRow]] = {}
    for r in rows:
        groups.setdefault((r.strategy, r.m, r.max_level, r.s_thr, r.fps), []).append(r)
    header = f"{'strategy':>8} {'M':>4} {'L':>3} {'s_thr':>7} {'fps':>6} {'recall':>8} {'coverage':>10} {'objective':>10} {'cells':>6}"
    lines = [header, "-" * len(header)]
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[2], k[3], k[4])):
        cells = groups[key]
        strategy, m, max_level, s_thr, fps = key
        mean = lambda f: sum(f(c) for c in cells) / len(cells)
        lines.append(
            f"{strategy:>8} {m:>4} {max_level:>3} {s_thr:>7g} {fps:>6g} "
            f"{mean(lambda c: c.recall):>8.4f} {mean(lambda c: c.coverage):>10.4f} "
            f"{mean(lambda c: c.objective):>10.4f} {len(cells):>6}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def emit_plot(series: ScoreSeries, selection: KeyframeSelection, path,
              max_level: int | None = None) -> None:
    """Write a deterministic SVG: score polyline, one marker per selected
    frame, and bin-boundary gridlines when max_level is given."""
    selection.validate_for(series.horizon)
    width, height = 860.0, 320.0
    ml, mr, mt, mb = 50.0, 20.0, 20.0, 30.0
    plot_w, plot_h = width - ml - mr, height - mt - mb
    horizon = series.horizon
    scores = series.scores
    lo = float(scores.min())
    hi = float(scores.max())
    if hi == lo:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad

    def x(i: float) -> float:
        return ml + (plot_w * i / max(horizon - 1, 1))

    def y(v: float) -> float:
        return mt + plot_h * (1.0 - (v - lo) / (hi - lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect x="0" y="0" width="{width:.0f}" height="{height:.0f}" fill="white"/>',
    ]
    if max_level is not None and max_level >= 1:
        from .coverage import build_bin_tree

        for blo, bhi in build_bin_tree(horizon, max_level).levels[max_level]:
            if blo in (0, horizon):
                continue
            gx = x(blo - 0.5)
            parts.append(
                f'<line x1="{gx:.2f}" y1="{mt:.2f}" x2="{gx:.2f}" y2="{mt + plot_h:.2f}" '
                'stroke="#cccccc" stroke-width="1" stroke-dasharray="4 3"/>'
            )
    points = " ".join(f"{x(i):.2f},{y(float(scores[i])):.2f}" for i in range(horizon))
    parts.append(
        f'<polyline points="{points}" fill="none" stroke="#1f5fbf" stroke-width="1.5"/>'
    )
    for i in selection.indices:
        parts.append(
            f'<circle cx="{x(i):.2f}" cy="{y(float(scores[i])):.2f}" r="4" '
            'fill="#d62728" stroke="black" stroke-width="0.5"/>'
        )
    parts.append(
        f'<line x1="{ml:.2f}" y1="{mt + plot_h:.2f}" x2="{ml + plot_w:.2f}" '
        f'y2="{mt + plot_h:.2f}" stroke="black" stroke-width="1"/>'
    )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
