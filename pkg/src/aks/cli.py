"""Single executable for the whole pipeline: score, select, coverage,
objective, oracle, bench, plot.

Exit codes: 0 success, 1 runtime error, 2 usage error. Diagnostics go to
stderr; data goes to files or stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .core import (
    FrameManifest,
    ScoreFileError,
    SelectionParams,
    Strategy,
    load_scores,
    load_selection,
    save_scores,
    save_selection,
)
from .coverage import coverage
from .oracle import brute_force
from .scorer import ScorerError, ScorerSpec, score_frames
from .strategies import objective, select

# Defaults follow the strongest diverse-content ablation cell; the
# "concentrated" preset encodes the best concentrated-content cell.
DEFAULTS = {"strategy": "ada", "m": 64, "max_level": 5, "s_thr": 0.8, "target_fps": 1.0}
PRESETS = {
    "concentrated": {"max_level": 3, "s_thr": 0.2},
    "diverse": {"max_level": 5, "s_thr": 0.8},
}


def _load_manifest(path) -> FrameManifest:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise ScoreFileError(f"{path}: empty manifest")
    header = {}
    records = []
    for ln in lines:
        obj = json.loads(ln)
        if "index" not in obj and not records:
            header = obj
            continue
        records.append((float(obj["timestamp_s"]), str(obj["asset"])))
    return FrameManifest(
        np.array([r[0] for r in records]),
        tuple(r[1] for r in records),
        video_id=str(header.get("video_id", "")),
        width=header.get("width"),
        height=header.get("height"),
        channels=header.get("channels"),
    )


def _scorer_spec(args) -> ScorerSpec:
    if args.scorer:
        kind, _, rest = args.scorer.partition(":")
        if kind == "constant":
            return ScorerSpec(kind="constant", value=float(rest))
        if kind == "file":
            return ScorerSpec(kind="file", path=rest)
        raise ValueError(f"unknown --scorer spec {args.scorer!r} (use constant:<v> or file:<path>)")
    url = args.scorer_url or os.environ.get("AKS_SCORER_URL")
    if url:
        return ScorerSpec(kind="remote", endpoint=url, transport="http",
                          batch_size=args.batch_size, timeout_s=args.timeout,
                          max_retries=args.max_retries)
    if args.scorer_cmd:
        return ScorerSpec(kind="remote", endpoint=args.scorer_cmd, transport="stdio-pipe",
                          batch_size=args.batch_size, timeout_s=args.timeout,
                          max_retries=args.max_retries)
    raise ValueError("no scorer given: use --scorer, --scorer-url/-AKS_SCORER_URL, or --scorer-cmd")


def _add_select_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--m", type=int, default=None, help="keyframe budget M")
    p.add_argument("--max-level", type=int, default=None, help="max recursion level L")
    p.add_argument("--s-thr", type=float, default=None, help="stop-splitting threshold")
    p.add_argument("--preset", choices=sorted(PRESETS), default=None,
                   help="named L/s_thr preset (overridden by explicit flags)")


def _resolve_params(args) -> tuple[int, int, float]:
    base = dict(DEFAULTS)
    if args.preset:
        base.update(PRESETS[args.preset])
    m = args.m if args.m is not None else base["m"]
    max_level = args.max_level if args.max_level is not None else base["max_level"]
    s_thr = args.s_thr if args.s_thr is not None else base["s_thr"]
    return m, max_level, s_thr


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aks", description="adaptive keyframe sampling")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score manifest frames against a query")
    p.add_argument("--manifest", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--scorer", help="constant:<v> or file:<path>")
    p.add_argument("--scorer-url", help="HTTP scorer endpoint (or $AKS_SCORER_URL)")
    p.add_argument("--scorer-cmd", help="stdio scorer command line")
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--timeout", type=float, default=10.0)
    p.add_argument("--max-retries", type=int, default=3)
    p.add_argument("--out", required=True)

    p = sub.add_parser("select", help="select keyframes from a score file")
    p.add_argument("--scores", required=True)
    p.add_argument("--strategy", choices=("uni", "top", "bin", "ada"),
                   default=DEFAULTS["strategy"])
    _add_select_params(p)
    p.add_argument("--target-fps", type=float, default=DEFAULTS["target_fps"])
    p.add_argument("--out", required=True)

    p = sub.add_parser("coverage", help="coverage value of a selection")
    p.add_argument("--selection", required=True)
    p.add_argument("--horizon", type=int, required=True, help="T of the source series")
    p.add_argument("--max-level", type=int, required=True)

    p = sub.add_parser("objective", help="relevance + coverage objective of a selection")
    p.add_argument("--scores", required=True)
    p.add_argument("--selection", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--max-level", type=int, required=True)

    p = sub.add_parser("oracle", help="brute-force optimal selection (small T only)")
    p.add_argument("--scores", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--max-level", type=int, required=True)
    p.add_argument("--cap", type=int, default=2_000_000)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="run a benchmark grid from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None, help="override config output_dir")
    p.add_argument("--seed", type=int, default=None, help="override config seed")

    p = sub.add_parser("plot", help="emit an SVG of scores + selected frames")
    p.add_argument("--scores", required=True)
    p.add_argument("--selection", required=True)
    p.add_argument("--max-level", type=int, default=None, help="draw bin gridlines")
    p.add_argument("--out", required=True)

    return parser


def _cmd_score(args) -> int:
    manifest = _load_manifest(args.manifest)
    spec = _scorer_spec(args)
    series = score_frames(manifest, args.query, spec)
    save_scores(series, args.out)
    return 0


def _cmd_select(args) -> int:
    from .core import resample_candidates

    series = load_scores(args.scores)
    m, max_level, s_thr = _resolve_params(args)
    if args.target_fps < series.native_fps:
        series = resample_candidates(series, args.target_fps)
    params = SelectionParams(m=m, max_level=max_level, s_thr=s_thr)
    sel = select(series, Strategy(args.strategy.upper()), params)
    save_selection(sel, series, args.out)
    return 0


def _cmd_coverage(args) -> int:
    sel = load_selection(args.selection)
    value = coverage(sel, args.horizon, args.max_level)
    print(f"{value:g}")
    return 0


def _cmd_objective(args) -> int:
    series = load_scores(args.scores)
    sel = load_selection(args.selection)
    value = objective(series, sel, args.lam, args.max_level)
    print(f"{value:g}")
    return 0


def _cmd_oracle(args) -> int:
    series = load_scores(args.scores)
    sel, value = brute_force(series, args.m, args.lam, args.max_level, cap=args.cap)
    save_selection(sel, series, args.out)
    print(f"{value:g}")
    return 0


def _cmd_bench(args) -> int:
    config = bench_mod.load_bench_config(args.config)
    if args.out_dir is not None or args.seed is not None:
        from dataclasses import replace

        overrides = {}
        if args.out_dir is not None:
            overrides["output_dir"] = args.out_dir
        if args.seed is not None:
            # reseeding means regenerating any preset corpus from the config
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
            raw["seed"] = args.seed
            tmp = Path(args.config).with_suffix(".seed-override.json")
            tmp.write_text(json.dumps(raw), encoding="utf-8")
            config = bench_mod.load_bench_config(tmp)
            tmp.unlink()
        config = replace(config, **overrides)
    report = bench_mod.run_grid(config)
    print(report.results_path)
    print(report.summary_path)
    return 0


def _cmd_plot(args) -> int:
    series = load_scores(args.scores)
    sel = load_selection(args.selection)
    bench_mod.emit_plot(series, sel, args.out, max_level=args.max_level)
    return 0


_COMMANDS = {
    "score": _cmd_score,
    "select": _cmd_select,
    "coverage": _cmd_coverage,
    "objective": _cmd_objective,
    "oracle": _cmd_oracle,
    "bench": _cmd_bench,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (OSError, ValueError, ScorerError, ScoreFileError, RuntimeError) as e:
        print(f"aks {args.command}: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
