#!/usr/bin/env python3
"""Compare UNI/TOP/BIN/ADA recall on the two synthetic regime corpora and
emit one example score-curve plot per strategy.

Usage: python3 scripts/compare_strategies.py [--videos 100] [--out-dir compare_out]
"""

import argparse
from pathlib import Path

from aks.bench import BenchConfig, emit_plot, run_grid, single_moment_corpus, multi_moment_corpus
from aks.core import SelectionParams, Strategy
from aks.scorer import generate_synthetic
from aks.strategies import select


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--videos", type=int, default=100)
    parser.add_argument("--out-dir", default="compare_out")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    out_dir = Path(args.out_dir)

    strategies = (Strategy.UNI, Strategy.TOP, Strategy.BIN, Strategy.ADA)
    for name, corpus in (
        ("single-moment", single_moment_corpus(args.videos, seed=args.seed)),
        ("multi-moment", multi_moment_corpus(args.videos, seed=args.seed + 1)),
    ):
        config = BenchConfig(
            corpus=corpus,
            strategies=strategies,
            m_values=(4,),
            l_values=(2,),
            s_thr_values=(0.5,),
            output_dir=str(out_dir / name),
        )
        report = run_grid(config)
        print(f"== {name} (mean recall over {args.videos} videos) ==")
        for strategy in strategies:
            cells = [r.recall for r in report.rows if r.strategy == strategy.value]
            print(f"  {strategy.value:>4}: {sum(cells) / len(cells):.3f}")

        series, _ = generate_synthetic(corpus[0])
        for strategy in strategies:
            sel = select(series, strategy, SelectionParams(m=4, max_level=2, s_thr=0.5))
            plot_path = out_dir / name / f"example_{strategy.value.lower()}.svg"
            emit_plot(series, sel, plot_path, max_level=2)
        print(f"  example plots in {out_dir / name}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
