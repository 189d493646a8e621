#!/usr/bin/env python3
"""Run the L x s_thr ablation grid for the adaptive strategy on a synthetic
preset corpus and print the summary table.

Usage: python3 scripts/run_ablation_grid.py [--preset multi-moment]
       [--videos 200] [--out-dir ablation_out] [--seed 0]
"""

import argparse
from pathlib import Path

from aks.bench import BenchConfig, PRESET_CORPORA, run_grid
from aks.core import Strategy


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--preset", choices=sorted(PRESET_CORPORA), default="multi-moment")
    parser.add_argument("--videos", type=int, default=200)
    parser.add_argument("--m", type=int, default=4)
    parser.add_argument("--out-dir", default="ablation_out")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    config = BenchConfig(
        corpus=PRESET_CORPORA[args.preset](n=args.videos, seed=args.seed),
        strategies=(Strategy.ADA,),
        m_values=(args.m,),
        l_values=(1, 2, 3, 4, 5, 6),
        s_thr_values=(0.0, 0.2, 0.4, 0.6, 0.8, 1.0),
        fps_values=(1.0,),
        seed=args.seed,
        output_dir=args.out_dir,
    )
    report = run_grid(config)
    print(Path(report.summary_path).read_text())
    print(f"results: {report.results_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
