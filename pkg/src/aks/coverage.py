"""Coverage of a selected index set over the recursive bin hierarchy.

The time axis [0, T) is halved recursively; at each level every sibling
pair contributes |m_left - m_right| to a penalty, and coverage is the
negated penalty sum so that the selection objective is a pure maximization.
Also provides the pair-count homogeneity diagnostic that motivates the
binned approximation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import KeyframeSelection


@dataclass(frozen=True)
class BinTree:
    """Recursive center-split partition of [0, T) down to max_level.

    levels[l] holds the 2^l half-open (lo, hi) ranges of level l, in
    left-to-right order. Odd-length ranges give the smaller half to the
    left child; ranges may become empty (lo == hi) below length 1.
    """

    horizon: int
    max_level: int
    levels: tuple[tuple[tuple[int, int], ...], ...]

    def nonempty_bins(self, level: int) -> list[tuple[int, int]]:
        return [(lo, hi) for lo, hi in self.levels[level] if hi > lo]


def build_bin_tree(horizon: int, max_level: int) -> BinTree:
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if max_level < 0:
        raise ValueError("max_level must be >= 0")
    level: list[tuple[int, int]] = [(0, horizon)]
    levels = [tuple(level)]
    for _ in range(max_level):
        nxt: list[tuple[int, int]] = []
        for lo, hi in level:
            mid = lo + (hi - lo) // 2
            nxt.append((lo, mid))
            nxt.append((mid, hi))
        level = nxt
        levels.append(tuple(level))
    return BinTree(horizon, max_level, tuple(levels))


@lru_cache(maxsize=4096)
def _level_edges(horizon: int, max_level: int) -> tuple[np.ndarray, ...]:
    """Per-level bin edge arrays [lo_0, lo_1, ..., T] for fast counting."""
    tree = build_bin_tree(horizon, max_level)
    out = []
    for level in tree.levels:
        edges = np.array([lo for lo, _ in level] + [horizon], dtype=np.int64)
        out.append(edges)
    return tuple(out)


def _indices(selection) -> np.ndarray:
    if isinstance(selection, KeyframeSelection):
        return np.asarray(selection.indices, dtype=np.int64)
    return np.asarray(sorted(int(i) for i in selection), dtype=np.int64)


def bin_counts(selection, tree: BinTree, level: int) -> list[int]:
    """Count selected indices per level-`level` bin, left to right."""
    if not (1 <= level <= tree.max_level):
        raise ValueError(f"level must be in [1, {tree.max_level}], got {level}")
    idx = _indices(selection)
    if idx.size and (idx[0] < 0 or idx[-1] >= tree.horizon):
        raise ValueError("selection index out of range for the bin tree horizon")
    edges = _level_edges(tree.horizon, tree.max_level)[level]
    positions = np.searchsorted(idx, edges, side="left")
    return np.diff(positions).tolist()


def coverage(selection, horizon: int, max_level: int) -> float:
    """c(I): negated sum over levels 1..L of sibling-pair count imbalances.

    Always <= 0; equals 0 iff every sibling pair is balanced at every level.
    """
    if max_level < 1:
        raise ValueError("max_level must be >= 1")
    idx = _indices(selection)
    if idx.size and (idx[0] < 0 or idx[-1] >= horizon):
        raise ValueError(f"selection index out of range for T={horizon}")
    edges = _level_edges(horizon, max_level)
    penalty = 0
    for level in range(1, max_level + 1):
        counts = np.diff(np.searchsorted(idx, edges[level], side="left"))
        penalty += int(np.abs(counts[0::2] - counts[1::2]).sum())
    return -float(penalty)


def ripley_k(selection, r: float) -> int:
    """Count of unordered index pairs closer than r (diagnostic only)."""
    if not r > 0:
        raise ValueError("r must be > 0")
    idx = _indices(selection)
    if idx.size < 2:
        return 0
    # for each i, pairs (i, j) with j > i and idx[j] < idx[i] + r
    upper = np.searchsorted(idx, idx + r, side="left")
    return int((upper - np.arange(1, idx.size + 1)).sum())
