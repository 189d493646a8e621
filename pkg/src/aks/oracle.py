"""Brute-force subset optimizers used to verify the strategies.

These enumerate every size-m subset on small instances and are the
ground-truth side of every strategy-vs-optimum check; they must stay
independent of the strategy implementations.
"""

from __future__ import annotations

from itertools import combinations
from math import comb

from .core import KeyframeSelection, ScoreSeries, SelectionParams, Strategy
from .coverage import coverage
from .strategies import objective_value

DEFAULT_ENUMERATION_CAP = 2_000_000


class EnumerationCapExceeded(ValueError):
    """The instance has more subsets than the configured cap allows."""


def _check_cap(horizon: int, m: int, cap: int) -> None:
    n = comb(horizon, m)
    if n > cap:
        raise EnumerationCapExceeded(
            f"C({horizon},{m}) = {n} subsets exceeds the enumeration cap {cap}"
        )


def brute_force(
    series: ScoreSeries,
    m: int,
    lam: float,
    max_level: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> tuple[KeyframeSelection, float]:
    """Exhaustively maximize the relevance + coverage objective.

    Ties go to the lexicographically smallest index sequence, so results
    are canonical regardless of evaluation order.
    """
    horizon = series.horizon
    budget = min(m, horizon)
    _check_cap(horizon, budget, cap)
    scores = series.scores
    best_idx: tuple[int, ...] | None = None
    best_val = float("-inf")
    for subset in combinations(range(horizon), budget):
        val = objective_value(scores, subset, lam, max_level)
        if val > best_val:  # combinations yields lex order; strict keeps smallest
            best_val = val
            best_idx = subset
    assert best_idx is not None
    params = SelectionParams(m=m, max_level=max_level, lam=lam)
    sel = KeyframeSelection(best_idx, Strategy.ORACLE, params, series.query_id or "")
    return sel, best_val


def lexicographic(
    series: ScoreSeries,
    m: int,
    max_level: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> KeyframeSelection:
    """The coverage-first limit: maximize coverage, then score sum.

    Among all size-m subsets, first maximize c(I); among those, maximize
    the score sum; ties to the lexicographically smallest sequence.
    """
    horizon = series.horizon
    budget = min(m, horizon)
    _check_cap(horizon, budget, cap)
    scores = series.scores
    best_idx: tuple[int, ...] | None = None
    best_key: tuple[float, float] | None = None
    for subset in combinations(range(horizon), budget):
        key = (
            coverage(subset, horizon, max_level),
            float(scores[list(subset)].sum()),
        )
        if best_key is None or key > best_key:
            best_key = key
            best_idx = subset
    assert best_idx is not None
    params = SelectionParams(m=m, max_level=max_level)
    return KeyframeSelection(best_idx, Strategy.ORACLE, params, series.query_id or "")
