"""Adaptive keyframe sampling: relevance + coverage frame selection."""

from .core import (
    FrameManifest,
    KeyframeSelection,
    ScoreFileError,
    ScoreSeries,
    SelectionParams,
    Strategy,
    load_scores,
    load_selection,
    resample_candidates,
    save_scores,
    save_selection,
)
from .coverage import BinTree, bin_counts, build_bin_tree, coverage, ripley_k
from .oracle import brute_force, lexicographic
from .scorer import (
    PlantedInterval,
    ScorerError,
    ScorerSpec,
    SyntheticSpec,
    generate_synthetic,
    score_frames,
)
from .strategies import (
    Segment,
    allocate_quotas,
    objective,
    segment_tree,
    select,
    select_ada,
    select_bin,
    select_top,
    select_uni,
)

__all__ = [
    "BinTree",
    "FrameManifest",
    "KeyframeSelection",
    "PlantedInterval",
    "ScoreFileError",
    "ScoreSeries",
    "ScorerError",
    "ScorerSpec",
    "Segment",
    "SelectionParams",
    "Strategy",
    "SyntheticSpec",
    "allocate_quotas",
    "bin_counts",
    "brute_force",
    "build_bin_tree",
    "coverage",
    "generate_synthetic",
    "lexicographic",
    "load_scores",
    "load_selection",
    "objective",
    "resample_candidates",
    "ripley_k",
    "save_scores",
    "save_selection",
    "score_frames",
    "segment_tree",
    "select",
    "select_ada",
    "select_bin",
    "select_top",
    "select_uni",
]

__version__ = "0.1.0"
