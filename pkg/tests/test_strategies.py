import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aks.core import ScoreSeries, SelectionParams, Strategy
from aks.strategies import (
    Segment,
    allocate_quotas,
    objective,
    segment_tree,
    select_ada,
    select_bin,
    select_top,
    select_uni,
)


def make_series(scores, query_id=None):
    scores = np.asarray(scores, dtype=float)
    return ScoreSeries(np.arange(len(scores), dtype=float), scores, 1.0, query_id)


def random_instance(rng, t_max=64, m_max=16, l_max=4):
    horizon = int(rng.integers(1, t_max + 1))
    m = int(rng.integers(1, m_max + 1))
    max_level = int(rng.integers(1, l_max + 1))
    s_thr = float(rng.uniform(0, 1))
    series = make_series(rng.uniform(0, 1, horizon))
    return series, SelectionParams(m=m, max_level=max_level, s_thr=s_thr)


score_lists = st.lists(st.floats(-100, 100), min_size=1, max_size=64)


class TestSelectUni:
    def test_even_spacing(self):
        assert select_uni(8, 4).indices == (1, 3, 5, 7)

    def test_budget_equals_horizon(self):
        assert select_uni(5, 5).indices == (0, 1, 2, 3, 4)

    def test_clamped_budget(self):
        with pytest.warns(UserWarning, match="exceeds"):
            assert select_uni(3, 5).indices == (0, 1, 2)

    @given(st.integers(1, 200), st.integers(1, 64))
    def test_size_and_range(self, horizon, m):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            sel = select_uni(horizon, m)
        assert len(sel.indices) == min(m, horizon)
        assert all(0 <= i < horizon for i in sel.indices)


class TestSelectTop:
    def test_picks_largest(self):
        assert select_top(make_series([0.1, 0.9, 0.5, 0.7]), 2).indices == (1, 3)

    def test_tie_break_smaller_index(self):
        assert select_top(make_series([0.5, 0.5, 0.5]), 2).indices == (0, 1)

    def test_constant_scores_earliest(self):
        assert select_top(make_series([1.0] * 6), 3).indices == (0, 1, 2)

    @given(score_lists, st.integers(1, 64))
    def test_monotone_transform_invariance(self, scores, m):
        a = make_series(scores)
        b = make_series([3.0 * s + 7.0 for s in scores])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert select_top(a, m).indices == select_top(b, m).indices


class TestSelectBin:
    def test_per_bin_argmax(self):
        s = make_series([0, 3, 1, 2, 5, 0, 0, 4])
        assert select_bin(s, 2, 1).indices == (1, 4)

    def test_constant_scores_degenerate_to_even(self):
        # a dummy scorer makes BIN collapse to even spacing
        s = make_series([1.0] * 8)
        assert select_bin(s, 4, 2).indices == (0, 2, 4, 6)

    def test_coverage_forced(self):
        s = make_series([9, 8, 0, 0, 0, 0, 0, 0])
        assert select_bin(s, 2, 1).indices == (0, 4)

    def test_more_bins_than_budget_keeps_best_champions(self):
        s = make_series([5, 0, 1, 0, 9, 0, 3, 0])
        # L=2 -> bins [0,2),[2,4),[4,6),[6,8); champions 0,2,4,6; top-2 -> {0,4}
        assert select_bin(s, 2, 2).indices == (0, 4)

    def test_fewer_bins_than_budget_spreads_quota(self):
        s = make_series([5, 4, 0, 0, 9, 0, 3, 0])
        # L=1 -> halves; quotas [2,2]
        assert select_bin(s, 4, 1).indices == (0, 1, 4, 6)

    @given(score_lists, st.integers(1, 32), st.integers(1, 5))
    def test_size_and_order(self, scores, m, max_level):
        s = make_series(scores)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            sel = select_bin(s, m, max_level)
        idx = sel.indices
        assert len(idx) == min(m, len(scores))
        assert all(a < b for a, b in zip(idx, idx[1:]))


class TestSegmentTree:
    def test_hand_traced_split(self):
        s = make_series([0.1] * 6 + [0.9, 0.9])
        segs = segment_tree(s, SelectionParams(m=4, max_level=2, s_thr=0.5))
        assert [(g.lo, g.hi) for g in segs] == [(0, 2), (2, 4), (4, 6), (6, 8)]
        assert all(g.completed and g.depth == 2 for g in segs)

    def test_zero_threshold_root_completes(self):
        s = make_series([0.3, 0.9, 0.2, 0.5])
        segs = segment_tree(s, SelectionParams(m=2, max_level=3, s_thr=0.0))
        assert [(g.lo, g.hi, g.depth) for g in segs] == [(0, 4, 0)]

    def test_budget_one_root_completes(self):
        s = make_series([0.1, 0.2, 0.9, 0.1])
        segs = segment_tree(s, SelectionParams(m=1, max_level=3, s_thr=5.0))
        assert [(g.lo, g.hi, g.quota_hint) for g in segs] == [(0, 4, 1)]

    @given(score_lists, st.integers(1, 32), st.integers(0, 5),
           st.floats(0, 10))
    def test_segments_partition_horizon(self, scores, m, max_level, s_thr):
        s = make_series(scores)
        segs = segment_tree(s, SelectionParams(m=m, max_level=max_level, s_thr=s_thr))
        assert segs[0].lo == 0 and segs[-1].hi == len(scores)
        for a, b in zip(segs, segs[1:]):
            assert a.hi == b.lo


class TestAllocateQuotas:
    def seg(self, lo, hi):
        return Segment(lo, hi, 0, 1, True)

    def test_exact_division(self):
        segs = [self.seg(0, 2), self.seg(2, 4), self.seg(4, 6), self.seg(6, 8)]
        assert allocate_quotas(segs, 4) == [1, 1, 1, 1]

    def test_remainder_tie_leftmost(self):
        assert allocate_quotas([self.seg(0, 3), self.seg(3, 8)], 4) == [2, 2]

    def test_zero_floor_gets_extra(self):
        assert allocate_quotas([self.seg(0, 1), self.seg(1, 8)], 4) == [1, 3]

    def test_infeasible_budget(self):
        with pytest.raises(ValueError):
            allocate_quotas([self.seg(0, 2)], 3)

    @given(st.lists(st.integers(1, 9), min_size=1, max_size=8), st.data())
    def test_quotas_sum_to_budget(self, lengths, data):
        edges = np.cumsum([0] + lengths)
        segs = [self.seg(int(a), int(b)) for a, b in zip(edges, edges[1:])]
        m = data.draw(st.integers(1, int(edges[-1])))
        quotas = allocate_quotas(segs, m)
        assert sum(quotas) == m
        assert all(0 <= q <= s.length for q, s in zip(quotas, segs))


class TestSelectAda:
    def test_hand_traced_flat_segments(self):
        s = make_series([0.1] * 6 + [0.9, 0.9])
        sel = select_ada(s, SelectionParams(m=4, max_level=2, s_thr=0.5))
        assert sel.indices == (0, 2, 4, 6)

    def test_zero_threshold_equals_top(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            series, params = random_instance(rng)
            params = SelectionParams(m=params.m, max_level=params.max_level, s_thr=0.0)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                assert select_ada(series, params).indices == \
                    select_top(series, params.m).indices

    def test_budget_one_is_global_argmax(self):
        s = make_series([0.9, 0.1, 0.1, 0.1])
        for max_level, s_thr in [(0, 0.0), (3, 5.0), (1, 0.2)]:
            sel = select_ada(s, SelectionParams(m=1, max_level=max_level, s_thr=s_thr))
            assert sel.indices == (0,)

    @given(score_lists, st.integers(1, 32), st.integers(0, 5), st.floats(0, 2))
    def test_output_invariants(self, scores, m, max_level, s_thr):
        s = make_series(scores)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            sel = select_ada(s, SelectionParams(m=m, max_level=max_level, s_thr=s_thr))
        idx = sel.indices
        assert len(idx) == min(m, len(scores))
        assert all(a < b for a, b in zip(idx, idx[1:]))
        assert all(0 <= i < len(scores) for i in idx)

    def test_shift_invariance(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            series, params = random_instance(rng)
            base = select_ada(series, params).indices
            for c in (-5.0, 0.3, 1000.0):
                shifted = make_series(np.asarray(series.scores) + c)
                assert select_ada(shifted, params).indices == base


class TestObjective:
    def test_balanced_pair(self):
        s = make_series([0.9, 0.8, 0.1, 0.2])
        sel = select_top(s, 2)  # {0, 1}
        assert objective(s, sel, 1.0, 1) == pytest.approx(-0.3)

    def test_explicit_selection_value(self):
        from aks.core import KeyframeSelection

        s = make_series([0.9, 0.8, 0.1, 0.2])
        sel = KeyframeSelection((0, 3), Strategy.ORACLE, SelectionParams(m=2))
        assert objective(s, sel, 1.0, 1) == pytest.approx(1.1)

    def test_lambda_zero_is_score_sum(self):
        s = make_series([0.4, 0.3, 0.2, 0.6])
        sel = select_top(s, 2)
        assert objective(s, sel, 0.0, 1) == pytest.approx(1.0)

    def test_rejects_invalid_selection(self):
        from aks.core import KeyframeSelection

        s = make_series([0.1, 0.2])
        sel = KeyframeSelection((0, 5), Strategy.TOP, SelectionParams(m=2))
        with pytest.raises(ValueError):
            objective(s, sel, 1.0, 1)


class TestUniIgnoresScores:
    @given(st.integers(2, 64), st.integers(1, 16))
    def test_permutation_invariance(self, horizon, m):
        # UNI takes only T and M; identical inputs give identical outputs
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert select_uni(horizon, m).indices == select_uni(horizon, m).indices
