import sys
import threading

import numpy as np
import pytest

from aks.core import FrameManifest
from aks.echo_mock import MockScorerState, echo_score, make_http_server
from aks.scorer import (
    PlantedInterval,
    ScorerError,
    ScorerSpec,
    SyntheticSpec,
    generate_synthetic,
    score_frames,
)

STDIO_MOCK = f"{sys.executable} -m aks.echo_mock --transport stdio"


def make_manifest(n, assets=None):
    timestamps = np.arange(n, dtype=float)
    if assets is None:
        assets = tuple(str(float(t)) for t in timestamps)
    return FrameManifest(timestamps, assets, video_id="vid")


@pytest.fixture
def http_mock():
    state = MockScorerState()
    server = make_http_server(state)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}", state
    server.shutdown()


class TestSyntheticSpec:
    def test_rejects_overlap(self):
        with pytest.raises(ValueError, match="overlap"):
            SyntheticSpec(10, (PlantedInterval(0, 5, 1.0), PlantedInterval(4, 8, 1.0)))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            SyntheticSpec(10, (PlantedInterval(5, 12, 1.0),))

    def test_rejects_nonpositive_peak(self):
        with pytest.raises(ValueError):
            PlantedInterval(0, 2, 0.0)


class TestGenerateSynthetic:
    def test_noise_free_plateau_exact(self):
        spec = SyntheticSpec(100, (PlantedInterval(40, 50, 0.8),), 0.0, baseline=0.1)
        series, truth = generate_synthetic(spec)
        assert truth == ((40, 50),)
        assert np.allclose(series.scores[40:50], 0.9)
        outside = np.concatenate([series.scores[:40], series.scores[50:]])
        assert np.allclose(outside, 0.1)

    def test_seed_determinism(self):
        spec = SyntheticSpec(100, (PlantedInterval(40, 50, 0.8),), 0.05, 0.1, seed=42)
        a, _ = generate_synthetic(spec)
        b, _ = generate_synthetic(spec)
        assert np.array_equal(a.scores, b.scores)

    def test_interval_mean_exceeds_outside(self):
        spec = SyntheticSpec(
            100,
            (PlantedInterval(10, 20, 0.5, "gaussian-bump"),
             PlantedInterval(60, 70, 0.5, "gaussian-bump")),
            0.05, 0.1, seed=7,
        )
        series, truth = generate_synthetic(spec)
        inside = np.concatenate([series.scores[s:e] for s, e in truth])
        mask = np.ones(100, bool)
        for s, e in truth:
            mask[s:e] = False
        assert inside.mean() > series.scores[mask].mean()


class TestLocalScorers:
    def test_constant(self):
        series = score_frames(make_manifest(3), "q", ScorerSpec("constant", value=0.5))
        assert list(series.scores) == [0.5, 0.5, 0.5]
        assert series.query_id == "q"

    def test_empty_manifest(self):
        manifest = FrameManifest(np.array([]), ())
        with pytest.raises(ScorerError, match="empty manifest"):
            score_frames(manifest, "q", ScorerSpec("constant", value=0.5))

    def test_file_scorer_length_mismatch(self, tmp_path):
        from aks.core import ScoreSeries, save_scores

        p = tmp_path / "s.jsonl"
        save_scores(ScoreSeries(np.arange(2.0), np.array([0.1, 0.2]), 1.0), p)
        with pytest.raises(ScorerError, match="2 entries"):
            score_frames(make_manifest(3), "q", ScorerSpec("file", path=str(p)))

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            ScorerSpec("constant")  # missing value
        with pytest.raises(ValueError):
            ScorerSpec("remote", endpoint="x", batch_size=0)
        with pytest.raises(ValueError):
            ScorerSpec("teapot", value=1.0)


class TestEchoScore:
    def test_numeric_asset(self):
        assert echo_score(0, "3.0") == 0.3

    def test_non_numeric_asset_deterministic(self):
        assert echo_score(0, "frame.jpg") == echo_score(5, "frame.jpg")
        assert 0.0 <= echo_score(0, "frame.jpg") < 1.0


class TestStdioProtocol:
    def test_echoes_timestamp_tenth(self):
        spec = ScorerSpec("remote", endpoint=STDIO_MOCK, transport="stdio-pipe",
                          batch_size=2)
        series = score_frames(make_manifest(5), "q", spec)
        assert np.allclose(series.scores, [0.0, 0.1, 0.2, 0.3, 0.4])

    @pytest.mark.parametrize("batch_size", [1, 7, 64])
    def test_order_preserved_across_batch_sizes(self, batch_size):
        spec = ScorerSpec("remote", endpoint=STDIO_MOCK, transport="stdio-pipe",
                          batch_size=batch_size)
        series = score_frames(make_manifest(20), "q", spec)
        assert np.allclose(series.scores, np.arange(20) / 10.0)

    def test_transient_errors_retried(self):
        spec = ScorerSpec(
            "remote",
            endpoint=STDIO_MOCK + " --fail-every 3",
            transport="stdio-pipe",
            batch_size=1,
            max_retries=2,
        )
        series = score_frames(make_manifest(10), "q", spec)
        assert np.allclose(series.scores, np.arange(10) / 10.0)

    def test_retries_exhausted(self):
        spec = ScorerSpec(
            "remote",
            endpoint=STDIO_MOCK + " --fail-every 1",
            transport="stdio-pipe",
            batch_size=4,
            max_retries=2,
        )
        with pytest.raises(ScorerError, match="retries"):
            score_frames(make_manifest(4), "q", spec)


class TestHttpProtocol:
    @pytest.mark.parametrize("batch_size", [1, 7, 64])
    def test_order_preserved(self, http_mock, batch_size):
        url, _ = http_mock
        spec = ScorerSpec("remote", endpoint=url, transport="http",
                          batch_size=batch_size)
        series = score_frames(make_manifest(20), "q", spec)
        assert np.allclose(series.scores, np.arange(20) / 10.0)

    def test_transient_errors_retried(self, http_mock):
        url, state = http_mock
        state.fail_every = 2
        spec = ScorerSpec("remote", endpoint=url, transport="http",
                          batch_size=1, max_retries=3)
        series = score_frames(make_manifest(8), "q", spec)
        assert np.allclose(series.scores, np.arange(8) / 10.0)

    def test_unreachable_endpoint(self):
        spec = ScorerSpec("remote", endpoint="http://127.0.0.1:1",
                          transport="http", timeout_s=0.5)
        with pytest.raises(Exception):
            score_frames(make_manifest(2), "q", spec)
