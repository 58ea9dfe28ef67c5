import math

import numpy as np
import pytest

from ladkit.errors import ConfigError, ContractError
from ladkit.lstm import BackendConfig
from ladkit.metrics import LabelSet, MatchPolicy, match, merge_events
from ladkit.repad import (
    DetectorConfig,
    RepadDetector,
    StreamingStats,
    aare,
    abs_rel_error,
    detection_threshold,
    new_detector,
)


def run_stream(values, config=None):
    det = RepadDetector(config or DetectorConfig())
    verdicts = [det.step(i, float(v)) for i, v in enumerate(values)]
    return det, verdicts


# ---------------------------------------------------------------- scoring helpers


def test_abs_rel_error_basic():
    assert abs_rel_error(10.0, 9.0, 1e-4) == pytest.approx(0.1)


def test_abs_rel_error_perfect_prediction():
    for x in (0.0, 3.7, -12.0):
        assert abs_rel_error(x, x, 1e-4) == 0.0


def test_abs_rel_error_eps_guard_near_zero():
    # documents the guard: |0 - 0.5| / max(0, 1e-4) = 5000
    assert abs_rel_error(0.0, 0.5, 1e-4) == pytest.approx(5000.0)


def test_abs_rel_error_scale_free():
    # abs_rel_error(c*a, c*p, eps) == abs_rel_error(a, p, eps)
    # whenever |a| >= eps and |c*a| >= eps
    rng = np.random.Generator(np.random.PCG64(3))
    eps = 1e-4
    for _ in range(500):
        a = float(rng.uniform(-100, 100))
        p = float(rng.uniform(-100, 100))
        c = float(rng.uniform(0.01, 100))
        if abs(a) < eps or abs(c * a) < eps:
            continue
        assert abs_rel_error(c * a, c * p, eps) == pytest.approx(
            abs_rel_error(a, p, eps), rel=1e-12
        )


def test_aare_mean():
    assert aare([0.1, 0.2, 0.3]) == pytest.approx(0.2)
    assert aare([0.0, 0.0, 0.0]) == 0.0


def test_aare_matches_summation_oracle():
    rng = np.random.Generator(np.random.PCG64(17))
    for _ in range(50):
        errs = rng.uniform(0, 5, size=3)
        total = 0.0
        for e in errs:
            total += float(e)
        assert aare(errs.tolist()) == pytest.approx(total / 3, abs=1e-15)


# ---------------------------------------------------------------- streaming stats


def test_streaming_stats_against_two_pass_oracle():
    rng = np.random.Generator(np.random.PCG64(5))
    xs = rng.uniform(-10, 10, size=200).tolist()
    stats = StreamingStats()
    for x in xs:
        stats.push(x)
    assert stats.count == 200
    assert stats.mean == pytest.approx(sum(xs) / len(xs), rel=1e-12)
    mean = sum(xs) / len(xs)
    pop_var = sum((x - mean) ** 2 for x in xs) / len(xs)
    assert stats.std == pytest.approx(math.sqrt(pop_var), rel=1e-10)


def test_threshold_constant_history():
    stats = StreamingStats()
    for _ in range(3):
        stats.push(0.2)
    assert detection_threshold(stats) == pytest.approx(0.2)


def test_threshold_hand_computed():
    # mean 0.2, population std 0.1 -> 0.2 + 3*0.1 = 0.5
    stats = StreamingStats()
    stats.push(0.1)
    stats.push(0.3)
    assert detection_threshold(stats) == pytest.approx(0.5)


def test_threshold_absent_below_two():
    stats = StreamingStats()
    assert detection_threshold(stats) is None
    stats.push(0.4)
    assert detection_threshold(stats) is None


# ---------------------------------------------------------------- construction


def test_new_detector_echoes_preset_config():
    det = new_detector(DetectorConfig())
    assert det.config.look_back == 3
    assert det.config.hidden_size == 10
    assert det.config.backend.seed == 140
    assert det.points_seen == 0
    assert det.model is None


def test_new_detector_rejects_look_back_one():
    with pytest.raises(ConfigError):
        DetectorConfig(look_back=1)


def test_new_detector_rejects_predict_forward():
    with pytest.raises(ConfigError):
        DetectorConfig(predict_forward=2)


def test_fresh_detectors_identical():
    a = new_detector(DetectorConfig())
    b = new_detector(DetectorConfig())
    assert a.config == b.config
    assert list(a.recent_values) == list(b.recent_values) == []


# ---------------------------------------------------------------- step machine


def test_bootstrap_phase_first_b_points():
    _, verdicts = run_stream([1.0, 2.0, 3.0, 4.0, 5.0])
    for v in verdicts[:3]:
        assert v.phase == "bootstrap"
        assert v.predicted is None
        assert v.aare is None
        assert not v.is_anomaly
    # indices b..2b-2 still bootstrap but carry predictions
    for v in verdicts[3:5]:
        assert v.phase == "bootstrap"
        assert v.predicted is not None
        assert v.aare is None


def test_constant_series_never_anomalous():
    det, verdicts = run_stream([5.0] * 50)
    assert not any(v.is_anomaly for v in verdicts)
    assert det.retrain_count <= 1
    normal = [v for v in verdicts if v.phase == "normal"]
    assert len(normal) == 50 - (2 * 3 - 1)
    assert all(v.aare < 0.1 for v in normal)


def test_constant_series_training_ratio_bound():
    det, _ = run_stream([5.0] * 50)
    assert det.retrain_count / det.points_seen <= 1 / 50


def test_sine_spike_fixture_flags_one_event(fixtures_dir):
    """Clean sine (20 points/period) with a 10x-amplitude spike at 60:
    the spike is flagged within +/-7 and nothing else is."""
    from ladkit.dataio import load_csv

    series = load_csv(fixtures_dir / "sine_spike_100.csv")
    det, verdicts = run_stream(series.values.tolist())
    flagged = [v.index for v in verdicts if v.is_anomaly]
    events = merge_events(flagged)
    assert len(events) == 1
    tp, fp, fn = match(LabelSet(point_anomalies=[60]), events, MatchPolicy(7))
    assert (tp, fp, fn) == (1, 0, 0)


def test_replay_determinism():
    rng = np.random.Generator(np.random.PCG64(12))
    values = (10 + rng.normal(0, 1, size=80)).tolist()
    _, first = run_stream(values)
    _, second = run_stream(values)
    for a, b in zip(first, second):
        assert a.index == b.index
        assert a.value == b.value
        assert a.predicted == b.predicted
        assert a.aare == b.aare
        assert a.threshold == b.threshold
        assert a.phase == b.phase
        assert a.is_anomaly == b.is_anomaly
        assert a.retrained == b.retrained


def test_flag_implies_retrain():
    rng = np.random.Generator(np.random.PCG64(42))
    # random walk with injected jumps to provoke flags
    values = np.cumsum(rng.normal(0, 0.5, size=150)) + 50
    values[70] += 40
    values[110] -= 40
    _, verdicts = run_stream(values.tolist())
    assert any(v.is_anomaly for v in verdicts)
    for v in verdicts:
        if v.is_anomaly:
            assert v.retrained


def test_aare_stats_counts_normal_verdicts():
    det, verdicts = run_stream([5.0 + 0.1 * i for i in range(40)])
    normal = sum(1 for v in verdicts if v.phase == "normal")
    assert det.aare_stats.count == normal


def test_out_of_order_timestamp_rejected():
    det = new_detector(DetectorConfig())
    det.step(5, 1.0)
    with pytest.raises(ContractError):
        det.step(5, 2.0)
    with pytest.raises(ContractError):
        det.step(4, 2.0)


def test_incomparable_timestamps_rejected():
    det = new_detector(DetectorConfig())
    det.step("2021-01-01 00:00:00", 1.0)
    with pytest.raises(ContractError):
        det.step(42, 2.0)


def test_verdict_timing_nonnegative():
    _, verdicts = run_stream([1.0, 2.0, 3.0, 4.0])
    assert all(v.elapsed_seconds >= 0 for v in verdicts)


def test_rings_never_exceed_look_back():
    det, _ = run_stream(np.linspace(0, 10, 30).tolist())
    assert len(det.recent_values) <= det.config.look_back
    assert len(det.recent_errors) <= det.config.look_back
