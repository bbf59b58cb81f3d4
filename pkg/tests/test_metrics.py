import json

import numpy as np
import pytest

from reusealloc.checks import gap_instance
from reusealloc.metrics import (
    ZeroBenchmark, compute_metrics, load_metric_csv,
    metrics_from_trajectory_csv, save_summary, summarize_seeds,
)
from reusealloc.simulator import Trajectory, run_episode


class _FixedPolicy:
    def __init__(self, action):
        self.action = action

    def next_action(self, t, j, means, rng):
        return self.action


def _toy_trajectory(rewards):
    trajectory = Trajectory(n_rewards=len(rewards[0]), n_resources=1)

    class Out:
        def __init__(self, w):
            self.rewards = np.asarray(w, dtype=float)

    for w in rewards:
        trajectory.record(0, 0, Out(w), np.zeros(1))
    return trajectory


def test_reward_gap_arithmetic():
    # lambda* = 1: after 10 steps with total 8, gap = 0.2
    trajectory = _toy_trajectory([[0.8]] * 10)
    series = compute_metrics(trajectory, 1.0)
    assert series.reward_gaps[-1, 0] == pytest.approx(0.2)
    # exact attainment -> gap 0
    exact = compute_metrics(_toy_trajectory([[1.0]] * 4), 1.0)
    np.testing.assert_allclose(exact.reward_gaps[:, 0], 0.0, atol=1e-12)
    # overshoot -> negative gap, permitted
    over = compute_metrics(_toy_trajectory([[2.0]] * 4), 1.0)
    assert (over.reward_gaps < 0).all()


def test_normalized_reward_is_min_average():
    trajectory = _toy_trajectory([[1.0, 0.5], [1.0, 0.5]])
    series = compute_metrics(trajectory, 1.0)
    assert series.normalized[-1] == pytest.approx(0.5)


def test_zero_benchmark_rejected():
    with pytest.raises(ZeroBenchmark):
        compute_metrics(_toy_trajectory([[1.0]]), 0.0)


def test_metric_csv_roundtrip(tmp_path):
    instance = gap_instance()
    trajectory = run_episode(instance, _FixedPolicy(1), 20, seed=0)
    series = compute_metrics(trajectory, 0.75)
    path = tmp_path / "metrics.csv"
    series.to_csv(path)
    header, data = load_metric_csv(path)
    assert header == ["t", "reward_gap_1", "normalized_reward", "occupied_1"]
    np.testing.assert_array_equal(data[:, 0], np.arange(1, 21))
    np.testing.assert_array_equal(data[:, 1], series.reward_gaps[:, 0])
    np.testing.assert_array_equal(data[:, 2], series.normalized)


def test_metrics_recomputed_from_trajectory_csv(tmp_path):
    instance = gap_instance()
    trajectory = run_episode(instance, _FixedPolicy(1), 30, seed=1)
    series = compute_metrics(trajectory, 0.75)
    tpath = tmp_path / "traj.csv"
    trajectory.to_csv(tpath)
    recomputed = metrics_from_trajectory_csv(tpath, 0.75, 1, 1)
    np.testing.assert_array_equal(recomputed.reward_gaps, series.reward_gaps)
    np.testing.assert_array_equal(recomputed.normalized, series.normalized)
    np.testing.assert_array_equal(recomputed.occupancy, series.occupancy)
    # and writing both to CSV yields identical bytes
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    series.to_csv(a)
    recomputed.to_csv(b)
    assert a.read_bytes() == b.read_bytes()


def test_summary_mean_variance_recompute(tmp_path):
    instance = gap_instance()
    series_by_seed = {
        seed: compute_metrics(
            run_episode(instance, _FixedPolicy(1), 15, seed=seed), 0.75
        )
        for seed in (0, 1, 2)
    }
    summary = summarize_seeds(series_by_seed, 0.75)
    path = tmp_path / "summary.json"
    save_summary(summary, path)
    loaded = json.loads(path.read_text())
    stacked = np.stack(
        [series_by_seed[s].reward_gaps[:, 0] for s in (0, 1, 2)]
    )
    np.testing.assert_allclose(
        loaded["mean"]["reward_gap_1"], stacked.mean(axis=0), atol=1e-12
    )
    np.testing.assert_allclose(
        loaded["variance"]["reward_gap_1"], stacked.var(axis=0), atol=1e-12
    )
    assert loaded["seeds"] == [0, 1, 2]
    assert loaded["T"] == 15


def test_summary_rejects_mismatched_lengths():
    a = compute_metrics(_toy_trajectory([[1.0]] * 3), 1.0)
    b = compute_metrics(_toy_trajectory([[1.0]] * 4), 1.0)
    with pytest.raises(ValueError):
        summarize_seeds({0: a, 1: b}, 1.0)
