"""Trajectory metrics and the cross-seed summary files.

RewardGap_{i,t} = (t*lambda_star - cum W_i(t)) / (t*lambda_star); it may be
negative when an objective runs ahead of the benchmark.  NormalizedReward(t)
is the smallest per-objective running average, the quantity the max-min
objective controls.  CSV columns and JSON keys below are frozen interfaces;
the plotting layer reads only these files.
"""

import csv
import json

import numpy as np


class ZeroBenchmark(ValueError):
    pass


class MetricSeries:
    def __init__(self, lambda_star, reward_gaps, normalized, occupancy):
        self.lambda_star = lambda_star
        self.reward_gaps = reward_gaps      # (T, R)
        self.normalized = normalized        # (T,)
        self.occupancy = occupancy          # (T, C)

    def __len__(self):
        return len(self.normalized)

    def header(self):
        R = self.reward_gaps.shape[1]
        C = self.occupancy.shape[1]
        return (
            ["t"]
            + [f"reward_gap_{i + 1}" for i in range(R)]
            + ["normalized_reward"]
            + [f"occupied_{i + 1}" for i in range(C)]
        )

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.header())
            for t in range(len(self)):
                writer.writerow(
                    [t + 1]
                    + [repr(float(x)) for x in self.reward_gaps[t]]
                    + [repr(float(self.normalized[t]))]
                    + [repr(float(x)) for x in self.occupancy[t]]
                )


def compute_metrics(trajectory, lambda_star):
    if lambda_star <= 0.0:
        raise ZeroBenchmark("benchmark value must be positive")
    cum = trajectory.cumulative_matrix()            # (T, R)
    T = cum.shape[0]
    steps = np.arange(1, T + 1, dtype=float)[:, None]
    gaps = (steps * lambda_star - cum) / (steps * lambda_star)
    normalized = (cum / steps).min(axis=1)
    return MetricSeries(
        lambda_star, gaps, normalized, trajectory.occupancy_matrix()
    )


def summarize_seeds(series_by_seed, lambda_star):
    """Per-step mean and (population) variance of every metric column."""
    seeds = sorted(series_by_seed)
    if not seeds:
        raise ValueError("no seeds to summarize")
    first = series_by_seed[seeds[0]]
    columns = first.header()[1:]
    stacks = {name: [] for name in columns}
    for seed in seeds:
        series = series_by_seed[seed]
        if len(series) != len(first):
            raise ValueError("seed trajectories have different lengths")
        R = series.reward_gaps.shape[1]
        data = np.column_stack(
            [series.reward_gaps, series.normalized, series.occupancy]
        )
        for col, name in enumerate(columns):
            stacks[name].append(data[:, col])
    mean = {name: np.mean(stacks[name], axis=0).tolist() for name in columns}
    variance = {name: np.var(stacks[name], axis=0).tolist() for name in columns}
    return {
        "lambda_star": float(lambda_star),
        "seeds": [int(s) for s in seeds],
        "T": len(first),
        "mean": mean,
        "variance": variance,
    }


def save_summary(summary, path):
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_metric_csv(path):
    """Read a metric CSV back into (header, float matrix with t column)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(x) for x in row] for row in reader]
    return header, np.array(rows)


def metrics_from_trajectory_csv(path, lambda_star, n_rewards, n_resources):
    """Recompute a MetricSeries from an exported trajectory CSV."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    cum_cols = [header.index(f"cum_W_{i + 1}") for i in range(n_rewards)]
    occ_cols = [header.index(f"occupied_{i + 1}") for i in range(n_resources)]
    cum = np.array([[float(r[c]) for c in cum_cols] for r in rows])
    occ = np.array([[float(r[c]) for c in occ_cols] for r in rows])
    T = cum.shape[0]
    steps = np.arange(1, T + 1, dtype=float)[:, None]
    gaps = (steps * lambda_star - cum) / (steps * lambda_star)
    normalized = (cum / steps).min(axis=1)
    return MetricSeries(lambda_star, gaps, normalized, occ)
