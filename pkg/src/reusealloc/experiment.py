"""Experiment orchestration: instance loading, benchmark solving, policy
construction, multi-seed runs and the frozen output files.

Config files are JSON:

    {
      "instance": {"file": "inst.json"}          # or
      "instance": {"synthetic": {...GenParams fields...}, "seed": 7},
      "policy":   {"name": "imwu", "delta": 0.1},   # osa: {"name": "osa",
                                                    #       "eta_bar": 0.2}
      "horizon":  10000,
      "seeds":    [0, 1, 2],
      "output_dir": "out",
      "write_trajectories": true
    }

The output directory can be overridden with the REUSEALLOC_OUTPUT_DIR
environment variable.  Per-seed files are metrics_seed_<s>.csv and
trajectory_seed_<s>.csv; the cross-seed summary is summary.json.
"""

import json
import math
import os
from pathlib import Path

import numpy as np

from . import lp as lp_mod
from .assortment import MnlOutcomeModel, make_mnl_kappa, make_mnl_pricing_oracle
from .metrics import compute_metrics, save_summary, summarize_seeds
from .model import compute_bounds, load_instance
from .policy import (
    GreedyPolicy, ImwuPolicy, NullPolicy, OsaPolicy, make_imwu_policy,
    osa_policy,
)
from .simulator import run_episode
from .synth import (
    GenParams, generate_synthetic_instance, load_mnl_instance,
)

OUTPUT_DIR_ENV = "REUSEALLOC_OUTPUT_DIR"
COLGEN_ACTION_THRESHOLD = 256


class ConfigError(ValueError):
    pass


def load_any_instance(path):
    """Dispatch on the file's "kind" field; returns an Instance."""
    with open(path) as fh:
        record = json.load(fh)
    if record.get("kind") == "mnl":
        from .synth import record_to_instance

        instance, _, _ = record_to_instance(record)
        return instance
    from .model import build_instance

    return build_instance(record)


def _use_colgen(instance):
    return (
        isinstance(instance.outcome_model, MnlOutcomeModel)
        and instance.n_actions > COLGEN_ACTION_THRESHOLD
    )


def solve_benchmark(instance, p=None, warm_columns=None):
    """Optimum of the steady-state LP (lambda_star when p is the truth).

    Returns (value, details); details carries duals and, for the column
    generation route, the generated columns for warm-starting later solves.
    """
    if p is None:
        p = instance.arrival_probs
    if _use_colgen(instance):
        pricing = make_mnl_pricing_oracle(instance.outcome_model)
        result = lp_mod.solve_lp_s_colgen(
            p, instance.capacities, instance.n_rewards, pricing,
            initial_columns=warm_columns,
        )
        return result.optimum, {
            "method": "colgen",
            "columns": [c for c in result.columns if c[1] is not None],
            "y": result.y,
            "raw_columns": result.columns,
            "rho": result.rho,
            "alpha": result.alpha,
            "beta": result.beta,
            "iterations": result.iterations,
        }
    model = instance.outcome_model
    program = lp_mod.build_lp_s(
        model.mean_reward(), model.mean_volume(), p, instance.capacities
    )
    sol = lp_mod.solve_lp(program)
    if sol.status != "optimal":
        raise lp_mod.NumericalFailure(f"benchmark LP status {sol.status}")
    return sol.optimum, {"method": "dense", "solution": sol}


def build_policy(instance, bounds, policy_spec):
    name = policy_spec.get("name")
    if name == "null":
        return NullPolicy(instance.null_action)
    if name == "greedy":
        return GreedyPolicy()
    if name == "imwu":
        delta = float(policy_spec.get("delta", 0.1))
        if not _use_colgen(instance):
            return make_imwu_policy(instance, bounds, delta)
        kappa_fn = make_mnl_kappa(instance.outcome_model)
        warm = []

        def lambda_hat_fn(p_hat):
            value, details = solve_benchmark(
                instance, p=p_hat, warm_columns=list(warm)
            )
            warm.clear()
            warm.extend(details["columns"])
            return value

        return ImwuPolicy(
            instance.n_rewards, instance.n_resources, instance.n_types,
            instance.n_actions, instance.capacities, bounds, delta,
            kappa_fn, lambda_hat_fn, null_action=instance.null_action,
        )
    if name == "osa":
        eta_bar = policy_spec.get("eta_bar")
        if eta_bar is None:
            eta_bar = math.sqrt(bounds.xi)
        if not _use_colgen(instance):
            return osa_policy(instance, bounds, eta_bar=float(eta_bar))
        _, details = solve_benchmark(instance)
        mixtures = {}
        for (j, k, _, _), y in zip(details["raw_columns"], details["y"]):
            if k is not None and y > 1e-12 and k != instance.null_action:
                mixtures.setdefault(j, []).append((k, float(y)))
        return OsaPolicy(mixtures, float(eta_bar), instance.null_action)
    raise ConfigError(f"unknown policy {name!r}")


def resolve_instance(config):
    source = config.get("instance")
    if not isinstance(source, dict):
        raise ConfigError("config needs an 'instance' table")
    if "file" in source:
        return load_any_instance(source["file"])
    if "synthetic" in source:
        try:
            params = GenParams(**source["synthetic"])
        except TypeError as exc:
            raise ConfigError(f"bad generator params: {exc}") from exc
        instance, _, _ = generate_synthetic_instance(
            params, int(source.get("seed", 0))
        )
        return instance
    raise ConfigError("instance source must be 'file' or 'synthetic'")


def validate_config(config):
    seeds = config.get("seeds")
    if not seeds:
        raise ConfigError("config needs a non-empty 'seeds' list")
    horizon = config.get("horizon")
    if not isinstance(horizon, int) or horizon < 1:
        raise ConfigError("config needs an integer 'horizon' >= 1")
    if "policy" not in config or "name" not in config["policy"]:
        raise ConfigError("config needs a 'policy' with a 'name'")
    return [int(s) for s in seeds], horizon


def output_directory(config):
    override = os.environ.get(OUTPUT_DIR_ENV)
    out = Path(override or config.get("output_dir", "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def run_experiment(config):
    """Run the configured policy over all seeds; returns written paths."""
    seeds, horizon = validate_config(config)
    instance = resolve_instance(config)
    bounds = compute_bounds(instance)
    lambda_star, _ = solve_benchmark(instance)
    out = output_directory(config)
    write_traj = bool(config.get("write_trajectories", True))
    series_by_seed = {}
    written = {"metrics": {}, "trajectories": {}}
    for seed in seeds:
        policy = build_policy(instance, bounds, config["policy"])
        trajectory = run_episode(
            instance, policy, horizon, seed=seed, a_max=bounds.a_max
        )
        series = compute_metrics(trajectory, lambda_star)
        path = out / f"metrics_seed_{seed}.csv"
        series.to_csv(path)
        series_by_seed[seed] = series
        written["metrics"][seed] = str(path)
        if write_traj:
            tpath = out / f"trajectory_seed_{seed}.csv"
            trajectory.to_csv(tpath)
            written["trajectories"][seed] = str(tpath)
    summary = summarize_seeds(series_by_seed, lambda_star)
    summary["policy"] = config["policy"]
    summary_path = out / "summary.json"
    save_summary(summary, summary_path)
    written["summary"] = str(summary_path)
    written["lambda_star"] = lambda_star
    written["series_by_seed"] = series_by_seed
    return written
