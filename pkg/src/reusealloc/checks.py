"""Acceptance checks shared by the CLI `verify` command and the test suite.

Each check returns a CheckResult with a one-line measured summary.  Sizes
are parameters so `verify quick` can run the property checks at their full
stated sizes while the heavy end-to-end battery is reserved for `full`.
"""

import math
import os
import tempfile
import time
from dataclasses import dataclass

import numpy as np

from . import lp as lp_mod
from .experiment import OUTPUT_DIR_ENV, run_experiment, solve_benchmark
from .model import Instance, TableOutcomeModel, compute_bounds
from .mwu import mwu_regret_harness, regret_bound
from .oracle import dp_opt_ipc, enumerate_assortments, verify_lemma1
from .assortment import assortment_oracle
from .synth import GenParams, generate_synthetic_instance


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: str


# ---------------------------------------------------------------------------
# Random instance helpers
# ---------------------------------------------------------------------------

def random_table_instance(rng, n_rewards=1, max_resources=2, max_types=3,
                          max_actions=3, max_duration=3, max_support=2,
                          max_capacity=3):
    """Small random finite-support instance (type 0 / action 0 null)."""
    C = int(rng.integers(1, max_resources + 1))
    J = int(rng.integers(2, max_types + 1))
    K = int(rng.integers(2, max_actions + 1))
    capacities = rng.integers(1, max_capacity + 1, size=C).astype(float)
    p = rng.dirichlet(np.ones(J))
    tables = {}
    for j in range(1, J):
        for k in range(1, K):
            S = int(rng.integers(1, max_support + 1))
            probs = rng.dirichlet(np.ones(S))
            W = rng.uniform(0.0, 1.0, size=(S, n_rewards))
            A = rng.integers(0, 2, size=(S, C)).astype(float)
            D = rng.integers(1, max_duration + 1, size=(S, C)) * (A > 0)
            tables[(j, k)] = (probs, W, A, D.astype(int))
    model = TableOutcomeModel(n_rewards, C, J, K, tables)
    return Instance(
        n_rewards=n_rewards, n_resources=C, n_types=J, n_actions=K,
        capacities=capacities, arrival_probs=p, outcome_model=model,
    )


def gap_instance():
    """Single resource, c=4; one action ties up a unit twice as long."""
    tables = {
        (1, 1): ([1.0], [[0.75]], [[1.0]], [[4]]),
        (1, 2): ([1.0], [[1.0]], [[1.0]], [[8]]),
    }
    model = TableOutcomeModel(1, 1, 2, 3, tables)
    return Instance(
        n_rewards=1, n_resources=1, n_types=2, n_actions=3,
        capacities=[4.0], arrival_probs=[0.0, 1.0], outcome_model=model,
    )


def _solve_lp_s(instance, p=None):
    model = instance.outcome_model
    program = lp_mod.build_lp_s(
        model.mean_reward(), model.mean_volume(),
        instance.arrival_probs if p is None else p, instance.capacities,
    )
    return lp_mod.solve_lp(program)


def _solve_lp_e(instance, T):
    model = instance.outcome_model
    d_max = max(model.support_maxima()[2], 1)
    program = lp_mod.build_lp_e(
        model.mean_reward(), model.duration_tail(d_max),
        instance.arrival_probs, instance.capacities, T,
    )
    return lp_mod.solve_lp(program)


# ---------------------------------------------------------------------------
# Property checks
# ---------------------------------------------------------------------------

def check_gap_instance(tol=1e-9):
    start = time.perf_counter()
    instance = gap_instance()
    T = 4
    lam_s = _solve_lp_s(instance).optimum
    lam_e = _solve_lp_e(instance, T).optimum
    gap = T * lam_e - T * lam_s
    elapsed = time.perf_counter() - start
    passed = (
        abs(T * lam_s - 3.0) <= tol and abs(T * lam_e - 4.0) <= tol
        and abs(gap - 1.0) <= tol and elapsed < 1.0
    )
    return CheckResult(
        "gap-instance-exactness", passed,
        f"T*lam_S={T * lam_s:.12f} T*lam_E={T * lam_e:.12f} "
        f"gap={gap:.12f} ({elapsed:.2f}s)",
    )


def check_lemma2_sweep(n_instances=100, seed=20, tol=1e-8):
    rng = np.random.default_rng(seed)
    worst = 0.0
    violations = 0
    for _ in range(n_instances):
        instance = random_table_instance(rng, n_rewards=int(rng.integers(1, 3)))
        T = int(rng.integers(1, 21))
        lam_s = _solve_lp_s(instance).optimum
        lam_e = _solve_lp_e(instance, T).optimum
        w_max, _, d_max = instance.outcome_model.support_maxima()
        lo = T * lam_e - max(d_max, 1) * w_max
        hi = T * lam_e
        if not (lo - tol <= T * lam_s <= hi + tol):
            violations += 1
        worst = max(worst, T * lam_s - hi, lo - T * lam_s)
    return CheckResult(
        "lemma2-inequality-sweep", violations == 0,
        f"{n_instances} instances, {violations} violations, "
        f"worst slack {worst:.2e}",
    )


def check_lemma1_dp(n_instances=50, seed=21, tol=1e-9):
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(n_instances):
        instance = random_table_instance(rng, n_rewards=1, max_support=3)
        T = int(rng.integers(2, 7))
        if not verify_lemma1(instance, T, tol=tol):
            violations += 1
    return CheckResult(
        "lemma1-dp-dominance", violations == 0,
        f"{n_instances} tiny instances, {violations} violations",
    )


def check_mwu_regret(n_sequences=1000, seed=22):
    rng = np.random.default_rng(seed)
    violations = 0
    worst_margin = np.inf
    for _ in range(n_sequences):
        n = int(rng.integers(1, 9))
        B = float(rng.uniform(0.5, 4.0))
        tau = int(rng.integers(2, 2049))
        losses = rng.uniform(-B, B, size=(tau, n))
        per_coord, weighted = mwu_regret_harness(losses, B)
        bound = regret_bound(n, tau, B)
        margin = per_coord.min() - (weighted - bound)
        worst_margin = min(worst_margin, margin)
        if margin < -1e-10:
            violations += 1
    return CheckResult(
        "mwu-regret-bound", violations == 0,
        f"{n_sequences} sequences, {violations} violations, "
        f"worst margin {worst_margin:.3e}",
    )


def check_strong_duality(n_instances=40, seed=23, tol=1e-6):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        instance = random_table_instance(rng, n_rewards=int(rng.integers(1, 3)))
        model = instance.outcome_model
        w, v = model.mean_reward(), model.mean_volume()
        primal = _solve_lp_s(instance)
        dual = lp_mod.solve_lp(lp_mod.build_dual(
            "LP-S", w, v, instance.arrival_probs, instance.capacities
        ))
        worst = max(worst, abs(primal.optimum - dual.optimum))
        p_hat = rng.dirichlet(np.ones(instance.n_types))
        primal_rs = lp_mod.solve_lp(
            lp_mod.build_lp_rs(p_hat, w, v, instance.capacities)
        )
        dual_rs = lp_mod.solve_lp(lp_mod.build_dual(
            "LP-S", w, v, p_hat, instance.capacities
        ))
        worst = max(worst, abs(primal_rs.optimum - dual_rs.optimum))
        T = int(rng.integers(1, 7))
        d_max = max(model.support_maxima()[2], 1)
        tail = model.duration_tail(d_max)
        primal_e = lp_mod.solve_lp(lp_mod.build_lp_e(
            w, tail, instance.arrival_probs, instance.capacities, T
        ))
        dual_e = lp_mod.solve_lp(lp_mod.build_dual(
            "LP-E", w, v, instance.arrival_probs, instance.capacities,
            tail=tail, T=T,
        ))
        worst = max(worst, abs(primal_e.optimum - dual_e.optimum))
    return CheckResult(
        "strong-duality", worst <= tol,
        f"{n_instances} instances x 3 programs, max |primal-dual| {worst:.2e}",
    )


def check_assortment_oracle(n_instances=200, seed=24, tol=1e-6):
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = 0
    for _ in range(n_instances):
        m = int(rng.integers(2, 11))
        n = int(rng.integers(1, 5))
        u = np.exp(rng.standard_normal(m))
        rho = rng.standard_normal(m)
        offered, lp_obj = assortment_oracle(u, rho, n)
        _, enum_obj = enumerate_assortments(u, rho, n)
        idx = list(offered)
        attained = (
            float(rho[idx] @ u[idx]) / (1.0 + float(u[idx].sum()))
            if idx else 0.0
        )
        gap = max(abs(lp_obj - enum_obj), abs(attained - lp_obj))
        worst = max(worst, gap)
        if gap > tol or len(offered) > n:
            failures += 1
    return CheckResult(
        "assortment-oracle-vs-enumeration", failures == 0,
        f"{n_instances} instances, {failures} failures, worst gap {worst:.2e}",
    )


def check_colgen_equivalence(n_types=30, seed=25, tol=1e-6):
    start = time.perf_counter()
    params = GenParams(n_types=n_types, duration_cap=30, xi=1.0 / 20.0)
    instance, _, _ = generate_synthetic_instance(params, seed)
    value_cg, details = solve_benchmark(instance)
    dense = _solve_lp_s(instance).optimum
    elapsed = time.perf_counter() - start
    diff = abs(value_cg - dense)
    passed = (
        diff <= tol and instance.n_actions == 3473
        and details["method"] == "colgen" and elapsed < 60.0
    )
    return CheckResult(
        "colgen-vs-dense", passed,
        f"|K|={instance.n_actions - 1}, colgen={value_cg:.10f}, "
        f"dense={dense:.10f}, diff={diff:.2e} ({elapsed:.1f}s)",
    )


# ---------------------------------------------------------------------------
# End-to-end battery (feasibility, capacity monotonicity, OSA convergence,
# |J|-independence)
# ---------------------------------------------------------------------------

def _osa_eta(params, instance_seed):
    instance, _, _ = generate_synthetic_instance(params, instance_seed)
    bounds = compute_bounds(instance)
    xi = bounds.xi
    return math.sqrt(max(0.0, xi * math.log(instance.n_resources / xi)))


def _battery_config(base_dir, label, gen, seeds, T, policy):
    return {
        "instance": {"synthetic": gen, "seed": 7},
        "policy": policy,
        "horizon": T,
        "seeds": list(seeds),
        "output_dir": str(base_dir / label),
        "write_trajectories": False,
    }


def experiment_battery(T=10_000, n_seeds=10, duration_cap=40, n_types=1000,
                       j_sweep=(100, 400), base_dir=None):
    """Run every end-to-end configuration once; returns results per label."""
    if base_dir is None:
        base_dir = tempfile.mkdtemp(prefix="battery_")
    from pathlib import Path

    base = Path(base_dir)
    seeds = list(range(n_seeds))
    gen20 = {"n_types": n_types, "duration_cap": duration_cap, "xi": 1 / 20}
    gen200 = {"n_types": n_types, "duration_cap": duration_cap, "xi": 1 / 200}
    eta200 = _osa_eta(GenParams(**gen200), 7)
    configs = {
        "imwu_xi20": _battery_config(
            base, "imwu_xi20", gen20, seeds, T, {"name": "imwu", "delta": 0.1}
        ),
        "imwu_xi200": _battery_config(
            base, "imwu_xi200", gen200, seeds, T,
            {"name": "imwu", "delta": 0.1},
        ),
        "osa_xi200": _battery_config(
            base, "osa_xi200", gen200, seeds, T,
            {"name": "osa", "eta_bar": eta200},
        ),
    }
    for J in j_sweep:
        genJ = dict(gen200, n_types=J)
        configs[f"imwu_xi200_J{J}"] = _battery_config(
            base, f"J{J}", genJ, seeds, T, {"name": "imwu", "delta": 0.1}
        )
    saved_env = os.environ.pop(OUTPUT_DIR_ENV, None)
    try:
        results = {
            label: run_experiment(config)
            for label, config in configs.items()
        }
    finally:
        if saved_env is not None:
            os.environ[OUTPUT_DIR_ENV] = saved_env
    return results


def small_run_battery(T=2000, seeds=(0, 1, 2), base_dir=None):
    """Every policy on a small synthetic instance (feasibility coverage)."""
    if base_dir is None:
        base_dir = tempfile.mkdtemp(prefix="smallruns_")
    from pathlib import Path

    base = Path(base_dir)
    gen = {"n_types": 5, "n_resources": 4, "max_assortment_size": 2,
           "duration_cap": 10, "xi": 0.25}
    saved_env = os.environ.pop(OUTPUT_DIR_ENV, None)
    results = {}
    try:
        for name in ("null", "greedy", "imwu", "osa"):
            policy = {"name": name}
            if name == "imwu":
                policy["delta"] = 0.1
            results[name] = run_experiment(_battery_config(
                base, name, gen, seeds, T, policy
            ))
    finally:
        if saved_env is not None:
            os.environ[OUTPUT_DIR_ENV] = saved_env
    return results


def feasibility_violations(results, capacities_by_label):
    worst = -np.inf
    count = 0
    for label, written in results.items():
        caps = capacities_by_label[label]
        for series in written["series_by_seed"].values():
            excess = series.occupancy - caps[None, :]
            worst = max(worst, float(excess.max()))
            count += int((excess > 0).sum())
    return count, worst


def check_feasibility(results, capacities_by_label):
    count, worst = feasibility_violations(results, capacities_by_label)
    return CheckResult(
        "hard-feasibility", count == 0,
        f"{count} violations, max excess {worst:.3e}",
    )


def _mean_final_gaps(written):
    gaps = [s.reward_gaps[-1] for s in written["series_by_seed"].values()]
    return np.mean(gaps, axis=0)


def _mean_final_normalized(written):
    vals = [s.normalized[-1] for s in written["series_by_seed"].values()]
    return float(np.mean(vals))


def check_capacity_monotonicity(results):
    g20 = _mean_final_gaps(results["imwu_xi20"])
    g200 = _mean_final_gaps(results["imwu_xi200"])
    binding = [i for i in range(len(g20)) if g20[i] > 0.0]
    ordering = all(g200[i] < g20[i] for i in binding)
    signs = (
        g20[0] < 0.0 and g200[0] < 0.0
        and all(g20[i] > 0.0 and g200[i] > 0.0 for i in (1, 2))
    )
    return CheckResult(
        "capacity-monotonicity", ordering and signs and bool(binding),
        f"final gaps xi=1/20 {np.round(g20, 4).tolist()} vs "
        f"xi=1/200 {np.round(g200, 4).tolist()}",
    )


def check_osa_convergence(results, rel_tol=0.10):
    nr_imwu = _mean_final_normalized(results["imwu_xi200"])
    nr_osa = _mean_final_normalized(results["osa_xi200"])
    rel = abs(nr_imwu - nr_osa) / abs(nr_osa)
    return CheckResult(
        "imwu-osa-convergence", rel <= rel_tol,
        f"iMWU {nr_imwu:.4f} vs OSA {nr_osa:.4f}, rel diff {rel:.3f}",
    )


def check_j_independence(results, j_sweep=(100, 400), abs_tol=0.05):
    labels = [f"imwu_xi200_J{J}" for J in j_sweep] + ["imwu_xi200"]
    finals = np.array([_mean_final_gaps(results[lbl]) for lbl in labels])
    # the revenue objective is slack (negative gap) and instance-dependent;
    # the qualitative near-identity claim concerns the binding sales gaps
    spread = finals[:, 1:].max(axis=0) - finals[:, 1:].min(axis=0)
    return CheckResult(
        "j-independence", float(spread.max()) < abs_tol,
        f"binding-gap spreads over |J| sweep {np.round(spread, 4).tolist()}",
    )


# ---------------------------------------------------------------------------
# Suite driver
# ---------------------------------------------------------------------------

def run_quick_checks():
    results = [
        check_gap_instance(),
        check_lemma2_sweep(),
        check_lemma1_dp(),
        check_mwu_regret(),
        check_strong_duality(),
        check_assortment_oracle(),
        check_colgen_equivalence(),
    ]
    small = small_run_battery()
    caps = {name: np.full(4, 4.0) for name in small}
    results.append(check_feasibility(small, caps))
    return results


def run_full_checks(T=10_000, n_seeds=10):
    results = run_quick_checks()
    battery = experiment_battery(T=T, n_seeds=n_seeds)
    caps = {}
    for label in battery:
        caps[label] = np.full(14, 20.0 if label == "imwu_xi20" else 200.0)
    results.append(check_feasibility(battery, caps))
    results.append(check_capacity_monotonicity(battery))
    results.append(check_osa_convergence(battery))
    results.append(check_j_independence(battery))
    return results


def run_suite(level):
    if level == "quick":
        return run_quick_checks()
    return run_full_checks()
