import math

import numpy as np
import pytest

from reusealloc.checks import gap_instance
from reusealloc.model import Bounds, compute_bounds
from reusealloc.mwu import WeightVector
from reusealloc.policy import (
    GreedyPolicy, ImwuPolicy, InvalidDelta, NullPolicy, OsaPolicy,
    PhaseNotInitialized, PhaseSchedule, baseline_policies,
    empirical_distribution, error_params, estimate_lambda_hat,
    make_imwu_policy, osa_policy,
)
from reusealloc.simulator import run_episode


def _bounds(**kw):
    defaults = dict(w_max=1.0, a_max=1.0, d_max=4, v_max=1.0, c_min=1.0)
    defaults.update(kw)
    return Bounds(**defaults)


def test_phase_schedule_arithmetic():
    sched = PhaseSchedule(d_max=4)
    assert sched.tau(-1) == 4
    assert [sched.tau(q) for q in range(3)] == [8, 16, 32]
    assert sched.phase_of(4) == -1
    assert sched.phase_of(5) == 0
    assert sched.phase_of(8) == 0
    assert sched.phase_of(9) == 1
    assert sched.phase_length(1) == 8


def test_error_params_frozen_values():
    # gamma = 1, |I_r| = |I_c| = 2, delta = 0.1, tau = 1024 (d_max=4, q=8)
    bounds = _bounds()
    params = error_params(8, 0.1, bounds, 2, 2)
    assert params.eps_d == pytest.approx(0.48016139565996035, rel=1e-12)
    assert params.eps_a == pytest.approx(0.1646862561111213, rel=1e-12)
    assert params.eps_b == pytest.approx(
        2 * math.sqrt(math.log(20) / 1024), rel=1e-12
    )
    assert params.eps_d_bar == params.eps_d


def test_error_params_scalings():
    bounds = _bounds()
    a = error_params(2, 0.1, bounds, 2, 2)
    b = error_params(4, 0.1, bounds, 2, 2)  # tau quadrupled
    assert b.eps_b == pytest.approx(a.eps_b / 2)
    # delta -> 1: eps_C -> 0 through the first branch of the min
    c = error_params(2, 1 - 1e-12, bounds, 2, 2)
    assert c.eps_c == pytest.approx(0.0, abs=1e-5)
    # eps_C never exceeds w_max
    d = error_params(0, 1e-9, _bounds(d_max=1), 2, 2)
    assert d.eps_c == pytest.approx(1.0)


def test_error_params_monotone_in_tau():
    bounds = _bounds()
    # start where eps_C has dropped below its w_max cap
    prev = error_params(4, 0.1, bounds, 2, 2)
    for q in range(5, 11):
        cur = error_params(q, 0.1, bounds, 2, 2)
        assert cur.eps_a < prev.eps_a
        assert cur.eps_b < prev.eps_b
        assert cur.eps_c < prev.eps_c
        assert cur.eps_d < prev.eps_d
        prev = cur


def test_error_params_eta_matches_formula():
    bounds = _bounds(c_min=4.0)  # xi = 0.25
    params = error_params(1, 0.1, bounds, 2, 3)
    assert params.eta == pytest.approx(math.sqrt(0.25 * math.log(3 / 0.25)))


def test_invalid_delta():
    with pytest.raises(InvalidDelta):
        error_params(1, 0.0, _bounds(), 1, 1)
    with pytest.raises(InvalidDelta):
        error_params(1, 1.5, _bounds(), 1, 1)


def test_estimate_lambda_hat_cases():
    instance = gap_instance()
    model = instance.outcome_model
    w, v = model.mean_reward(), model.mean_volume()
    # all-null window: only the null type has mass, nothing earns reward
    assert estimate_lambda_hat([0, 0, 0], w, v, instance.capacities) == (
        pytest.approx(0.0, abs=1e-10)
    )
    # window of real arrivals reproduces the steady-state optimum
    assert estimate_lambda_hat([1, 1, 1, 1], w, v, instance.capacities) == (
        pytest.approx(0.75, abs=1e-9)
    )
    with pytest.raises(ValueError):
        estimate_lambda_hat([], w, v, instance.capacities)


def test_empirical_distribution():
    np.testing.assert_allclose(
        empirical_distribution([0, 1, 1, 0], 3), [0.5, 0.5, 0.0]
    )


def _stub_policy(n_actions=3, d_max=4, kappa_action=1):
    calls = {"kappa": [], "p_hat": []}

    def kappa_fn(phi, psi, j):
        calls["kappa"].append(j)
        return kappa_action, np.array([1.0]), np.array([0.5])

    def lambda_hat_fn(p_hat):
        calls["p_hat"].append(np.array(p_hat))
        return 0.5

    policy = ImwuPolicy(
        n_rewards=1, n_resources=1, n_types=3, n_actions=n_actions,
        capacities=[2.0], bounds=_bounds(d_max=d_max), delta=0.1,
        kappa_fn=kappa_fn, lambda_hat_fn=lambda_hat_fn,
    )
    return policy, calls


def test_warmup_phase_takes_lowest_nonnull_action():
    policy, _ = _stub_policy()
    rng = np.random.default_rng(0)
    for t in range(1, 5):
        assert policy.next_action(t, 1, None, rng) == 1


def test_phase_split_is_disjoint_halves():
    policy, calls = _stub_policy()
    rng = np.random.default_rng(0)
    arrivals = [1, 1, 2, 2]
    for t, j in enumerate(arrivals, start=1):
        policy.next_action(t, j, None, rng)
    policy.next_action(5, 1, None, rng)  # phase 0 boundary
    # virtual replay consumed exactly the first half [1, 1]
    assert calls["kappa"][:2] == [1, 1]
    # the estimation window was the second half [2, 2]
    np.testing.assert_allclose(calls["p_hat"][0], [0.0, 0.0, 1.0])


def test_odd_prefix_floor_split():
    policy, calls = _stub_policy(d_max=3)
    rng = np.random.default_rng(0)
    for t, j in enumerate([1, 2, 2], start=1):
        policy.next_action(t, j, None, rng)
    policy.next_action(4, 1, None, rng)
    assert calls["kappa"][:1] == [1]            # floor(3/2) = 1 sample
    np.testing.assert_allclose(calls["p_hat"][0], [0.0, 0.0, 1.0])


def test_phase_boundary_misuse_raises():
    policy, _ = _stub_policy()
    rng = np.random.default_rng(0)
    with pytest.raises(PhaseNotInitialized):
        policy.next_action(7, 1, None, rng)


def test_thinning_frequency():
    policy, _ = _stub_policy()
    rng = np.random.default_rng(1)
    for t, j in enumerate([1, 1, 2, 2], start=1):
        policy.next_action(t, j, None, rng)
    # drive many draws inside phase 0 without advancing the schedule
    policy._prepare_phase(0)
    keep = policy.keep_prob
    accepted = 0
    n = 10_000
    for _ in range(n):
        wv = policy.theta[int(rng.integers(len(policy.theta)))]
        k, _, _ = policy.kappa_fn(wv.phi, wv.psi, 1)
        accepted += rng.random() < keep
    assert abs(accepted / n - keep) < 0.02


def test_thinning_zero_hook_always_null():
    policy, _ = _stub_policy()
    rng = np.random.default_rng(2)
    for t, j in enumerate([1, 1, 2, 2], start=1):
        policy.next_action(t, j, None, rng)
    policy.next_action(5, 1, None, rng)
    policy.keep_prob = 0.0
    for t in range(6, 9):
        assert policy.next_action(t, 1, None, rng) == 0


def test_singleton_theta_is_deterministic():
    policy, _ = _stub_policy(d_max=2)
    rng = np.random.default_rng(3)
    policy.next_action(1, 1, None, rng)
    policy.next_action(2, 1, None, rng)
    policy.next_action(3, 1, None, rng)  # phase 0: tau_prev=2, half=1
    assert len(policy.theta) == 1


def test_non_anticipation_canary():
    instance = gap_instance()
    bounds = compute_bounds(instance)
    policy = make_imwu_policy(instance, bounds, 0.1)

    class Canary:
        def __getattr__(self, name):
            raise AssertionError("policy read the arrival distribution")

        def __getitem__(self, idx):
            raise AssertionError("policy read the arrival distribution")

    instance.arrival_probs = Canary()
    rng = np.random.default_rng(4)
    for t in range(1, 40):  # crosses several phase boundaries (d_max = 8)
        policy.next_action(t, 1, None, rng)


def test_imwu_runs_end_to_end_on_table_instance():
    instance = gap_instance()
    bounds = compute_bounds(instance)
    policy = make_imwu_policy(instance, bounds, 0.1)
    trajectory = run_episode(instance, policy, 200, seed=0, a_max=bounds.a_max)
    assert trajectory.occupancy_matrix().max() <= 4.0
    assert trajectory.cumulative_matrix()[-1, 0] > 0.0


def test_osa_mixture_probabilities():
    mixtures = {1: [(1, 1.0)]}
    policy = OsaPolicy(mixtures, eta_bar=0.25)
    rng = np.random.default_rng(5)
    draws = [policy.next_action(0, 1, None, rng) for _ in range(10_000)]
    rate = np.mean(np.array(draws) == 1)
    assert abs(rate - 0.8) < 0.02
    # unknown type -> always null
    assert policy.next_action(0, 2, None, rng) == 0


def test_osa_all_zero_support():
    policy = OsaPolicy({}, eta_bar=0.5)
    rng = np.random.default_rng(6)
    assert all(policy.next_action(0, 1, None, rng) == 0 for _ in range(10))


def test_osa_from_gap_instance():
    instance = gap_instance()
    bounds = compute_bounds(instance)
    policy = osa_policy(instance, bounds, eta_bar=0.25)
    actions, cum = policy.mixtures[1]
    assert actions == [1]
    assert cum[-1] == pytest.approx(1.0 / 1.25)


def test_baselines():
    instance = gap_instance()
    policies = baseline_policies()
    rng = np.random.default_rng(7)
    Wm, Vm = instance.outcome_model.means_for_type(1)
    assert policies["null"].next_action(1, 1, (Wm, Vm), rng) == 0
    # greedy picks the higher-reward long action on the gap instance
    assert policies["greedy"].next_action(1, 1, (Wm, Vm), rng) == 2
    zeros = (np.zeros_like(Wm), Vm)
    assert policies["greedy"].next_action(1, 1, zeros, rng) == 0


def test_null_policy_zero_reward():
    instance = gap_instance()
    trajectory = run_episode(instance, NullPolicy(), 50, seed=8)
    assert trajectory.cumulative_matrix()[-1, 0] == 0.0
