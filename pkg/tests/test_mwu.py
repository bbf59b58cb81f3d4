import math

import numpy as np
import pytest

from reusealloc.model import Bounds
from reusealloc.mwu import (
    EmptySampleWindow, kappa, learning_rate, mwu_regret_harness, regret_bound,
    virtual_mwu,
)


def test_kappa_argmax_and_tie_break():
    Wm = np.array([[0.0], [1.0], [1.0]])
    Vm = np.array([[0.0], [0.5], [0.5]])

    def means(j):
        return Wm, Vm

    # actions 1 and 2 tie; lowest index wins
    assert kappa(np.array([1.0]), np.array([0.5]), 0, means) == 1
    # all-zero weights: every score 0, lowest index (null) wins
    assert kappa(np.array([0.0]), np.array([0.0]), 0, means) == 0


def test_learning_rate_formula():
    assert learning_rate(4, 2.0, 4) == pytest.approx(
        math.sqrt(math.log(4)) / (2.0 * 2.0)
    )
    with pytest.raises(ValueError):
        learning_rate(0, 1.0, 2)


def test_virtual_mwu_hand_trace():
    # R = C = 1, gamma = 1, caps = [2] so the slack term is min(2, 1) = 1;
    # the oracle always returns w = 1, v = 1; lambda_hat = 0.5, eps_C = 0.
    bounds = Bounds(w_max=1.0, a_max=1.0, d_max=1, v_max=1.0, c_min=2.0)

    def kappa_fn(phi, psi, j):
        return 1, np.array([1.0]), np.array([1.0])

    weights = virtual_mwu([1, 1], 0.5, 0.0, bounds, [2.0], 1, kappa_fn)
    assert len(weights) == 2
    np.testing.assert_allclose(weights[0].phi, [0.5])
    np.testing.assert_allclose(weights[0].psi, [0.5])
    # after step 1: Gamma = 1 - 0.5 = 0.5, Xi = -1 + 1 = 0,
    # eta(2) = sqrt(log 2)/sqrt(2) -> softmax gives the frozen values below
    np.testing.assert_allclose(weights[1].phi, [0.42693863711271784], atol=1e-12)
    np.testing.assert_allclose(weights[1].psi, [0.573061362887282], atol=1e-12)
    for w in weights:
        w.validate()


def test_virtual_mwu_trace_continues():
    bounds = Bounds(w_max=1.0, a_max=1.0, d_max=1, v_max=1.0, c_min=2.0)

    def kappa_fn(phi, psi, j):
        return 1, np.array([1.0]), np.array([1.0])

    trace = []
    virtual_mwu([1, 1, 1], 0.5, 0.0, bounds, [2.0], 1, kappa_fn, trace=trace)
    # post-step-2 weights: Gamma = 1.0, eta(3) = sqrt(log 2 / 3)
    s, Gamma, Xi, phi, psi = trace[1]
    assert s == 2
    np.testing.assert_allclose(Gamma, [1.0])
    np.testing.assert_allclose(phi, [0.3820925980094094], atol=1e-12)


def test_virtual_mwu_ignores_outcomes_and_needs_samples():
    bounds = Bounds(w_max=1.0, a_max=1.0, d_max=1, v_max=1.0, c_min=1.0)
    with pytest.raises(EmptySampleWindow):
        virtual_mwu([], 0.5, 0.0, bounds, [1.0], 1, lambda *a: (0, 0, 0))


def test_virtual_mwu_slack_uses_min_of_cap_and_vmax():
    # caps = [10] with v_max = 2: slack must be 2, not 10
    bounds = Bounds(w_max=1.0, a_max=1.0, d_max=1, v_max=2.0, c_min=10.0)

    def kappa_fn(phi, psi, j):
        return 1, np.array([0.0]), np.array([0.0])

    trace = []
    virtual_mwu([1], 0.0, 0.0, bounds, [10.0], 1, kappa_fn, trace=trace)
    _, _, Xi, _, _ = trace[0]
    np.testing.assert_allclose(Xi, [2.0])


def test_regret_harness_single_coordinate():
    losses = np.array([[1.0], [2.0], [3.0]])
    per_coord, weighted = mwu_regret_harness(losses, 1.0)
    assert per_coord[0] == pytest.approx(2.0)
    assert weighted == pytest.approx(2.0)
    assert regret_bound(1, 3, 1.0) == 0.0


def test_regret_bound_formula():
    assert regret_bound(4, 100, 2.0) == pytest.approx(
        2 * 2.0 * math.sqrt(math.log(4) / 100)
    )


def test_regret_guarantee_random_sequences():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(2, 6))
        tau = int(rng.integers(4, 512))
        B = 2.0
        losses = rng.uniform(-B, B, size=(tau, n))
        per_coord, weighted = mwu_regret_harness(losses, B)
        assert per_coord.min() >= weighted - regret_bound(n, tau, B) - 1e-10
