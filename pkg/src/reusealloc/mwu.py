"""Virtual multiplicative-weights process producing the dual price vectors,
the generic argmax oracle over mean outcomes, and a regret harness for the
underlying no-regret guarantee.
"""

import math
from dataclasses import dataclass

import numpy as np


class EmptySampleWindow(ValueError):
    pass


@dataclass
class WeightVector:
    """A point (phi, psi) on the simplex over reward + resource coordinates."""

    phi: np.ndarray
    psi: np.ndarray

    def validate(self):
        total = self.phi.sum() + self.psi.sum()
        assert abs(total - 1.0) <= 1e-12
        assert (self.phi >= 0).all() and (self.psi >= 0).all()


def kappa(phi, psi, j, means_for_type):
    """Price-weighted argmax over actions; ties go to the lowest index.

    means_for_type(j) must return (W_means (K, R), V_means (K, C)).
    """
    Wm, Vm = means_for_type(j)
    scores = Wm @ phi - Vm @ psi
    return int(np.argmax(scores))


def learning_rate(s, gamma, n):
    """Step-size sqrt(log n) / (gamma * sqrt(s))."""
    if s < 1:
        raise ValueError("virtual step index must be >= 1")
    return math.sqrt(math.log(n)) / (gamma * math.sqrt(s))


def _softmax_weights(Gamma, Xi, eta):
    # max-shift before exponentiation: the exponents grow linearly in s
    exponents = -eta * np.concatenate([Gamma, Xi])
    exponents -= exponents.max()
    e = np.exp(exponents)
    e /= e.sum()
    return e[: len(Gamma)].copy(), e[len(Gamma):].copy()


def virtual_mwu(type_samples, lambda_hat, eps_c, bounds, capacities,
                n_rewards, kappa_fn, trace=None):
    """Replay the recorded arrival types through the weight recursion.

    Returns the pre-update weight vectors visited at each virtual step, which
    together form the price set sampled from during the next phase.  Only
    arrival types are consumed; realized outcomes never enter.

    kappa_fn(phi, psi, j) must return (action, mean rewards (R,), mean
    volumes (C,)) for the chosen action.
    """
    samples = list(type_samples)
    if not samples:
        raise EmptySampleWindow("virtual process needs at least one arrival")
    capacities = np.asarray(capacities, dtype=float)
    R, C = n_rewards, capacities.shape[0]
    n = R + C
    gamma = bounds.gamma
    slack_cap = np.minimum(capacities, bounds.v_max)
    Gamma = np.zeros(R)
    Xi = np.zeros(C)
    phi = np.full(R, 1.0 / n)
    psi = np.full(C, 1.0 / n)
    weights = []
    for s, j in enumerate(samples, start=1):
        weights.append(WeightVector(phi.copy(), psi.copy()))
        _, w_jk, v_jk = kappa_fn(phi, psi, j)
        Gamma = Gamma + (w_jk - (lambda_hat - eps_c))
        Xi = Xi + (-v_jk + slack_cap)
        eta = learning_rate(s + 1, gamma, n)
        phi, psi = _softmax_weights(Gamma, Xi, eta)
        if trace is not None:
            trace.append((s, Gamma.copy(), Xi.copy(), phi.copy(), psi.copy()))
    return weights


def mwu_regret_harness(loss_sequence, B):
    """Run the softmax-weights recursion over an arbitrary loss sequence.

    Returns (per-coordinate average losses, weighted average loss); the
    no-regret guarantee asserts min_i avg_i >= weighted - 2B sqrt(log n/tau).
    """
    losses = np.asarray(loss_sequence, dtype=float)
    tau, n = losses.shape
    cum = np.vstack([np.zeros(n), np.cumsum(losses, axis=0)[:-1]])
    steps = np.arange(1, tau + 1, dtype=float)
    if n > 1:
        eta = np.sqrt(math.log(n)) / (B * np.sqrt(steps))
    else:
        eta = np.zeros(tau)
    exponents = -eta[:, None] * cum
    exponents -= exponents.max(axis=1, keepdims=True)
    theta = np.exp(exponents)
    theta /= theta.sum(axis=1, keepdims=True)
    per_coordinate = losses.mean(axis=0)
    weighted = float((theta * losses).sum(axis=1).mean())
    return per_coordinate, weighted


def regret_bound(n, tau, B):
    return 2.0 * B * math.sqrt(math.log(n) / tau) if n > 1 else 0.0
