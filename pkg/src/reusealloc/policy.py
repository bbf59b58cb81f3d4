"""Phase-doubling MWU policy, the offline static baseline and trivial
baselines.

Phases are indexed q = -1, 0, 1, ...; the cumulative end time of phase q is
tau(q) = d_max * 2^(q+1), so phase q covers steps tau(q-1)+1 .. tau(q).  At
the start of phase q the policy replays the first half of all recorded
arrivals through the virtual MWU process and estimates the steady-state
optimum from the second half; the two windows are disjoint by construction.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import lp as lp_mod
from .mwu import kappa as generic_kappa  # noqa: F401  (re-exported oracle)
from .mwu import virtual_mwu


class InvalidDelta(ValueError):
    pass


class PhaseNotInitialized(RuntimeError):
    pass


@dataclass
class PhaseSchedule:
    d_max: int

    def tau(self, q):
        """Cumulative end time of phase q (q >= -1)."""
        return self.d_max * 2 ** (q + 1)

    def phase_of(self, t):
        if t <= self.d_max:
            return -1
        q = 0
        while self.tau(q) < t:
            q += 1
        return q

    def phase_length(self, q):
        return self.tau(q) - self.tau(q - 1) if q >= 0 else self.d_max


@dataclass
class ErrorParams:
    eps_a: float
    eps_b: float
    eps_c: float
    eps_d: float
    eps_d_bar: float
    eta: float


def error_params(q, delta, bounds, n_rewards, n_resources):
    """Phase-q error terms; all shrink like 1/sqrt(tau(q-1))."""
    if not (0.0 < delta < 1.0):
        raise InvalidDelta(f"delta must be in (0, 1), got {delta}")
    tau = bounds.d_max * 2 ** q  # length of the history prefix used, tau(q-1)
    gamma, c_min, w_max = bounds.gamma, bounds.c_min, bounds.w_max
    log_c = math.log(n_resources / delta)
    eps_a = (
        2.0 * math.sqrt(2.0 * gamma / (c_min * tau) * log_c)
        + 4.0 * gamma / (c_min * tau) * log_c
    )
    eps_b = 2.0 * w_max * math.sqrt(math.log(n_rewards / delta) / tau)
    log_d = math.log(1.0 / delta)
    eps_c = min(
        2.0 * w_max * (math.sqrt(2.0 * log_d / tau) + 2.0 * log_d / tau), w_max
    )
    eps_d = 8.0 * gamma * math.sqrt(
        math.log((n_rewards + n_resources) / delta) / tau
    )
    xi = bounds.xi
    eta = math.sqrt(max(0.0, xi * math.log(n_resources / xi)))
    return ErrorParams(eps_a, eps_b, eps_c, eps_d, eps_d / c_min, eta)


def empirical_distribution(window_types, n_types):
    counts = np.bincount(np.asarray(window_types, dtype=int), minlength=n_types)
    return counts / counts.sum()


def estimate_lambda_hat(second_half_types, w, v, capacities):
    """Empirical arrival frequencies -> optimum of the sampled LP."""
    if len(second_half_types) == 0:
        raise ValueError("estimation window is empty")
    p_hat = empirical_distribution(second_half_types, np.asarray(w).shape[1])
    program = lp_mod.build_lp_rs(p_hat, w, v, capacities)
    sol = lp_mod.solve_lp(program)
    if sol.status != "optimal":
        raise lp_mod.NumericalFailure(f"sampled LP status {sol.status}")
    return sol.optimum


def make_kappa_from_means(means_for_type):
    """Oracle closure over per-type mean arrays; ties to the lowest index."""

    def kappa_fn(phi, psi, j):
        Wm, Vm = means_for_type(j)
        k = int(np.argmax(Wm @ phi - Vm @ psi))
        return k, Wm[k], Vm[k]

    return kappa_fn


class ImwuPolicy:
    """The phase-doubling MWU policy.

    kappa_fn(phi, psi, j) -> (action, mean rewards, mean volumes).
    lambda_hat_fn(p_hat) -> optimum of the sampled steady-state LP.
    Neither closure may depend on the arrival distribution or the horizon.
    """

    def __init__(self, n_rewards, n_resources, n_types, n_actions, capacities,
                 bounds, delta, kappa_fn, lambda_hat_fn, null_action=0):
        if not (0.0 < delta < 1.0):
            raise InvalidDelta(f"delta must be in (0, 1), got {delta}")
        self.n_rewards = n_rewards
        self.n_resources = n_resources
        self.n_types = n_types
        self.n_actions = n_actions
        self.capacities = np.asarray(capacities, dtype=float)
        self.bounds = bounds
        self.delta = delta
        self.kappa_fn = kappa_fn
        self.lambda_hat_fn = lambda_hat_fn
        self.null_action = null_action
        self.schedule = PhaseSchedule(bounds.d_max)
        self.arrivals = []
        self.phase = -1
        self.theta = None
        self.lambda_hat = None
        self.params = None
        self.keep_prob = 1.0
        # lowest-index non-null action; phase -1 takes it whenever the
        # wrapper's gate admits a non-null proposal
        self.warmup_action = next(
            (k for k in range(n_actions) if k != null_action), null_action
        )

    def _prepare_phase(self, q):
        tau_prev = self.schedule.tau(q - 1)
        half = tau_prev // 2
        mwu_window = self.arrivals[:half]
        estimation_window = self.arrivals[half:tau_prev]
        p_hat = empirical_distribution(estimation_window, self.n_types)
        self.lambda_hat = self.lambda_hat_fn(p_hat)
        self.params = error_params(
            q, self.delta, self.bounds, self.n_rewards, self.n_resources
        )
        self.theta = virtual_mwu(
            mwu_window, self.lambda_hat, self.params.eps_c, self.bounds,
            self.capacities, self.n_rewards, self.kappa_fn,
        )
        self.keep_prob = 1.0 / (1.0 + self.params.eps_d_bar + self.params.eta)
        self.phase = q

    def next_action(self, t, j, means, rng):
        q = self.schedule.phase_of(t)
        if q >= 0 and q != self.phase:
            if t != self.schedule.tau(q - 1) + 1:
                raise PhaseNotInitialized(
                    f"step {t} entered phase {q} past its boundary"
                )
            self._prepare_phase(q)
        self.arrivals.append(j)
        if q == -1:
            return self.warmup_action
        if self.theta is None:
            raise PhaseNotInitialized("phase weights missing")
        wv = self.theta[int(rng.integers(len(self.theta)))]
        k_tilde, _, _ = self.kappa_fn(wv.phi, wv.psi, j)
        if rng.random() < self.keep_prob:
            return k_tilde
        return self.null_action


def make_imwu_policy(instance, bounds, delta):
    """Wire the MWU policy to a table-backed instance (means known a priori)."""
    model = instance.outcome_model
    w = model.mean_reward()
    v = model.mean_volume()
    kappa_fn = make_kappa_from_means(model.means_for_type)

    def lambda_hat_fn(p_hat):
        program = lp_mod.build_lp_rs(p_hat, w, v, instance.capacities)
        sol = lp_mod.solve_lp(program)
        if sol.status != "optimal":
            raise lp_mod.NumericalFailure(f"sampled LP status {sol.status}")
        return sol.optimum

    return ImwuPolicy(
        instance.n_rewards, instance.n_resources, instance.n_types,
        instance.n_actions, instance.capacities, bounds, delta,
        kappa_fn, lambda_hat_fn, null_action=instance.null_action,
    )


class OsaPolicy:
    """Offline static baseline: randomizes per the steady-state optimum,
    discounted by 1/(1 + eta_bar); knows the true arrival distribution."""

    def __init__(self, mixtures, eta_bar, null_action=0):
        # mixtures: type -> list of (action, probability) with sum <= 1
        self.eta_bar = eta_bar
        self.null_action = null_action
        self.mixtures = {}
        for j, pairs in mixtures.items():
            actions = [k for k, _ in pairs]
            probs = np.array([p for _, p in pairs]) / (1.0 + eta_bar)
            self.mixtures[j] = (actions, np.cumsum(probs))

    def next_action(self, t, j, means, rng):
        entry = self.mixtures.get(j)
        if entry is None:
            return self.null_action
        actions, cum = entry
        u = rng.random()
        idx = int(np.searchsorted(cum, u, side="right"))
        if idx >= len(actions):
            return self.null_action
        return actions[idx]


def osa_policy(instance, bounds, eta_bar=None):
    """Solve the steady-state LP with the true arrival distribution."""
    if eta_bar is None:
        eta_bar = math.sqrt(bounds.xi)
    model = instance.outcome_model
    w = model.mean_reward()
    v = model.mean_volume()
    program = lp_mod.build_lp_s(w, v, instance.arrival_probs, instance.capacities)
    sol = lp_mod.solve_lp(program)
    if sol.status != "optimal":
        raise lp_mod.NumericalFailure(f"steady-state LP status {sol.status}")
    mixtures = {}
    for j in range(instance.n_types):
        pairs = []
        for k in range(instance.n_actions):
            y = sol.primal.get(f"y_{j}_{k}", 0.0)
            if y > 1e-12 and k != instance.null_action:
                pairs.append((k, y))
        if pairs:
            mixtures[j] = pairs
    return OsaPolicy(mixtures, eta_bar, null_action=instance.null_action)


class NullPolicy:
    def __init__(self, null_action=0):
        self.null_action = null_action

    def next_action(self, t, j, means, rng):
        return self.null_action


class GreedyPolicy:
    """Myopic argmax of the summed mean rewards of the arriving type."""

    def next_action(self, t, j, means, rng):
        Wm, _ = means
        return int(np.argmax(Wm.sum(axis=1)))


def baseline_policies(null_action=0):
    return {"null": NullPolicy(null_action), "greedy": GreedyPolicy()}
