"""Brute-force ground-truth oracles for tests.

Exact dynamic programming for the optimal non-anticipatory policy on tiny
single-objective instances, exhaustive assortment enumeration, and the
comparison between the horizon-expanded LP bound and the DP optimum.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from . import lp as lp_mod


class GuardViolation(ValueError):
    pass


class TooLarge(ValueError):
    pass


MAX_DP_STATES = 10_000_000
MAX_ENUMERATION = 1_000_000


@dataclass
class TinyInstanceGuard:
    """Size limits under which the DP state space stays enumerable."""

    max_horizon: int = 8
    max_capacity: int = 3
    max_duration: int = 3
    max_support: int = 3
    max_types: int = 3
    max_actions: int = 3

    def check(self, instance, T, d_max):
        if instance.n_rewards != 1:
            raise GuardViolation("exact DP supports a single reward objective")
        if T > self.max_horizon:
            raise GuardViolation(f"horizon {T} exceeds {self.max_horizon}")
        if instance.capacities.max() > self.max_capacity:
            raise GuardViolation("capacity exceeds the tiny-instance limit")
        if d_max > self.max_duration:
            raise GuardViolation("duration bound exceeds the tiny-instance limit")
        if instance.n_types > self.max_types or instance.n_actions > self.max_actions:
            raise GuardViolation("type/action counts exceed the tiny-instance limit")
        for probs, W, A, D in instance.outcome_model.tables.values():
            if len(probs) > self.max_support:
                raise GuardViolation("outcome support exceeds the tiny-instance limit")
        # per-resource occupancy profile: d_max buckets each holding 0..c units
        states_per_resource = (self.max_capacity + 1) ** max(d_max, 1)
        total = T * states_per_resource ** instance.n_resources
        if total > MAX_DP_STATES:
            raise GuardViolation(f"DP would visit ~{total} states")


@dataclass
class DpValue:
    value: float        # optimal E[total reward] / T
    action_map: dict    # (t, state) -> {arrival type: action}


def _profile_support(instance, j, k):
    """Outcome rows as (prob, reward, per-resource (units, duration)) tuples."""
    probs, W, A, D = instance.outcome_model.table(j, k)
    rows = []
    for r in range(len(probs)):
        alloc = tuple(
            (int(round(A[r, i])), int(D[r, i])) for i in range(instance.n_resources)
        )
        rows.append((float(probs[r]), float(W[r, 0]), alloc))
    return rows


def dp_opt_ipc(instance, T, d_max=None, guard=None):
    """Exact optimum of the hard-constrained dynamic problem, |I_r| = 1.

    State: per resource, a tuple of units releasing in 1, 2, ..., d_max
    steps.  An action is admissible only if every support outcome keeps all
    occupancies within capacity, matching what a non-anticipatory policy can
    guarantee before the outcome realizes.
    """
    if d_max is None:
        d_max = max(instance.outcome_model.support_maxima()[2], 1)
    (guard or TinyInstanceGuard()).check(instance, T, d_max)
    caps = [int(round(c)) for c in instance.capacities]
    C = instance.n_resources
    p = instance.arrival_probs
    support = {
        (j, k): _profile_support(instance, j, k)
        for j in range(instance.n_types)
        for k in range(instance.n_actions)
    }
    action_map = {}

    def admissible(state, rows):
        for _, _, alloc in rows:
            for i in range(C):
                units, dur = alloc[i]
                if units and dur >= 1 and sum(state[i]) + units > caps[i]:
                    return False
        return True

    def transition(state, alloc):
        nxt = []
        for i in range(C):
            buckets = list(state[i])
            units, dur = alloc[i]
            if units and dur >= 1:
                buckets[dur - 1] += units
            # one step elapses: the 1-step bucket releases
            nxt.append(tuple(buckets[1:]) + (0,))
        return tuple(nxt)

    @lru_cache(maxsize=None)
    def value(t, state):
        if t > T:
            return 0.0
        total = 0.0
        per_type = {}
        for j in range(instance.n_types):
            if p[j] == 0.0:
                continue
            best, best_k = None, None
            for k in range(instance.n_actions):
                rows = support[(j, k)]
                if not admissible(state, rows):
                    continue
                expect = 0.0
                for prob, reward, alloc in rows:
                    expect += prob * (reward + value(t + 1, transition(state, alloc)))
                if best is None or expect > best + 1e-15:
                    best, best_k = expect, k
            total += p[j] * best
            per_type[j] = best_k
        action_map[(t, state)] = per_type
        return total

    start = tuple((0,) * d_max for _ in range(C))
    opt = value(1, start)
    return DpValue(value=opt / T, action_map=action_map)


def enumerate_assortments(utilities, coefficients, n):
    """Exhaustive argmax of sum_i rho_i q_i over assortments of size <= n.

    utilities: u_i > 0 per product for the arriving type; coefficients:
    rho_i.  Returns (best assortment as a sorted tuple, objective).
    """
    u = np.asarray(utilities, dtype=float)
    rho = np.asarray(coefficients, dtype=float)
    m = len(u)
    n = min(n, m)
    count = sum(comb(m, size) for size in range(n + 1))
    if count > MAX_ENUMERATION:
        raise TooLarge(f"{count} assortments exceed the enumeration guard")
    best, best_k = 0.0, ()
    for size in range(1, n + 1):
        for k in itertools.combinations(range(m), size):
            idx = list(k)
            obj = float(rho[idx] @ u[idx]) / (1.0 + float(u[idx].sum()))
            if obj > best + 1e-15:
                best, best_k = obj, k
    return best_k, best


def verify_lemma1(instance, T, tol=1e-9):
    """Horizon-expanded LP optimum dominates the exact DP optimum."""
    dp = dp_opt_ipc(instance, T)
    model = instance.outcome_model
    d_max = max(model.support_maxima()[2], 1)
    program = lp_mod.build_lp_e(
        model.mean_reward(), model.duration_tail(d_max),
        instance.arrival_probs, instance.capacities, T,
    )
    sol = lp_mod.solve_lp(program)
    if sol.status != "optimal":
        raise lp_mod.NumericalFailure(f"horizon-expanded LP status {sol.status}")
    return sol.optimum >= dp.value - tol
