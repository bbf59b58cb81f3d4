"""Domain types for the reusable-resource allocation problem.

An instance bundles reward/resource/type/action index sets, capacities, the
arrival distribution and a finite-support outcome model.  Index 0 is reserved
for the null customer type and the null action throughout.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np


class InstanceError(ValueError):
    pass


class MalformedProbabilities(InstanceError):
    pass


class NonpositiveCapacity(InstanceError):
    pass


class MissingNullType(InstanceError):
    pass


class MissingNullAction(InstanceError):
    pass


class UnknownField(InstanceError):
    pass


class IndexOutOfRange(InstanceError):
    pass


@dataclass
class Outcome:
    """Realized (reward, allocation, duration) triple for one decision."""

    rewards: np.ndarray      # shape (n_rewards,)
    allocations: np.ndarray  # shape (n_resources,)
    durations: np.ndarray    # shape (n_resources,), integer time steps

    def is_zero(self):
        return (
            not self.rewards.any()
            and not self.allocations.any()
            and not self.durations.any()
        )


class TableOutcomeModel:
    """Finite-support joint outcome distributions, one table per (type, action).

    Each table row is (probability, W-vector, A-vector, D-vector).  Means and
    duration-tail expectations E[A * 1(D >= s)] are exactly computable, which
    keeps the LP builders and the DP oracle honest.
    """

    def __init__(self, n_rewards, n_resources, n_types, n_actions, tables):
        self.n_rewards = n_rewards
        self.n_resources = n_resources
        self.n_types = n_types
        self.n_actions = n_actions
        # tables: dict (j, k) -> (probs (S,), W (S,R), A (S,C), D (S,C))
        self.tables = {}
        for (j, k), (probs, W, A, D) in tables.items():
            probs = np.asarray(probs, dtype=float)
            W = np.atleast_2d(np.asarray(W, dtype=float))
            A = np.atleast_2d(np.asarray(A, dtype=float))
            D = np.atleast_2d(np.asarray(D, dtype=int))
            if abs(probs.sum() - 1.0) > 1e-12 or (probs < 0).any():
                raise MalformedProbabilities(
                    f"outcome table for ({j}, {k}) is not a distribution"
                )
            self.tables[(j, k)] = (probs, W, A, D)
        self._zero = (
            np.ones(1),
            np.zeros((1, n_rewards)),
            np.zeros((1, n_resources)),
            np.zeros((1, n_resources), dtype=int),
        )
        self._means_cache = {}

    def table(self, j, k):
        return self.tables.get((j, k), self._zero)

    def sample(self, rng, j, k):
        if not (0 <= j < self.n_types) or not (0 <= k < self.n_actions):
            raise IndexOutOfRange(f"type {j} / action {k} out of range")
        probs, W, A, D = self.table(j, k)
        row = int(rng.choice(len(probs), p=probs))
        return Outcome(W[row].copy(), A[row].copy(), D[row].copy())

    def means_for_type(self, j):
        """Mean rewards (K, R) and mean volumes v = E[A*D] (K, C) for type j."""
        if j in self._means_cache:
            return self._means_cache[j]
        Wm = np.zeros((self.n_actions, self.n_rewards))
        Vm = np.zeros((self.n_actions, self.n_resources))
        for k in range(self.n_actions):
            probs, W, A, D = self.table(j, k)
            Wm[k] = probs @ W
            Vm[k] = probs @ (A * D)
        self._means_cache[j] = (Wm, Vm)
        return Wm, Vm

    def mean_reward(self):
        """w_{ijk} as an array of shape (R, J, K)."""
        w = np.zeros((self.n_rewards, self.n_types, self.n_actions))
        for j in range(self.n_types):
            Wm, _ = self.means_for_type(j)
            w[:, j, :] = Wm.T
        return w

    def mean_volume(self):
        """v_{ijk} = E[A_{ijk} D_{ijk}] as an array of shape (C, J, K)."""
        v = np.zeros((self.n_resources, self.n_types, self.n_actions))
        for j in range(self.n_types):
            _, Vm = self.means_for_type(j)
            v[:, j, :] = Vm.T
        return v

    def mean_alloc(self):
        a = np.zeros((self.n_resources, self.n_types, self.n_actions))
        for (j, k), (probs, W, A, D) in self.tables.items():
            a[:, j, k] = probs @ A
        return a

    def mean_duration(self):
        d = np.zeros((self.n_resources, self.n_types, self.n_actions))
        for (j, k), (probs, W, A, D) in self.tables.items():
            d[:, j, k] = probs @ D
        return d

    def duration_tail(self, d_max):
        """E[A_{ijk} 1(D_{ijk} >= s)] as an array of shape (C, J, K, d_max)."""
        tail = np.zeros((self.n_resources, self.n_types, self.n_actions, d_max))
        for (j, k), (probs, W, A, D) in self.tables.items():
            for s in range(1, d_max + 1):
                tail[:, j, k, s - 1] = probs @ (A * (D >= s))
        return tail

    def support_maxima(self):
        w_max = a_max = 0.0
        d_max = 0
        for probs, W, A, D in self.tables.values():
            if W.size:
                w_max = max(w_max, float(W.max(initial=0.0)))
            if A.size:
                a_max = max(a_max, float(A.max(initial=0.0)))
            if D.size:
                d_max = max(d_max, int(D.max(initial=0)))
        return w_max, a_max, d_max


@dataclass
class Bounds:
    """Support bounds and the derived quantities gamma and xi."""

    w_max: float
    a_max: float
    d_max: int
    v_max: float
    c_min: float
    gamma: float = field(init=False)
    xi: float = field(init=False)
    assumption_ok: bool = field(init=False)

    def __post_init__(self):
        self.gamma = max(self.w_max, self.v_max)
        self.xi = self.a_max / self.c_min
        # capacity assumption: xi * log(|I_c| / xi) <= 1; |I_c| is attached by
        # compute_bounds via assumption_check, default uses xi alone
        self.assumption_ok = True

    def check_assumption(self, n_resources):
        value = self.xi * math.log(n_resources / self.xi)
        self.assumption_ok = value <= 1.0
        return self.assumption_ok


@dataclass
class Instance:
    n_rewards: int
    n_resources: int
    n_types: int
    n_actions: int
    capacities: np.ndarray
    arrival_probs: np.ndarray
    outcome_model: object
    null_type: int = 0
    null_action: int = 0
    horizon_hint: int | None = None
    declared_bounds: dict | None = None

    def __post_init__(self):
        self.capacities = np.asarray(self.capacities, dtype=float)
        self.arrival_probs = np.asarray(self.arrival_probs, dtype=float)
        if (self.arrival_probs < 0).any() or abs(self.arrival_probs.sum() - 1.0) > 1e-12:
            raise MalformedProbabilities("arrival_probs must lie on the simplex")
        if (self.capacities <= 0).any():
            raise NonpositiveCapacity("capacities must be strictly positive")


def _require_zero_outcomes(model, null_type, null_action):
    for (j, k), (probs, W, A, D) in model.tables.items():
        if j == null_type or k == null_action:
            if W.any() or A.any() or D.any():
                raise InstanceError(
                    f"null type/action outcome for ({j}, {k}) must be all zero"
                )


_SPEC_FIELDS = {
    "kind", "n_rewards", "n_resources", "n_types", "n_actions",
    "capacities", "arrival_probs", "null_type", "null_action",
    "horizon_hint", "bounds", "outcomes",
}


def build_instance(spec):
    """Validate an instance-description record (dict) into an Instance."""
    unknown = set(spec) - _SPEC_FIELDS
    if unknown:
        raise UnknownField(f"unknown instance fields: {sorted(unknown)}")
    if spec.get("null_type") is None:
        raise MissingNullType("instance must designate a null type")
    if spec.get("null_action") is None:
        raise MissingNullAction("instance must designate a null action")
    n_rewards = int(spec["n_rewards"])
    n_resources = int(spec["n_resources"])
    n_types = int(spec["n_types"])
    n_actions = int(spec["n_actions"])
    tables = {}
    for entry in spec.get("outcomes", []):
        j, k = int(entry["type"]), int(entry["action"])
        if not (0 <= j < n_types) or not (0 <= k < n_actions):
            raise IndexOutOfRange(f"outcome entry ({j}, {k}) out of range")
        probs, Ws, As, Ds = [], [], [], []
        for row in entry["rows"]:
            p, W, A, D = row
            probs.append(p)
            Ws.append(W)
            As.append(A)
            Ds.append(D)
        tables[(j, k)] = (probs, Ws, As, Ds)
    model = TableOutcomeModel(n_rewards, n_resources, n_types, n_actions, tables)
    null_type = int(spec["null_type"])
    null_action = int(spec["null_action"])
    _require_zero_outcomes(model, null_type, null_action)
    return Instance(
        n_rewards=n_rewards,
        n_resources=n_resources,
        n_types=n_types,
        n_actions=n_actions,
        capacities=spec["capacities"],
        arrival_probs=spec["arrival_probs"],
        outcome_model=model,
        null_type=null_type,
        null_action=null_action,
        horizon_hint=spec.get("horizon_hint"),
        declared_bounds=spec.get("bounds"),
    )


def load_instance(path):
    with open(path) as fh:
        return build_instance(json.load(fh))


def save_instance_spec(spec, path):
    with open(path, "w") as fh:
        json.dump(spec, fh, indent=1, sort_keys=True)
        fh.write("\n")


def sample_arrival(rng, p):
    """Draw a type index from the arrival distribution p."""
    p = np.asarray(p, dtype=float)
    if (p < 0).any() or abs(p.sum() - 1.0) > 1e-12:
        raise MalformedProbabilities("arrival distribution must lie on the simplex")
    return int(rng.choice(len(p), p=p))


def sample_outcome(instance, rng, j, k):
    return instance.outcome_model.sample(rng, j, k)


def mean_outcomes_for_type(instance, j):
    """The (w_jk, v_jk) means revealed to policies on a type-j arrival."""
    if not (0 <= j < instance.n_types):
        raise IndexOutOfRange(f"type {j} out of range")
    return instance.outcome_model.means_for_type(j)


def compute_bounds(instance):
    """Derive Bounds (incl. gamma, xi and the capacity-assumption flag)."""
    model = instance.outcome_model
    declared = instance.declared_bounds or {}
    if hasattr(model, "support_maxima"):
        w_sup, a_sup, d_sup = model.support_maxima()
    else:
        w_sup, a_sup, d_sup = model.w_max, model.a_max, model.d_max
    w_max = float(declared.get("w_max", w_sup))
    a_max = float(declared.get("a_max", a_sup))
    d_max = int(declared.get("d_max", d_sup))
    if hasattr(model, "v_max"):
        v_sup = float(model.v_max)
    else:
        v_sup = float(model.mean_volume().max(initial=0.0))
    v_max = float(declared.get("v_max", v_sup))
    bounds = Bounds(
        w_max=w_max,
        a_max=a_max,
        d_max=max(d_max, 1),
        v_max=v_max,
        c_min=float(instance.capacities.min()),
    )
    bounds.check_assumption(instance.n_resources)
    return bounds


def episode_streams(seed):
    """Named, non-overlapping random streams for one episode."""
    ss = np.random.SeedSequence(seed)
    arrivals, outcomes, policy = ss.spawn(3)
    return {
        "arrivals": np.random.default_rng(arrivals),
        "outcomes": np.random.default_rng(outcomes),
        "policy": np.random.default_rng(policy),
    }
