"""Seeded synthetic MNL instance generator for the experiment harness.

Randomness is organized so that instances with the same seed but different
customer-type counts share everything for the common type prefix: a root
seed sequence spawns one child stream for the resource side (features,
prices) and one child per customer type (taste vectors and duration
distributions).  Capacities are uniform, set from the target ratio xi via
c = a_max / xi with a_max = 1.
"""

import json
from dataclasses import dataclass, asdict

import numpy as np

from .assortment import KpiConfig, MnlModel, MnlOutcomeModel
from .model import Instance


@dataclass
class GenParams:
    n_resources: int = 14
    n_types: int = 1000           # customer types; type 0 (no arrival) is extra
    max_assortment_size: int = 5
    feature_dim: int = 5
    price_low: float = 1.0
    price_high: float = 10.0
    duration_cap: int = 2000      # hard upper bound on any usage duration
    duration_support: int = 3     # support points per (product, type)
    xi: float = 1.0 / 200.0       # a_max / c_min target; capacities = 1/xi
    null_prob: float = 0.0        # arrival probability of the no-arrival type

    def validate(self):
        if not (0.0 < self.xi <= 1.0):
            raise ValueError("xi must lie in (0, 1]")
        if self.n_types < 1 or self.n_resources < 1:
            raise ValueError("need at least one customer type and resource")
        if self.duration_cap < 1 or self.duration_support < 1:
            raise ValueError("invalid duration parameters")
        if not (0.0 <= self.null_prob < 1.0):
            raise ValueError("null_prob must lie in [0, 1)")


def generate_synthetic_instance(params, seed):
    """Deterministically generate (Instance, MnlModel, KpiConfig) from seed."""
    params.validate()
    C, m = params.n_resources, params.feature_dim
    J = params.n_types + 1
    S = params.duration_support
    root = np.random.SeedSequence(seed)
    children = root.spawn(1 + params.n_types)
    rng_resources = np.random.default_rng(children[0])

    product_features = rng_resources.standard_normal((C, m)) / np.sqrt(m)
    prices = rng_resources.uniform(params.price_low, params.price_high, size=C)

    customer_features = np.zeros((C, J, m))
    duration_values = np.ones((C, J, S), dtype=int)
    duration_probs = np.zeros((C, J, S))
    duration_probs[:, :, 0] = 1.0
    raw_weights = np.zeros(J)
    for j in range(1, J):
        rng_j = np.random.default_rng(children[j])
        customer_features[:, j, :] = rng_j.standard_normal((C, m)) / np.sqrt(m)
        for i in range(C):
            vals = 1 + rng_j.choice(params.duration_cap, size=S, replace=False)
            probs = rng_j.dirichlet(np.ones(S))
            duration_values[i, j] = np.sort(vals)
            duration_probs[i, j] = probs[np.argsort(vals)]
        raw_weights[j] = rng_j.gamma(1.0)

    arrival_probs = raw_weights / raw_weights.sum() * (1.0 - params.null_prob)
    arrival_probs[0] = params.null_prob

    mnl = MnlModel(product_features, customer_features, prices)
    half = C // 2
    kpi = KpiConfig(
        sigma=np.array([(params.price_low + params.price_high) / 2.0, 1.0, 1.0]),
        category_1=tuple(range(half)),
        category_2=tuple(range(half, C)),
        max_assortment_size=params.max_assortment_size,
    )
    model = MnlOutcomeModel(mnl, kpi, duration_values, duration_probs)
    capacity = 1.0 / params.xi
    instance = Instance(
        n_rewards=3,
        n_resources=C,
        n_types=J,
        n_actions=model.n_actions,
        capacities=np.full(C, capacity),
        arrival_probs=arrival_probs,
        outcome_model=model,
    )
    return instance, mnl, kpi


def instance_to_record(params, seed, instance, mnl, kpi):
    """Serializable record capturing the generated instance exactly."""
    model = instance.outcome_model
    return {
        "kind": "mnl",
        "params": asdict(params),
        "seed": seed,
        "product_features": mnl.product_features.tolist(),
        "customer_features": mnl.customer_features.tolist(),
        "prices": mnl.prices.tolist(),
        "sigma": kpi.sigma.tolist(),
        "category_1": list(kpi.category_1),
        "category_2": list(kpi.category_2),
        "max_assortment_size": kpi.max_assortment_size,
        "duration_values": model.duration_values.tolist(),
        "duration_probs": model.duration_probs.tolist(),
        "capacities": instance.capacities.tolist(),
        "arrival_probs": instance.arrival_probs.tolist(),
    }


def save_mnl_instance(record, path):
    with open(path, "w") as fh:
        json.dump(record, fh, indent=1, sort_keys=True)
        fh.write("\n")


def record_to_instance(record):
    mnl = MnlModel(
        np.array(record["product_features"]),
        np.array(record["customer_features"]),
        np.array(record["prices"]),
    )
    kpi = KpiConfig(
        sigma=np.array(record["sigma"]),
        category_1=tuple(record["category_1"]),
        category_2=tuple(record["category_2"]),
        max_assortment_size=int(record["max_assortment_size"]),
    )
    model = MnlOutcomeModel(
        mnl, kpi, np.array(record["duration_values"]),
        np.array(record["duration_probs"]),
    )
    instance = Instance(
        n_rewards=3,
        n_resources=mnl.n_products,
        n_types=mnl.n_types,
        n_actions=model.n_actions,
        capacities=np.array(record["capacities"], dtype=float),
        arrival_probs=np.array(record["arrival_probs"], dtype=float),
        outcome_model=model,
    )
    return instance, mnl, kpi


def load_mnl_instance(path):
    with open(path) as fh:
        return record_to_instance(json.load(fh))
