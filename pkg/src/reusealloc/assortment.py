"""Assortment application layer.

Multinomial-logit choice over offered product sets, a three-objective KPI
reward map (revenue plus two category sales counts), the LP-backed
assortment optimization oracle, and an outcome model that exposes the whole
thing through the same interface as the table-backed model.

Actions are assortments: action 0 is the empty offer (the null action) and
action k >= 1 is a fixed subset of products of size <= n.  Products are
identified with resources (selling product i occupies one unit of resource
i for a random duration).
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.optimize import linprog

from .model import Outcome


class ItemNotOffered(ValueError):
    pass


class FractionalSolution(RuntimeError):
    pass


class AssortmentLpFailure(RuntimeError):
    pass


class MnlModel:
    """Utilities u_{ij} = exp(b_{ij} . f_i) for product i, customer type j.

    Type 0 is the no-arrival placeholder; its utilities are forced to zero
    so an empty step can never purchase anything.
    """

    def __init__(self, product_features, customer_features, prices):
        self.product_features = np.asarray(product_features, dtype=float)  # (C, m)
        self.customer_features = np.asarray(customer_features, dtype=float)  # (C, J, m)
        self.prices = np.asarray(prices, dtype=float)  # (C,)
        C, J, m = self.customer_features.shape
        if self.product_features.shape != (C, m) or self.prices.shape != (C,):
            raise ValueError("feature/price dimensions disagree")
        self.n_products = C
        self.n_types = J
        # u[i, j] = exp(b_ij . f_i)
        self.utilities = np.exp(
            np.einsum("ijm,im->ij", self.customer_features, self.product_features)
        )
        self.utilities[:, 0] = 0.0
        if not np.isfinite(self.utilities).all():
            raise ValueError("utilities must be finite")


@dataclass
class KpiConfig:
    """Normalizers and the two-category product partition for |I_r| = 3."""

    sigma: np.ndarray          # (3,) positive
    category_1: tuple          # resource indices
    category_2: tuple
    max_assortment_size: int

    def __post_init__(self):
        self.sigma = np.asarray(self.sigma, dtype=float)
        self.category_1 = tuple(sorted(self.category_1))
        self.category_2 = tuple(sorted(self.category_2))
        if (self.sigma <= 0).any() or len(self.sigma) != 3:
            raise ValueError("sigma must be 3 positive normalizers")
        if set(self.category_1) & set(self.category_2):
            raise ValueError("categories must be disjoint")

    def membership(self, n_products):
        if set(self.category_1) | set(self.category_2) != set(range(n_products)):
            raise ValueError("categories must cover all products")
        m1 = np.zeros(n_products)
        m2 = np.zeros(n_products)
        m1[list(self.category_1)] = 1.0
        m2[list(self.category_2)] = 1.0
        return m1, m2


def mnl_choice_prob(model, j, assortment, i):
    """q_{ijk} for i in the assortment, or the no-purchase mass for i=None."""
    members = list(assortment)
    denom = 1.0 + float(model.utilities[members, j].sum()) if members else 1.0
    if i is None:
        return 1.0 / denom
    if i not in members:
        raise ItemNotOffered(f"product {i} is not in the offered set")
    return float(model.utilities[i, j]) / denom


def sample_choice(rng, model, j, assortment):
    """Draw a purchase from the offered set; returns a product index or None."""
    members = list(assortment)
    if not members:
        return None
    u = model.utilities[members, j]
    denom = 1.0 + u.sum()
    r = rng.random() * denom
    acc = 0.0
    for i, ui in zip(members, u):
        acc += ui
        if r < acc:
            return i
    return None


def kpi_rewards(allocations, prices, kpi):
    """(revenue/sigma_1, category-1 sales/sigma_2, category-2 sales/sigma_3)."""
    A = np.asarray(allocations, dtype=float)
    m1, m2 = kpi.membership(len(A))
    return np.array([
        float(prices @ A) / kpi.sigma[0],
        float(m1 @ A) / kpi.sigma[1],
        float(m2 @ A) / kpi.sigma[2],
    ])


def enumerate_action_assortments(n_products, max_size):
    """Action index -> product subset; index 0 is the empty offer."""
    actions = [()]
    for size in range(1, max_size + 1):
        actions.extend(combinations(range(n_products), size))
    return actions


def assortment_oracle(utilities, coefficients, n):
    """Best assortment of size <= n for linear coefficients rho.

    Solves max sum_i rho_i z_i subject to sum_i z_i + z_0 = 1,
    sum_i z_i / u_i <= n z_0, 0 <= z_i / u_i <= z_0, then reads the offered
    set off the (integral) optimal vertex.  Returns (assortment, objective).
    """
    u = np.asarray(utilities, dtype=float)
    rho = np.asarray(coefficients, dtype=float)
    m = len(u)
    if (rho <= 0).all():
        return (), 0.0
    # variables: z_0, z_1..z_m
    c = np.concatenate([[0.0], -rho])
    A_eq = np.ones((1, m + 1))
    b_eq = np.array([1.0])
    A_ub = np.zeros((m + 1, m + 1))
    A_ub[0, 0] = -float(n)
    A_ub[0, 1:] = 1.0 / u
    for i in range(m):
        A_ub[i + 1, 0] = -1.0
        A_ub[i + 1, i + 1] = 1.0 / u[i]
    b_ub = np.zeros(m + 1)
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=(0, None), method="highs")
    if res.status != 0:
        raise AssortmentLpFailure(f"assortment LP failed: {res.message}")
    z0 = res.x[0]
    z = res.x[1:]
    ratios = z / u
    offered = ratios > 1e-9
    # the MNL polytope has integral vertices: each z_i/u_i is 0 or z_0
    if (np.minimum(ratios, np.abs(ratios - z0)) > 1e-6 * max(z0, 1.0)).any():
        raise FractionalSolution("assortment LP returned a fractional vertex")
    assortment = tuple(np.nonzero(offered)[0])
    return assortment, float(-res.fun)


class MnlOutcomeModel:
    """Outcome model induced by MNL choice + per-(product, type) durations.

    duration_values/duration_probs have shape (C, J, S): the usage duration
    of product i sold to type j is drawn from this finite distribution,
    independent of the purchase decision.
    """

    def __init__(self, mnl, kpi, duration_values, duration_probs, actions=None):
        self.mnl = mnl
        self.kpi = kpi
        self.duration_values = np.asarray(duration_values, dtype=int)
        self.duration_probs = np.asarray(duration_probs, dtype=float)
        if self.duration_values.shape != self.duration_probs.shape:
            raise ValueError("duration tables must share a shape")
        if (np.abs(self.duration_probs.sum(axis=2) - 1.0) > 1e-9).any():
            raise ValueError("duration distributions must sum to one")
        if actions is None:
            actions = enumerate_action_assortments(
                mnl.n_products, kpi.max_assortment_size
            )
        self.actions = actions
        self.n_rewards = 3
        self.n_resources = mnl.n_products
        self.n_types = mnl.n_types
        self.n_actions = len(actions)
        # mean duration per (product, type)
        self.mean_durations = (self.duration_values * self.duration_probs).sum(axis=2)
        # membership matrix over actions, and the per-purchase reward vectors
        M = np.zeros((self.n_actions, self.n_resources))
        for k, members in enumerate(actions):
            M[k, list(members)] = 1.0
        self.membership_matrix = M
        m1, m2 = kpi.membership(self.n_resources)
        self.reward_per_product = np.stack([
            mnl.prices / kpi.sigma[0], m1 / kpi.sigma[1], m2 / kpi.sigma[2]
        ])  # (3, C)
        self._means = lru_cache(maxsize=128)(self._means_uncached)

    # -- interface shared with the table-backed model -----------------------

    def means_for_type(self, j):
        return self._means(int(j))

    def _means_uncached(self, j):
        Q = self.choice_matrix(j)                       # (K, C)
        Wm = Q @ self.reward_per_product.T              # (K, 3)
        Vm = Q * self.mean_durations[:, j][None, :]     # (K, C)
        return Wm, Vm

    def choice_matrix(self, j):
        """q_{ijk} over all actions k and products i, shape (K, C)."""
        u = self.mnl.utilities[:, j]
        M = self.membership_matrix
        denom = 1.0 + M @ u
        return (M * u[None, :]) / denom[:, None]

    def sample(self, rng, j, k):
        members = self.actions[k]
        zero = Outcome(
            np.zeros(self.n_rewards), np.zeros(self.n_resources),
            np.zeros(self.n_resources, dtype=int),
        )
        if not members or j == 0:
            return zero
        choice = sample_choice(rng, self.mnl, j, members)
        if choice is None:
            return zero
        A = np.zeros(self.n_resources)
        A[choice] = 1.0
        D = np.zeros(self.n_resources, dtype=int)
        vals = self.duration_values[choice, j]
        probs = self.duration_probs[choice, j]
        D[choice] = int(rng.choice(vals, p=probs))
        W = self.reward_per_product[:, choice].copy()
        return Outcome(W, A, D)

    def mean_reward(self):
        w = np.zeros((self.n_rewards, self.n_types, self.n_actions))
        for j in range(self.n_types):
            Wm, _ = self.means_for_type(j)
            w[:, j, :] = Wm.T
        return w

    def mean_volume(self):
        v = np.zeros((self.n_resources, self.n_types, self.n_actions))
        for j in range(self.n_types):
            _, Vm = self.means_for_type(j)
            v[:, j, :] = Vm.T
        return v

    def duration_tail(self, d_max):
        """E[A 1(D >= s)] = q_{ijk} P(Duration_{ij} >= s), shape (C,J,K,d_max)."""
        steps = np.arange(1, d_max + 1)
        # P(Duration_ij >= s): (C, J, d_max)
        ge = (self.duration_values[:, :, :, None] >= steps[None, None, None, :])
        tail_prob = (self.duration_probs[:, :, :, None] * ge).sum(axis=2)
        tail = np.zeros((self.n_resources, self.n_types, self.n_actions, d_max))
        for j in range(self.n_types):
            Q = self.choice_matrix(j)  # (K, C)
            tail[:, j, :, :] = Q.T[:, :, None] * tail_prob[:, j, None, :]
        return tail

    def support_maxima(self):
        w_max = float(self.reward_per_product.max())
        a_max = 1.0
        d_max = int(self.duration_values.max(initial=0))
        return w_max, a_max, d_max

    @property
    def v_max(self):
        u = self.mnl.utilities
        q_single = u / (1.0 + u)  # best case: offered alone
        return float((q_single * self.mean_durations).max())


def mnl_kappa_coefficients(outcome_model, phi, psi, j):
    """Per-product weights rho_i = r_i phi_1/s_1 + phi'_i/s'_i - dbar_ij psi_i."""
    return (
        phi @ outcome_model.reward_per_product
        - outcome_model.mean_durations[:, j] * psi
    )


def make_mnl_kappa(outcome_model, use_lp=False):
    """Price-weighted argmax over assortment actions for the MWU policy.

    The default scores every action at once (exact, vectorized); use_lp
    routes through the assortment LP and maps the result back to its action
    index (requires the full size-<= n action set).
    """
    om = outcome_model
    index_of = {members: k for k, members in enumerate(om.actions)}
    n = om.kpi.max_assortment_size

    def column_means(j, k):
        u = om.mnl.utilities[:, j]
        row = om.membership_matrix[k]
        q = row * u / (1.0 + row @ u)
        return q @ om.reward_per_product.T, q * om.mean_durations[:, j]

    def kappa_enum(phi, psi, j):
        rho = mnl_kappa_coefficients(om, phi, psi, j)
        u = om.mnl.utilities[:, j]
        M = om.membership_matrix
        scores = (M @ (rho * u)) / (1.0 + M @ u)
        k = int(np.argmax(scores))
        return (k, *column_means(j, k))

    def kappa_lp(phi, psi, j):
        rho = mnl_kappa_coefficients(om, phi, psi, j)
        assortment, _ = assortment_oracle(om.mnl.utilities[:, j], rho, n)
        k = index_of[tuple(assortment)]
        return (k, *column_means(j, k))

    return kappa_lp if use_lp else kappa_enum


def make_mnl_pricing_oracle(outcome_model):
    """Batch pricing for column generation: best column per active type."""
    om = outcome_model
    M = om.membership_matrix

    def pricing(rho, alpha, types):
        out = []
        U = om.mnl.utilities[:, types]                        # (C, |types|)
        coef = (rho @ om.reward_per_product)[:, None] - (
            om.mean_durations[:, types] * alpha[:, None]
        )                                                     # (C, |types|)
        scores = (M @ (coef * U)) / (1.0 + M @ U)             # (K, |types|)
        best = np.argmax(scores, axis=0)
        for pos, j in enumerate(types):
            k = int(best[pos])
            u = om.mnl.utilities[:, j]
            row = M[k]
            q = row * u / (1.0 + row @ u)
            out.append((k, q @ om.reward_per_product.T, q * om.mean_durations[:, j]))
        return out

    return pricing
