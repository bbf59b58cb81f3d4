"""Generic LP layer plus builders for the steady-state, sampled and
horizon-expanded benchmark programs and their duals, and column generation
for action sets too large to enumerate.

The solver contract is a thin boundary over scipy's HiGHS: every optimal
solve carries a strong-duality certificate (|primal - dual| <= 1e-6).
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

FEASIBILITY_TOL = 1e-8
DUALITY_TOL = 1e-6
REDUCED_COST_TOL = 1e-9
MAX_COLGEN_ITERS = 10_000
MAX_LP_E_COEFFICIENTS = 10_000_000


class LpError(RuntimeError):
    pass


class NumericalFailure(LpError):
    pass


class DimensionMismatch(LpError):
    pass


class TooLarge(LpError):
    pass


class OracleFailure(LpError):
    pass


@dataclass
class LinearProgram:
    """Sparse LP; `sense` defaults to max (duals built by build_dual are min)."""

    variables: list = field(default_factory=list)   # names; all vars >= 0
    objective: dict = field(default_factory=dict)   # var -> coefficient
    rows: list = field(default_factory=list)        # (label, {var: coef}, sense, rhs)
    sense: str = "max"

    def add_variable(self, name, objective=0.0):
        self.variables.append(name)
        if objective:
            self.objective[name] = objective

    def add_row(self, label, coeffs, sense, rhs):
        if sense not in ("<=", ">=", "=="):
            raise ValueError(f"bad row sense {sense!r}")
        self.rows.append((label, coeffs, sense, rhs))


@dataclass
class LpSolution:
    status: str                 # optimal | infeasible | unbounded
    optimum: float | None
    primal: dict                # var -> value
    dual: dict                  # row label -> value (see convention below)
    # dual convention: sum_r dual_r * rhs_r equals the optimum; for a max
    # program dual >= 0 on <= rows and dual <= 0 on >= rows.


def _to_arrays(lp):
    index = {name: i for i, name in enumerate(lp.variables)}
    if len(index) != len(lp.variables):
        raise DimensionMismatch("duplicate variable names")
    n = len(lp.variables)
    c = np.zeros(n)
    for name, coef in lp.objective.items():
        c[index[name]] = coef
    ub_rows, eq_rows = [], []
    data_ub, ri_ub, ci_ub, b_ub = [], [], [], []
    data_eq, ri_eq, ci_eq, b_eq = [], [], [], []
    for label, coeffs, sense, rhs in lp.rows:
        if sense == "==":
            r = len(b_eq)
            eq_rows.append((label, 1.0))
            for name, coef in coeffs.items():
                data_eq.append(coef)
                ri_eq.append(r)
                ci_eq.append(index[name])
            b_eq.append(rhs)
        else:
            sign = 1.0 if sense == "<=" else -1.0
            r = len(b_ub)
            ub_rows.append((label, sign))
            for name, coef in coeffs.items():
                data_ub.append(sign * coef)
                ri_ub.append(r)
                ci_ub.append(index[name])
            b_ub.append(sign * rhs)
    A_ub = sp.csr_matrix((data_ub, (ri_ub, ci_ub)), shape=(len(b_ub), n)) if b_ub else None
    A_eq = sp.csr_matrix((data_eq, (ri_eq, ci_eq)), shape=(len(b_eq), n)) if b_eq else None
    return index, c, A_ub, np.array(b_ub), ub_rows, A_eq, np.array(b_eq), eq_rows


_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


def solve_lp(lp):
    """Solve a LinearProgram; optimal results carry a duality certificate."""
    index, c, A_ub, b_ub, ub_rows, A_eq, b_eq, eq_rows = _to_arrays(lp)
    flip = -1.0 if lp.sense == "max" else 1.0
    res = linprog(
        flip * c,
        A_ub=A_ub, b_ub=b_ub if A_ub is not None else None,
        A_eq=A_eq, b_eq=b_eq if A_eq is not None else None,
        bounds=(0, None), method="highs", options=_HIGHS_OPTIONS,
    )
    if res.status == 2:
        return LpSolution("infeasible", None, {}, {})
    if res.status == 3:
        return LpSolution("unbounded", None, {}, {})
    if res.status != 0:
        raise NumericalFailure(f"LP solve failed: {res.message}")
    optimum = flip * res.fun
    primal = {name: float(res.x[i]) for name, i in index.items()}
    dual = {}
    dual_objective = 0.0
    pos = 0
    for (label, sign), marg in zip(ub_rows, res.ineqlin.marginals if A_ub is not None else []):
        # linprog reports marginals of its min problem against the transformed
        # rhs; undoing the objective flip and the >=-to-<= row flip gives the
        # shadow price of the original row, with sum(dual * rhs) = optimum.
        d = flip * marg * sign
        dual[label] = float(d)
        dual_objective += d * (sign * b_ub[pos])
        pos += 1
    pos = 0
    for (label, _), marg in zip(eq_rows, res.eqlin.marginals if A_eq is not None else []):
        d = flip * marg
        dual[label] = float(d)
        dual_objective += d * b_eq[pos]
        pos += 1
    _certify(lp, res, optimum, dual_objective, A_ub, b_ub, A_eq, b_eq)
    return LpSolution("optimal", float(optimum), primal, dual)


def _certify(lp, res, optimum, dual_objective, A_ub, b_ub, A_eq, b_eq):
    if A_ub is not None and len(b_ub):
        resid = float(np.max(A_ub @ res.x - b_ub, initial=0.0))
        if resid > FEASIBILITY_TOL:
            raise NumericalFailure(f"primal infeasibility residual {resid:.3e}")
    if A_eq is not None and len(b_eq):
        resid = float(np.max(np.abs(A_eq @ res.x - b_eq), initial=0.0))
        if resid > FEASIBILITY_TOL:
            raise NumericalFailure(f"primal equality residual {resid:.3e}")
    gap = abs(optimum - dual_objective)
    if gap > DUALITY_TOL * max(1.0, abs(optimum)):
        raise NumericalFailure(f"duality gap {gap:.3e}")


# ---------------------------------------------------------------------------
# Benchmark program builders
# ---------------------------------------------------------------------------

def _check_shapes(w, v, p, capacities):
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)
    p = np.asarray(p, dtype=float)
    capacities = np.asarray(capacities, dtype=float)
    if w.ndim != 3 or v.ndim != 3 or w.shape[1:] != v.shape[1:]:
        raise DimensionMismatch("mean arrays must be (R,J,K) and (C,J,K)")
    if p.shape[0] != w.shape[1] or capacities.shape[0] != v.shape[0]:
        raise DimensionMismatch("p / capacities do not match the mean arrays")
    return w, v, p, capacities


def build_lp_s(w, v, p, capacities):
    """Steady-state benchmark: variables y_{jk} and the max-min level lam."""
    w, v, p, capacities = _check_shapes(w, v, p, capacities)
    R, J, K = w.shape
    C = v.shape[0]
    lp = LinearProgram()
    lp.add_variable("lam", objective=1.0)
    for j in range(J):
        for k in range(K):
            lp.add_variable(f"y_{j}_{k}")
    for i in range(R):
        coeffs = {"lam": -1.0}
        for j in range(J):
            if p[j] == 0.0:
                continue
            for k in range(K):
                if w[i, j, k]:
                    coeffs[f"y_{j}_{k}"] = p[j] * w[i, j, k]
        lp.add_row(f"reward_{i}", coeffs, ">=", 0.0)
    for i in range(C):
        coeffs = {}
        for j in range(J):
            if p[j] == 0.0:
                continue
            for k in range(K):
                if v[i, j, k]:
                    coeffs[f"y_{j}_{k}"] = p[j] * v[i, j, k]
        lp.add_row(f"cap_{i}", coeffs, "<=", float(capacities[i]))
    for j in range(J):
        lp.add_row(f"type_{j}", {f"y_{j}_{k}": 1.0 for k in range(K)}, "<=", 1.0)
    return lp


def build_lp_rs(empirical_p, w, v, capacities):
    """Sampled variant: identical shape to the steady-state LP with p-hat."""
    return build_lp_s(w, v, empirical_p, capacities)


def build_lp_e(w, tail, p, capacities, T):
    """Horizon-expanded benchmark with per-step occupancy convolution rows.

    tail[i, j, k, s-1] = E[A_{ijk} 1(D_{ijk} >= s)], s = 1..d_max.
    """
    w = np.asarray(w, dtype=float)
    tail = np.asarray(tail, dtype=float)
    p = np.asarray(p, dtype=float)
    capacities = np.asarray(capacities, dtype=float)
    R, J, K = w.shape
    C, d_max = tail.shape[0], tail.shape[3]
    if T * C * J * K > MAX_LP_E_COEFFICIENTS:
        raise TooLarge("horizon-expanded LP would exceed the coefficient guard")
    lp = LinearProgram()
    lp.add_variable("lam", objective=1.0)
    for t in range(1, T + 1):
        for j in range(J):
            for k in range(K):
                lp.add_variable(f"x_{j}_{k}_{t}")
    for i in range(R):
        coeffs = {"lam": -float(T)}
        for t in range(1, T + 1):
            for j in range(J):
                if p[j] == 0.0:
                    continue
                for k in range(K):
                    if w[i, j, k]:
                        coeffs[f"x_{j}_{k}_{t}"] = p[j] * w[i, j, k]
        lp.add_row(f"reward_{i}", coeffs, ">=", 0.0)
    for i in range(C):
        for t in range(1, T + 1):
            coeffs = {}
            for tau in range(max(1, t - d_max + 1), t + 1):
                s = t - tau + 1  # units allocated at tau still occupied at t
                for j in range(J):
                    if p[j] == 0.0:
                        continue
                    for k in range(K):
                        coef = p[j] * tail[i, j, k, s - 1]
                        if coef:
                            coeffs[f"x_{j}_{k}_{tau}"] = coeffs.get(f"x_{j}_{k}_{tau}", 0.0) + coef
            lp.add_row(f"cap_{i}_{t}", coeffs, "<=", float(capacities[i]))
    for t in range(1, T + 1):
        for j in range(J):
            lp.add_row(
                f"type_{j}_{t}", {f"x_{j}_{k}_{t}": 1.0 for k in range(K)}, "<=", 1.0
            )
    return lp


def build_dual(kind, w, v, p, capacities, tail=None, T=None):
    """Explicit dual programs (min form) with variables (alpha, beta, rho)."""
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float) if v is not None else None
    p = np.asarray(p, dtype=float)
    capacities = np.asarray(capacities, dtype=float)
    R, J, K = w.shape
    C = capacities.shape[0]
    lp = LinearProgram(sense="min")
    if kind in ("LP-S", "LP-RS"):
        for i in range(C):
            lp.add_variable(f"alpha_{i}", objective=float(capacities[i]))
        for j in range(J):
            lp.add_variable(f"beta_{j}", objective=float(p[j]))
        for i in range(R):
            lp.add_variable(f"rho_{i}")
        for j in range(J):
            for k in range(K):
                coeffs = {f"beta_{j}": 1.0}
                for i in range(C):
                    if v[i, j, k]:
                        coeffs[f"alpha_{i}"] = v[i, j, k]
                for i in range(R):
                    if w[i, j, k]:
                        coeffs[f"rho_{i}"] = -w[i, j, k]
                lp.add_row(f"col_{j}_{k}", coeffs, ">=", 0.0)
        lp.add_row("normalize", {f"rho_{i}": 1.0 for i in range(R)}, ">=", 1.0)
        return lp
    if kind == "LP-E":
        if tail is None or T is None:
            raise DimensionMismatch("horizon-expanded dual needs tail and T")
        d_max = tail.shape[3]
        for i in range(C):
            for t in range(1, T + 1):
                lp.add_variable(f"alpha_{i}_{t}", objective=float(capacities[i]))
        for j in range(J):
            for t in range(1, T + 1):
                lp.add_variable(f"beta_{j}_{t}", objective=float(p[j]))
        for i in range(R):
            lp.add_variable(f"rho_{i}")
        for t in range(1, T + 1):
            for j in range(J):
                for k in range(K):
                    coeffs = {f"beta_{j}_{t}": 1.0}
                    for i in range(C):
                        for tau in range(t, min(t + d_max - 1, T) + 1):
                            coef = tail[i, j, k, tau - t]
                            if coef:
                                key = f"alpha_{i}_{tau}"
                                coeffs[key] = coeffs.get(key, 0.0) + coef
                    for i in range(R):
                        if w[i, j, k]:
                            coeffs[f"rho_{i}"] = -w[i, j, k]
                    lp.add_row(f"col_{j}_{k}_{t}", coeffs, ">=", 0.0)
        lp.add_row(
            "normalize", {f"rho_{i}": float(T) for i in range(R)}, ">=", 1.0
        )
        return lp
    raise ValueError(f"unsupported dual kind {kind!r}")


# ---------------------------------------------------------------------------
# Column generation
# ---------------------------------------------------------------------------

@dataclass
class ColgenResult:
    optimum: float
    columns: list          # (j, k, w_vec, v_vec)
    y: np.ndarray          # primal weights aligned with columns
    rho: np.ndarray        # reward-row prices (>= 0)
    alpha: np.ndarray      # resource-row prices (>= 0)
    beta: dict             # type -> price
    iterations: int


def _solve_master(columns, p, capacities, R, C, active_types):
    n = len(columns) + 1  # lam first
    c = np.zeros(n)
    c[0] = -1.0  # min form of max lam
    rows, cols, data, b_ub = [], [], [], []
    type_row = {}
    # reward rows (>= 0 flipped to <=): lam - sum p_j w_i y <= 0
    for i in range(R):
        r = len(b_ub)
        rows.append(r)
        cols.append(0)
        data.append(1.0)
        for idx, (j, k, wv, vv) in enumerate(columns):
            if wv[i]:
                rows.append(r)
                cols.append(idx + 1)
                data.append(-p[j] * wv[i])
        b_ub.append(0.0)
    for i in range(C):
        r = len(b_ub)
        for idx, (j, k, wv, vv) in enumerate(columns):
            if vv[i]:
                rows.append(r)
                cols.append(idx + 1)
                data.append(p[j] * vv[i])
        b_ub.append(float(capacities[i]))
    for j in active_types:
        r = len(b_ub)
        type_row[j] = r
        for idx, (jc, k, wv, vv) in enumerate(columns):
            if jc == j:
                rows.append(r)
                cols.append(idx + 1)
                data.append(1.0)
        b_ub.append(1.0)
    A = sp.csr_matrix((data, (rows, cols)), shape=(len(b_ub), n))
    res = linprog(c, A_ub=A, b_ub=b_ub, bounds=(0, None), method="highs",
                  options=_HIGHS_OPTIONS)
    if res.status != 0:
        raise NumericalFailure(f"column-generation master failed: {res.message}")
    marg = res.ineqlin.marginals
    rho = np.array([-marg[i] for i in range(R)])
    alpha = np.array([-marg[R + i] for i in range(C)])
    beta = {j: float(-marg[r]) for j, r in type_row.items()}
    return -res.fun, res.x, rho, alpha, beta


def solve_lp_s_colgen(p, capacities, n_rewards, pricing_oracle,
                      initial_columns=None):
    """Solve the steady-state LP by column generation.

    pricing_oracle(rho, alpha, types) yields, per type j, an action with its
    mean reward/volume vectors maximizing sum_i rho_i w_ijk - sum_i alpha_i
    v_ijk.  Terminates when no column prices out above 1e-9.
    """
    p = np.asarray(p, dtype=float)
    capacities = np.asarray(capacities, dtype=float)
    R, C = n_rewards, capacities.shape[0]
    active_types = np.flatnonzero(p > 0.0)
    columns = [(int(j), None, np.zeros(R), np.zeros(C)) for j in active_types]
    if initial_columns:
        columns.extend(initial_columns)
    seen = {(j, k) for j, k, _, _ in columns}
    optimum = 0.0
    for iteration in range(1, MAX_COLGEN_ITERS + 1):
        optimum, y, rho, alpha, beta = _solve_master(
            columns, p, capacities, R, C, active_types
        )
        try:
            priced = list(pricing_oracle(rho, alpha, active_types))
        except LpError:
            raise
        except Exception as exc:  # pricing callbacks are user-supplied
            raise OracleFailure(f"pricing oracle failed: {exc}") from exc
        if len(priced) != len(active_types):
            raise OracleFailure("pricing oracle returned wrong number of columns")
        added = False
        for j, (k, wv, vv) in zip(active_types, priced):
            reduced = p[j] * (rho @ wv - alpha @ vv) - beta[int(j)]
            if reduced > REDUCED_COST_TOL and (int(j), k) not in seen:
                columns.append((int(j), k, np.asarray(wv, float), np.asarray(vv, float)))
                seen.add((int(j), k))
                added = True
        if not added:
            return ColgenResult(float(optimum), columns, y[1:], rho, alpha,
                                beta, iteration)
    raise OracleFailure("column generation did not terminate")


def dense_pricing_oracle(w, v):
    """Pricing oracle by full enumeration of the action set (small K)."""
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)

    def oracle(rho, alpha, types):
        out = []
        for j in types:
            scores = rho @ w[:, j, :] - alpha @ v[:, j, :]
            k = int(np.argmax(scores))
            out.append((k, w[:, j, k], v[:, j, k]))
        return out

    return oracle


# ---------------------------------------------------------------------------
# Plain-text sparse dump/load (debugging aid)
# ---------------------------------------------------------------------------

def dump_lp(lp, path):
    with open(path, "w") as fh:
        fh.write(f"sense {lp.sense}\n")
        for name in lp.variables:
            fh.write(f"var {name}\n")
        for name, coef in lp.objective.items():
            fh.write(f"obj {name} {float(coef)!r}\n")
        for label, coeffs, sense, rhs in lp.rows:
            fh.write(f"row {label} {sense} {float(rhs)!r}\n")
            for name, coef in coeffs.items():
                fh.write(f"coef {label} {name} {float(coef)!r}\n")


def load_lp(path):
    lp = LinearProgram()
    rows = {}
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            tag = parts[0]
            if tag == "sense":
                lp.sense = parts[1]
            elif tag == "var":
                lp.add_variable(parts[1])
            elif tag == "obj":
                lp.objective[parts[1]] = float(parts[2])
            elif tag == "row":
                coeffs = {}
                rows[parts[1]] = coeffs
                lp.add_row(parts[1], coeffs, parts[2], float(parts[3]))
            elif tag == "coef":
                rows[parts[1]][parts[2]] = float(parts[3])
            else:
                raise ValueError(f"bad line in LP dump: {line!r}")
    return lp
