"""Online randomized rounding with alterations.

Every variable draws one uniform threshold ``rho_i``.  After each arrival
the fractional ``x`` is rounded to ``Z`` (zero below ``tau*rho_i``,
``ceil(x_i/tau)`` in the middle band, ``u_i`` once frozen), merged into the
monotone integral vector ``X``, and if the new row is still uncovered a
greedy covering-knapsack solution on the residual row is added on top.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .box import BoxState, arrive_box
from .clp import FEAS_EPS
from .core import ConstraintRow, InfeasibleError, SparsityTracker, normalize_row


class InfeasibleKnapsack(InfeasibleError):
    pass


def tau_for_ell(ell: int) -> float:
    return 1.0 / (8.0 * math.log2(max(ell, 2)))


def log_ell_tau(tracker: SparsityTracker) -> float:
    """Threshold policy ``1 / (8 log2 max(ell, 2))`` from the running column sparsity."""
    return tau_for_ell(tracker.ell_est)


def draw_rho(seed: int, i: int) -> float:
    # keyed by (seed, index) so draws do not depend on arrival order
    return float(np.random.default_rng([seed, i]).random())


def compute_Z(x, rho, tau: float, u) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=np.int64)
    rho = np.asarray(rho, dtype=float)
    mid = np.minimum(np.ceil(x / tau), u).astype(np.int64)
    return np.where(x >= tau * u, u, np.where(x >= tau * rho, mid, 0)).astype(np.int64)


def _ratio_greedy(costs, abar, bounds, allowed):
    W = {}
    cover = 0.0
    spent = 0.0
    for i in sorted(allowed, key=lambda i: (costs[i] / abar[i], i)):
        if cover >= 1.0 - FEAS_EPS:
            break
        need = math.ceil((1.0 - FEAS_EPS - cover) / abar[i])
        w = min(int(bounds[i]), max(need, 0))
        if w:
            W[i] = w
            cover += w * abar[i]
            spent += w * costs[i]
    if cover < 1.0 - FEAS_EPS:
        return None, math.inf
    return W, spent


def greedy_knapsack(costs, abar, bounds) -> np.ndarray:
    """Greedy integral cover of ``sum abar_i w_i >= 1`` with ``0 <= w <= bounds``.

    Items are taken in non-decreasing cost/coefficient order.  The ratio
    greedy is rerun once per distinct cost cap (only items no dearer than the
    cap are allowed) and the cheapest cover is kept: with the cap equal to
    the dearest item an optimum uses, the fractional part costs at most the
    optimum and the one overshooting unit at most the cap, giving a factor 2.
    Plain ratio greedy alone can be off by more than 2.
    """
    costs = np.asarray(costs, dtype=float)
    abar = np.asarray(abar, dtype=float)
    bounds = np.asarray(bounds, dtype=np.int64)
    if np.any(abar <= 0) or np.any(abar > 1 + 1e-15):
        raise ValueError("knapsack coefficients must lie in (0, 1]")
    if float(np.dot(abar, bounds)) < 1.0 - FEAS_EPS:
        raise InfeasibleKnapsack("items at their bounds cannot cover the demand")
    n = len(costs)
    best, best_cost = None, math.inf
    for cap in sorted(set(costs.tolist())):
        allowed = [i for i in range(n) if costs[i] <= cap]
        W, spent = _ratio_greedy(costs, abar, bounds, allowed)
        if W is not None and spent < best_cost:
            best, best_cost = W, spent
    out = np.zeros(n, dtype=np.int64)
    for i, w in best.items():
        out[i] = w
    return out


@dataclass
class Alteration:
    row: int
    raised: list[tuple[int, int]]
    cost: float

    def to_record(self) -> dict:
        return {"row": self.row, "raised": [[i, a] for i, a in self.raised], "cost": self.cost}


@dataclass
class IntegralState:
    costs: np.ndarray
    u: np.ndarray
    seed: int
    rho: np.ndarray
    seen: np.ndarray
    Z: np.ndarray
    X: np.ndarray
    alterations: list[Alteration] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    rows: list[ConstraintRow] = field(default_factory=list)

    @classmethod
    def fresh(cls, costs, upper_bounds, seed: int) -> "IntegralState":
        n = len(costs)
        return cls(costs=np.asarray(costs, dtype=float),
                   u=np.asarray(upper_bounds, dtype=np.int64), seed=int(seed),
                   rho=np.ones(n), seen=np.zeros(n, dtype=bool),
                   Z=np.zeros(n, dtype=np.int64), X=np.zeros(n, dtype=np.int64))


def advance(state: IntegralState, x_after, row: ConstraintRow, frozen, tau: float) -> dict:
    """Round after one arrival; returns the event record."""
    row = normalize_row(row)
    j = len(state.rows)
    state.rows.append(row)
    for i in row.support:
        if not state.seen[i]:
            state.rho[i] = draw_rho(state.seed, i)
            state.seen[i] = True
    frozen = np.asarray(frozen, dtype=bool)
    Z = compute_Z(x_after, state.rho, tau, state.u)
    assert np.all(Z[frozen] == state.u[frozen]), "frozen variable not rounded to its bound"
    X_prev = state.X
    Z_prev = state.Z
    X_new = np.maximum(X_prev, Z)
    altered = None
    if row.lhs(X_new) < 1.0 - FEAS_EPS:
        a_H = math.fsum(a * int(state.u[i]) for i, a in row.entries if frozen[i])
        assert a_H < 1.0, "uncovered row although its frozen variables cover it"
        b = 1.0 - a_H
        free = [(i, a) for i, a in row.entries if not frozen[i]]
        idx = [i for i, _ in free]
        W = greedy_knapsack(state.costs[idx], [min(1.0, a / b) for _, a in free], state.u[idx])
        raised = []
        for i, w in zip(idx, W):
            if w > X_new[i]:
                raised.append((i, int(w - X_new[i])))
                X_new[i] = w
        altered = Alteration(j, raised, math.fsum(state.costs[i] * d for i, d in raised))
        state.alterations.append(altered)
    state.X = X_new
    state.Z = Z
    checks = {
        "integral_in_bounds": bool(np.all((X_new >= 0) & (X_new <= state.u))),
        "monotone_X": bool(np.all(X_new >= X_prev)),
        "monotone_Z": bool(np.all(Z >= Z_prev)),
        "feasible": row.lhs(X_new) >= 1.0 - FEAS_EPS,
    }
    ev = {"kind": "rounding", "row": j, "tau": tau, "altered": altered is not None,
          "checks": checks}
    if altered is not None:
        ev["alteration"] = altered.to_record()
    state.events.append(ev)
    return ev


def cost_decomposition(state: IntegralState) -> tuple[float, float]:
    """Realized cost of the last rounded vector ``Z`` and of all alterations."""
    cost_Z = float(np.dot(state.costs, state.Z))
    return cost_Z, math.fsum(a.cost for a in state.alterations)


@dataclass
class CipRun:
    box: BoxState
    integral: IntegralState


def run_pipeline(costs, upper_bounds, rows, seed: int) -> CipRun:
    """Fractional box solver plus rounding, row by row."""
    box = BoxState.fresh(costs, upper_bounds, tau_policy=log_ell_tau)
    integral = IntegralState.fresh(costs, upper_bounds, seed)
    for r in rows:
        arrive_box(box, r)
        snap = box.snapshots[-1]
        advance(integral, snap.x, r, snap.frozen, snap.tau)
    return CipRun(box, integral)


def replay_rounding(box: BoxState, seed: int) -> IntegralState:
    """Round a finished fractional run with a fresh seed (reuses its snapshots)."""
    integral = IntegralState.fresh(box.costs, box.u, seed)
    for row, snap in zip(box.rows, box.snapshots):
        advance(integral, snap.x, row, snap.frozen, snap.tau)
    return integral
