"""Online fractional covering without upper bounds.

Each arriving row ``sum_i a_ih x_i >= 1`` is fixed by repeated multiplicative
+ additive raises of the variables in its support, weighted by how cheap each
variable is relative to the cheapest one (``d_ih = c_i / a_ih``).  The new
dual ``y_h`` is credited with ``d_min * t_h`` and, for every dual constraint
that has become too heavy, the oldest duals in that constraint are scaled
down.  The primal only ever increases; duals rise once and then only fall.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ConstraintRow, SparsityTracker, normalize_row

FEAS_EPS = 1e-12
REL_TOL = 1e-9


@dataclass
class DualRecord:
    """One dual variable together with the data its row produced.

    ``support`` maps variable index to the row coefficient (``a_ih`` for the
    plain solver, ``alpha_ih`` for generated knapsack-cover rows).
    """

    y: float
    d_m: float
    t: float
    support: dict[int, float]
    k_est: int

    @property
    def y_initial(self) -> float:
        return self.d_m * self.t


@dataclass
class ArrivalEvent:
    index: int
    t: int
    d_m: float
    k_est: int
    primal_delta: float
    dual_delta: float
    windows: list[tuple[int, float]]
    checks: dict[str, bool]

    def to_record(self) -> dict:
        return {
            "kind": "clp_arrival",
            "arrival": self.index,
            "t": self.t,
            "d_m": self.d_m,
            "k_est": self.k_est,
            "primal_delta": self.primal_delta,
            "dual_delta": self.dual_delta,
            "windows": [[i, r] for i, r in self.windows],
            "checks": dict(self.checks),
        }


@dataclass
class ClpState:
    costs: np.ndarray
    x: np.ndarray
    tracker: SparsityTracker
    duals: list[DualRecord] = field(default_factory=list)
    columns: list[list[int]] = field(default_factory=list)
    rows: list[ConstraintRow] = field(default_factory=list)
    events: list[ArrivalEvent] = field(default_factory=list)
    primal_cost: float = 0.0
    dual_total: float = 0.0

    @classmethod
    def fresh(cls, costs) -> "ClpState":
        costs = np.asarray(costs, dtype=float)
        n = len(costs)
        return cls(costs=costs, x=np.zeros(n), tracker=SparsityTracker(n),
                   columns=[[] for _ in range(n)])


def min_ratio(row: ConstraintRow, costs) -> tuple[int, float]:
    """Cheapest variable ``argmin_i c_i / a_i``; ties go to the lowest index."""
    best_i, best_d = -1, math.inf
    for i, a in row.entries:
        d = costs[i] / a
        if d < best_d:
            best_i, best_d = i, d
    return best_i, best_d


def primal_step(x, row: ConstraintRow, costs, k_est: int, delta: float = 1.0) -> np.ndarray:
    """One (optionally damped) update of the coordinates in the row's support.

    ``x_i <- (1 + delta*r_i) x_i + delta*r_i / (k a_i)`` with
    ``r_i = d_min / d_i``.  Returns a new array.
    """
    _, d_m = min_ratio(row, costs)
    out = np.array(x, dtype=float, copy=True)
    for i, a in row.entries:
        r = d_m * a / costs[i]
        out[i] = (1.0 + delta * r) * out[i] + delta * r / (k_est * a)
    return out


def lhs_of(duals: list[DualRecord], column: list[int], i: int, upto: int | None = None) -> float:
    return math.fsum(duals[j].support[i] * duals[j].y for j in column
                     if upto is None or j < upto)


def raise_and_decay(duals: list[DualRecord], columns: list[list[int]], costs,
                    h: int, log_k: int, damping: float = 1.0):
    """Set ``y_h`` and shrink the oldest duals of every overloaded constraint.

    ``damping`` multiplies ``d_min/d_ih`` in the decay factor (1 for the plain
    solver, ``min(1, t_h)`` for generated rows).  Returns the total amount
    removed from previous duals and the prefix-mass ratios
    ``sum_{P_i} coef*y / (c_i log k)`` of every constraint that was decayed.
    """
    rec = duals[h]
    rec.y = rec.d_m * rec.t
    removed = 0.0
    windows = []
    if rec.t == 0:
        return removed, windows
    for i, coef_h in rec.support.items():
        c_i = costs[i]
        col = columns[i]
        before = lhs_of(duals, col, i, upto=h)
        if before <= 10 * log_k * c_i:
            continue
        cap = 5 * log_k * c_i
        acc = 0.0
        prefix = []
        for j in col:
            if j >= h:
                break
            contrib = duals[j].support[i] * duals[j].y
            if acc + contrib > cap:
                break
            acc += contrib
            # zero duals (t_j = 0) never take part
            if duals[j].t > 0:
                prefix.append(j)
        factor = 1.0 - damping * rec.d_m * coef_h / c_i
        factor = max(factor, 0.0)
        for j in prefix:
            old = duals[j].y
            duals[j].y = factor * old
            removed += old - duals[j].y
        windows.append((i, acc / (c_i * log_k)))
    return removed, windows


def dual_update(state: ClpState, h: int) -> tuple[float, list[tuple[int, float]]]:
    rec = state.duals[h]
    removed, windows = raise_and_decay(state.duals, state.columns, state.costs, h,
                                       rec.k_est.bit_length() - 1)
    state.dual_total += rec.y - removed
    return rec.y - removed, windows


def arrive(state: ClpState, row: ConstraintRow) -> tuple[ClpState, ArrivalEvent]:
    """Process one arriving row in place; returns the state and its event."""
    row = normalize_row(row)
    state.tracker.observe_row(row)
    k = state.tracker.k_est
    log_k = state.tracker.log_k
    costs = state.costs
    h = len(state.duals)

    _, d_m = min_ratio(row, costs)
    x_old = state.x.copy()
    t = 0
    # the argmin variable doubles each step, so 2 log k steps always suffice;
    # the extra margin only guards against a bug turning into a hang
    while row.lhs(state.x) < 1.0 - FEAS_EPS and t <= 4 * log_k + 4:
        state.x = primal_step(state.x, row, costs, k)
        t += 1
    primal_delta = math.fsum(costs[i] * (state.x[i] - x_old[i]) for i in row.support)
    state.primal_cost += primal_delta

    rec = DualRecord(y=0.0, d_m=d_m, t=t, support=dict(row.entries), k_est=k)
    state.duals.append(rec)
    state.rows.append(row)
    dual_delta, windows = dual_update(state, h)
    for i in row.support:
        state.columns[i].append(h)

    checks = {
        "monotone": bool(np.all(state.x >= x_old)),
        "feasible": row.lhs(state.x) >= 1.0 - FEAS_EPS,
        "bound_t": t <= 2 * log_k,
        "value_primal": primal_delta <= 2 * t * d_m * (1 + REL_TOL),
        "inc_dual": all(a * d_m * t <= 2 * log_k * costs[i] * (1 + REL_TOL)
                        for i, a in row.entries),
        "well_def": all(3 - REL_TOL <= r <= 5 + REL_TOL for _, r in windows),
        "approx_dual": all(lhs_of(state.duals, state.columns[i], i)
                           <= 12 * log_k * costs[i] * (1 + REL_TOL) for i in row.support),
        "value_dual": dual_delta >= 0.5 * d_m * t * (1 - REL_TOL),
    }
    ev = ArrivalEvent(h, t, d_m, k, primal_delta, dual_delta, windows, checks)
    state.events.append(ev)
    return state, ev


@dataclass
class LemmaReport:
    checks: dict[str, bool]
    details: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def failures(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]


def check_lemmas(state: ClpState) -> LemmaReport:
    """Whole-state audit of the update-count, dual-feasibility and ratio bounds."""
    log_k = state.tracker.log_k
    costs = state.costs
    bound_t = all(d.t <= 2 * (d.k_est.bit_length() - 1) for d in state.duals)
    worst = 0.0
    for i, col in enumerate(state.columns):
        if col:
            worst = max(worst, lhs_of(state.duals, col, i) / costs[i])
    feasible = worst <= 12 * log_k * (1 + REL_TOL)
    dual_sum = math.fsum(d.y for d in state.duals)
    cost = float(np.dot(costs, state.x))
    ratio_ok = cost <= 4 * dual_sum * (1 + REL_TOL) + 1e-12
    windows_ok = all(ev.checks["well_def"] for ev in state.events)
    return LemmaReport(
        checks={"bound_t": bound_t, "approx_dual": feasible,
                "primal_vs_dual": ratio_ok, "well_def": windows_ok},
        details={"dual_factor": worst, "primal_cost": cost, "dual_total": dual_sum,
                 "log_k": log_k},
    )


def solve_online(costs, rows) -> ClpState:
    state = ClpState.fresh(costs)
    for r in rows:
        arrive(state, r)
    return state
