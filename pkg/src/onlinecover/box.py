"""Online fractional covering with box constraints and knapsack-cover rows.

The working vector ``x`` is never pushed past ``tau * u_i``.  A variable that
reaches that threshold is *frozen*: the reported solution ``x_bar`` treats it
as sitting at its upper bound ``u_i``.  Each arriving row is turned into one
or more residual knapsack-cover rows

    sum_{i in T} min(1, a_i / b) x_i >= 1,   b = 1 - sum_{frozen i} a_i u_i,

which are fed to the damped version of the plain online update.  A new
residual row is generated every time a variable freezes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .clp import FEAS_EPS, REL_TOL, DualRecord, lhs_of, raise_and_decay
from .core import ConstraintRow, InfeasibleError, SparsityTracker, normalize_row

DEFAULT_TAU = 1.0 / 8.0


@dataclass
class GeneratedConstraint(DualRecord):
    source_row: int = -1
    residual_b: float = 1.0
    steps: list[float] = field(default_factory=list)
    primal_delta: float = 0.0
    dual_delta: float = 0.0
    windows: list[tuple[int, float]] = field(default_factory=list)

    @property
    def alpha(self) -> dict[int, float]:
        return self.support

    def to_record(self, index: int, checks: dict[str, bool]) -> dict:
        return {
            "kind": "pprime",
            "h": index,
            "row": self.source_row,
            "b": self.residual_b,
            "t": self.t,
            "d_m": self.d_m,
            "k_est": self.k_est,
            "steps": list(self.steps),
            "primal_delta": self.primal_delta,
            "dual_delta": self.dual_delta,
            "windows": [[i, r] for i, r in self.windows],
            "checks": checks,
        }


@dataclass
class RowSnapshot:
    """State right after a row of the original program was handled."""

    row: int
    tau: float
    x: np.ndarray
    frozen: np.ndarray
    k_est: int
    ell_est: int
    pprime: list[int]


@dataclass
class KcCheck:
    row: int
    H: list[int]
    a_H: float
    lhs: float
    rhs: float
    vacuous: bool
    passed: bool

    def to_record(self) -> dict:
        return {"kind": "kc_witness", "row": self.row, "H": self.H, "a_H": self.a_H,
                "lhs": self.lhs, "rhs": self.rhs, "vacuous": self.vacuous,
                "passed": self.passed}


def constant_tau(tau: float = DEFAULT_TAU) -> Callable[[SparsityTracker], float]:
    return lambda tracker: tau


@dataclass
class BoxState:
    costs: np.ndarray
    u: np.ndarray
    x: np.ndarray
    frozen: np.ndarray
    tracker: SparsityTracker
    tau_policy: Callable[[SparsityTracker], float] = field(default_factory=constant_tau)
    pprime: list[GeneratedConstraint] = field(default_factory=list)
    columns: list[list[int]] = field(default_factory=list)
    rows: list[ConstraintRow] = field(default_factory=list)
    tau_log: list[float] = field(default_factory=list)
    snapshots: list[RowSnapshot] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    primal_cost: float = 0.0
    dual_total: float = 0.0

    @classmethod
    def fresh(cls, costs, upper_bounds, tau_policy=None) -> "BoxState":
        costs = np.asarray(costs, dtype=float)
        n = len(costs)
        st = cls(costs=costs, u=np.asarray(upper_bounds, dtype=np.int64),
                 x=np.zeros(n), frozen=np.zeros(n, dtype=bool),
                 tracker=SparsityTracker(n), columns=[[] for _ in range(n)])
        if tau_policy is not None:
            st.tau_policy = tau_policy
        return st

    @property
    def duals(self) -> list[GeneratedConstraint]:
        return self.pprime


def bar_x(state: BoxState) -> np.ndarray:
    """Reported solution: frozen coordinates at ``u_i``, others at ``x_i``."""
    return np.where(state.frozen, state.u.astype(float), state.x)


def _cap_ratios(x, cons: GeneratedConstraint, tau: float, u, k_est: int, costs) -> dict[int, float]:
    out = {}
    for i, alpha in cons.support.items():
        r = cons.d_m * alpha / costs[i]
        out[i] = (tau * u[i] - x[i]) / (r * (x[i] + 1.0 / (k_est * alpha)))
    return out


def max_delta(x, constraint: GeneratedConstraint, tau: float, u, k_est: int, costs) -> float:
    """Largest step in (0, 1] keeping every support variable at or below ``tau*u_i``."""
    caps = _cap_ratios(x, constraint, tau, u, k_est, costs)
    delta = min(1.0, min(caps.values()))
    assert delta > 0, "non-positive step: a variable at its threshold was not frozen"
    return delta


def _residual(row: ConstraintRow, frozen, u) -> tuple[list[int], float]:
    T = [i for i in row.support if not frozen[i]]
    b = 1.0 - math.fsum(a * int(u[i]) for i, a in row.entries if frozen[i])
    return T, b


def _generate(state: BoxState, j: int, row: ConstraintRow, T: list[int], b: float, k: int):
    coef = dict(row.entries)
    alpha = {i: min(1.0, coef[i] / b) for i in T}
    if alpha:
        d_m = min(state.costs[i] / alpha[i] for i in T)
    else:
        d_m = math.inf
    gc = GeneratedConstraint(y=0.0, d_m=d_m, t=0.0, support=alpha, k_est=k,
                             source_row=j, residual_b=b)
    state.pprime.append(gc)
    return gc


def dual_update_box(state: BoxState, h: int) -> float:
    gc = state.pprime[h]
    removed, windows = raise_and_decay(state.pprime, state.columns, state.costs, h,
                                       gc.k_est.bit_length() - 1, damping=min(1.0, gc.t))
    gc.windows = windows
    gc.dual_delta = gc.y - removed
    state.dual_total += gc.dual_delta
    for i in gc.support:
        state.columns[i].append(h)
    return gc.dual_delta


def _close_constraint(state: BoxState, h: int) -> dict:
    gc = state.pprime[h]
    if gc.t == 0:
        gc.d_m = 0.0 if math.isinf(gc.d_m) else gc.d_m
    dual_update_box(state, h)
    log_k = gc.k_est.bit_length() - 1
    steps_ok = all(s == 1.0 for s in gc.steps[:-1])
    checks = {
        "bound_t": gc.t <= 2 * log_k * (1 + REL_TOL),
        "step_structure": steps_ok,
        "value_primal": gc.primal_delta <= 2 * gc.t * gc.d_m * (1 + REL_TOL),
        "inc_dual": all(alpha * gc.d_m * gc.t <= 2 * log_k * state.costs[i] * (1 + REL_TOL)
                        for i, alpha in gc.support.items()),
        "well_def": all(3 - REL_TOL <= r <= 5 + REL_TOL for _, r in gc.windows),
        "approx_dual": all(lhs_of(state.pprime, state.columns[i], i)
                           <= 12 * log_k * state.costs[i] * (1 + REL_TOL) for i in gc.support),
        "value_dual": gc.dual_delta >= 0.5 * gc.d_m * gc.t * (1 - REL_TOL),
    }
    rec = gc.to_record(h, checks)
    state.events.append(rec)
    return rec


def _row_satisfied_by_bar(row: ConstraintRow, xb) -> bool:
    return row.lhs(xb) >= 1.0 - FEAS_EPS


def arrive_box(state: BoxState, row: ConstraintRow, tau: float | None = None):
    """Handle one row of the box-constrained program in place.

    Returns ``(state, events)`` where ``events`` are the records emitted for
    this arrival.  Raises :class:`InfeasibleError` if the row cannot be
    covered even with every variable at its upper bound.
    """
    row = normalize_row(row)
    state.tracker.observe_row(row)
    k = state.tracker.k_est
    if tau is None:
        tau = state.tau_policy(state.tracker)
    if not 0 < tau < 0.5:
        raise ValueError(f"threshold {tau} outside (0, 1/2)")
    j = len(state.rows)
    state.rows.append(row)
    state.tau_log.append(tau)
    n_events = len(state.events)
    x_start = state.x.copy()
    xb_start = bar_x(state)

    # a shrinking threshold can put already-raised variables over the line
    over = (~state.frozen) & (state.x >= tau * state.u)
    state.frozen |= over

    T, b = _residual(row, state.frozen, state.u)
    generated = []
    infeasible = False
    if b > FEAS_EPS:
        gc = _generate(state, j, row, T, b, k)
        generated.append(len(state.pprime) - 1)
        while math.fsum(gc.support[i] * state.x[i] for i in T) < 1.0 - FEAS_EPS:
            if not T:
                infeasible = True
                break
            caps = _cap_ratios(state.x, gc, tau, state.u, k, state.costs)
            delta = min(1.0, min(caps.values()))
            assert delta > 0, "non-positive step: a variable at its threshold was not frozen"
            x_old = state.x.copy()
            for i, alpha in gc.support.items():
                r = gc.d_m * alpha / state.costs[i]
                state.x[i] = (1.0 + delta * r) * x_old[i] + delta * r / (k * alpha)
            newly = [i for i in T if caps[i] <= delta or state.x[i] >= tau * state.u[i]]
            for i in newly:
                state.x[i] = tau * state.u[i]
                state.frozen[i] = True
            gc.t += delta
            gc.steps.append(delta)
            step_cost = math.fsum(state.costs[i] * (state.x[i] - x_old[i]) for i in T)
            gc.primal_delta += step_cost
            state.primal_cost += step_cost
            if newly:
                _close_constraint(state, len(state.pprime) - 1)
                T, b = _residual(row, state.frozen, state.u)
                if b <= FEAS_EPS:
                    gc = None
                    break
                gc = _generate(state, j, row, T, b, k)
                generated.append(len(state.pprime) - 1)
        if gc is not None:
            _close_constraint(state, len(state.pprime) - 1)

    xb = bar_x(state)
    snap = RowSnapshot(j, tau, state.x.copy(), state.frozen.copy(), k,
                       state.tracker.ell_est, generated)
    state.snapshots.append(snap)
    if infeasible:
        state.events.append({"kind": "box_row", "row": j, "status": "INFEASIBLE"})
        raise InfeasibleError(f"row {j} cannot be covered within the upper bounds")
    kc = kc_witness(state, j)
    checks = {
        "feasible_all": all(_row_satisfied_by_bar(r, xb) for r in state.rows),
        "monotone_x": bool(np.all(state.x >= x_start)),
        "monotone_xbar": bool(np.all(xb >= xb_start)),
        "below_threshold": bool(np.all(state.frozen | (state.x < tau * state.u))),
        "kc_witness": kc.passed,
    }
    state.events.append(kc.to_record())
    state.events.append({"kind": "box_row", "row": j, "status": "OK", "tau": tau,
                         "generated": generated, "checks": checks})
    return state, state.events[n_events:]


def kc_witness(state: BoxState, j: int) -> KcCheck:
    """Check the knapsack-cover inequality of row ``j`` for its frozen set."""
    snap = state.snapshots[j]
    row = state.rows[j]
    H = [i for i in row.support if snap.frozen[i]]
    a_H = math.fsum(a * int(state.u[i]) for i, a in row.entries if snap.frozen[i])
    if a_H >= 1.0 - FEAS_EPS:
        return KcCheck(j, H, a_H, math.nan, 1.0 - a_H, True, True)
    rhs = 1.0 - a_H
    lhs = math.fsum(min(a, rhs) * snap.x[i] for i, a in row.entries if not snap.frozen[i])
    return KcCheck(j, H, a_H, lhs, rhs, False, lhs >= rhs * (1 - REL_TOL))


def pprime_satisfied(state: BoxState, X) -> bool:
    """Whether ``X`` satisfies every generated residual row (to 1e-9)."""
    for gc in state.pprime:
        if math.fsum(alpha * float(X[i]) for i, alpha in gc.support.items()) < 1 - REL_TOL:
            return False
    return True


def check_p_to_pprime(state: BoxState, ip_result) -> bool:
    """An optimal integral point satisfies all residual rows, and the scaled
    dual total is bounded by its value."""
    if not state.pprime:
        return True
    if not pprime_satisfied(state, ip_result.argument):
        return False
    log_k = state.tracker.log_k
    return state.dual_total <= 12 * log_k * ip_result.value * (1 + REL_TOL) + 1e-12


def solve_online_box(costs, upper_bounds, rows, tau_policy=None) -> BoxState:
    state = BoxState.fresh(costs, upper_bounds, tau_policy)
    for r in rows:
        arrive_box(state, r)
    return state
