"""Offline exact baselines: covering LP, bounded integer program, knapsack.

The LP is solved through its packing dual

    max  1.y - u.z   s.t.  A^T y - z <= c,  y, z >= 0,

whose slack basis is feasible because ``c >= 0``; a dense tableau with
Bland's rule runs from there and the covering solution is read off the
slack reduced costs.  Dual unboundedness means the covering program is
infeasible.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import Instance

FEAS_TOL = 1e-12
PIVOT_TOL = 1e-12
ENUM_LIMIT = 200_000


class Status(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"


class SearchTooLarge(ValueError):
    pass


@dataclass
class OracleResult:
    value: float
    argument: np.ndarray | None
    status: Status

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "value": None if self.status is not Status.OPTIMAL else self.value,
            "argument": None if self.argument is None else self.argument.tolist(),
        }


def dense_rows(inst: Instance) -> np.ndarray:
    """Normalized constraint matrix, one row per constraint."""
    A = np.zeros((inst.m, inst.n))
    for j, r in enumerate(inst.normalized_rows()):
        for i, a in r.entries:
            A[j, i] = a
    return A


def simplex_max(M: np.ndarray, b: np.ndarray, c: np.ndarray, max_iter: int = 100_000):
    """``max b.w  s.t.  M w <= c, w >= 0`` for ``c >= 0``.

    Returns ``(status, value, w, shadow)`` where ``shadow`` are the
    constraint multipliers.
    """
    rows, cols = M.shape
    T = np.zeros((rows + 1, cols + rows + 1))
    T[:rows, :cols] = M
    T[:rows, cols:cols + rows] = np.eye(rows)
    T[:rows, -1] = c
    T[-1, :cols] = -b
    basis = list(range(cols, cols + rows))
    for _ in range(max_iter):
        entering = next((q for q in range(cols + rows) if T[-1, q] < -PIVOT_TOL), None)
        if entering is None:
            break
        col = T[:rows, entering]
        best, leave = math.inf, None
        for r in range(rows):
            if col[r] > PIVOT_TOL:
                ratio = T[r, -1] / col[r]
                if ratio < best - 1e-15 or (abs(ratio - best) <= 1e-15 and basis[r] < basis[leave]):
                    best, leave = ratio, r
        if leave is None:
            return Status.UNBOUNDED, math.inf, None, None
        T[leave] /= T[leave, entering]
        for r in range(rows + 1):
            if r != leave and T[r, entering] != 0.0:
                T[r] -= T[r, entering] * T[leave]
        basis[leave] = entering
    else:
        raise RuntimeError("simplex iteration limit reached")
    w = np.zeros(cols + rows)
    for r, q in enumerate(basis):
        w[q] = T[r, -1]
    return Status.OPTIMAL, float(T[-1, -1]), w[:cols], T[-1, cols:cols + rows].copy()


def covering_lp(costs, A, upper_bounds=None) -> OracleResult:
    """Optimum of ``min c.x, A x >= 1, 0 <= x (<= u)`` for ``c >= 0``."""
    c = np.asarray(costs, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = len(c)
    if A.size == 0 or A.shape[0] == 0:
        return OracleResult(0.0, np.zeros(n), Status.OPTIMAL)
    m = A.shape[0]
    if upper_bounds is None:
        M = A.T
        b = np.ones(m)
    else:
        M = np.hstack([A.T, -np.eye(n)])
        b = np.concatenate([np.ones(m), -np.asarray(upper_bounds, dtype=float)])
    status, _, _, shadow = simplex_max(M, b, c)
    if status is Status.UNBOUNDED:
        return OracleResult(math.inf, None, Status.INFEASIBLE)
    x = np.maximum(shadow, 0.0)
    if upper_bounds is not None:
        x = np.minimum(x, upper_bounds)
    return OracleResult(float(np.dot(c, x)), x, Status.OPTIMAL)


def lp_opt(inst: Instance) -> OracleResult:
    return covering_lp(inst.costs, dense_rows(inst), inst.upper_bounds)


def search_box(A: np.ndarray, upper_bounds=None) -> np.ndarray:
    """Per-variable integral range worth searching."""
    n = A.shape[1]
    used = np.any(A > 0, axis=0)
    if upper_bounds is not None:
        return np.where(used, np.asarray(upper_bounds, dtype=np.int64), 0)
    caps = np.zeros(n, dtype=np.int64)
    for i in range(n):
        col = A[:, i]
        if used[i]:
            caps[i] = max(math.ceil(1.0 / a - 1e-9) for a in col[col > 0])
    return caps


def _lattice_size(caps) -> int:
    return math.prod(int(c) + 1 for c in caps)


def covering_ip(costs, A, upper_bounds=None, limit: int = ENUM_LIMIT) -> OracleResult:
    """Exact integral optimum by depth-first enumeration with pruning.

    Variables are visited cheapest-per-coverage first.  A node is cut when
    its cost plus a per-row fractional lower bound reaches the incumbent, or
    when the remaining variables at their caps cannot cover some row.
    """
    c = np.asarray(costs, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = len(c)
    if A.size == 0 or A.shape[0] == 0:
        return OracleResult(0.0, np.zeros(n, dtype=np.int64), Status.OPTIMAL)
    caps = search_box(A, upper_bounds)
    if _lattice_size(caps) > limit:
        raise SearchTooLarge(f"{_lattice_size(caps)} lattice points exceed {limit}")
    if np.any(A @ caps < 1.0 - FEAS_TOL):
        return OracleResult(math.inf, None, Status.INFEASIBLE)

    order = [i for i in range(n) if caps[i] > 0]
    order.sort(key=lambda i: (c[i] / A[:, i].sum(), i))
    m = A.shape[0]
    cols = [A[:, i].tolist() for i in order]
    ub = [int(caps[i]) for i in order]
    cs = [float(c[i]) for i in order]
    depth = len(order)
    # reach[p][j]: coverage of row j still obtainable from positions >= p
    reach = [[0.0] * m for _ in range(depth + 1)]
    # dens[p][j]: cheapest cost per unit coverage of row j from positions >= p
    dens = [[math.inf] * m for _ in range(depth + 1)]
    for p in range(depth - 1, -1, -1):
        for j in range(m):
            a = cols[p][j]
            reach[p][j] = reach[p + 1][j] + a * ub[p]
            dens[p][j] = min(dens[p + 1][j], cs[p] / a if a > 0 else math.inf)

    best_cost = float(np.dot(c, caps))
    best = list(ub)
    cur = [0] * depth

    def dfs(p, cover, cost):
        nonlocal best_cost, best
        lb = 0.0
        covered = True
        for j in range(m):
            short = 1.0 - FEAS_TOL - cover[j]
            if short > 0:
                if reach[p][j] < short:
                    return
                covered = False
                lb = max(lb, short * dens[p][j])
        if covered:
            if cost < best_cost:
                best_cost = cost
                best = cur[:p] + [0] * (depth - p)
            return
        if cost + lb >= best_cost - 1e-12 * max(1.0, best_cost):
            return
        col = cols[p]
        for v in range(ub[p] + 1):
            cur[p] = v
            dfs(p + 1, [cover[j] + v * col[j] for j in range(m)], cost + v * cs[p])
        cur[p] = 0

    dfs(0, [0.0] * m, 0.0)
    x = np.zeros(n, dtype=np.int64)
    for p, i in enumerate(order):
        x[i] = best[p]
    return OracleResult(float(np.dot(c, x)), x, Status.OPTIMAL)


def ip_opt(inst: Instance, limit: int = ENUM_LIMIT) -> OracleResult:
    return covering_ip(inst.costs, dense_rows(inst), inst.upper_bounds, limit)


def _enumerate(caps):
    grids = np.indices([int(v) + 1 for v in caps]).reshape(len(caps), -1).T
    return grids


def covering_ip_exhaustive(costs, A, upper_bounds=None, limit: int = ENUM_LIMIT) -> OracleResult:
    """Unpruned enumeration of every lattice point; cross-check for :func:`covering_ip`."""
    c = np.asarray(costs, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0 or A.shape[0] == 0:
        return OracleResult(0.0, np.zeros(len(c), dtype=np.int64), Status.OPTIMAL)
    caps = search_box(A, upper_bounds)
    if _lattice_size(caps) > limit:
        raise SearchTooLarge(f"{_lattice_size(caps)} lattice points exceed {limit}")
    pts = _enumerate(caps)
    ok = np.all(pts @ A.T >= 1.0 - FEAS_TOL, axis=1)
    if not ok.any():
        return OracleResult(math.inf, None, Status.INFEASIBLE)
    vals = np.where(ok, pts @ c, np.inf)
    k = int(np.argmin(vals))
    return OracleResult(float(vals[k]), pts[k].astype(np.int64), Status.OPTIMAL)


def knapsack_opt(costs, abar, bounds, limit: int = ENUM_LIMIT) -> OracleResult:
    """Exact optimum of ``min c.w, sum abar_i w_i >= 1, 0 <= w <= bounds`` by enumeration."""
    c = np.asarray(costs, dtype=float)
    a = np.asarray(abar, dtype=float)
    u = np.asarray(bounds, dtype=np.int64)
    if _lattice_size(u) > limit:
        raise SearchTooLarge(f"{_lattice_size(u)} lattice points exceed {limit}")
    if float(np.dot(a, u)) < 1.0 - FEAS_TOL:
        return OracleResult(math.inf, None, Status.INFEASIBLE)
    pts = _enumerate(u)
    ok = pts @ a >= 1.0 - FEAS_TOL
    vals = np.where(ok, pts @ c, np.inf)
    k = int(np.argmin(vals))
    return OracleResult(float(vals[k]), pts[k].astype(np.int64), Status.OPTIMAL)


def dual_feasibility_factor(duals, costs) -> float:
    """``max_i sum_h coef_ih y_h / c_i`` over the recorded duals."""
    load = {}
    for d in duals:
        for i, a in d.support.items():
            load.setdefault(i, []).append(a * d.y)
    if not load:
        return 0.0
    return max(math.fsum(v) / costs[i] for i, v in load.items())

