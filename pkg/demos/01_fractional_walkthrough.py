#!/usr/bin/env python3
# Walk the unbounded fractional solver through a few rows and watch x and y move.

import numpy as np

from onlinecover.clp import ClpState, arrive, check_lemmas
from onlinecover.core import ConstraintRow
from onlinecover.oracles import covering_lp

np.set_printoptions(precision=4, suppress=True)

costs = [1.0, 2.0, 0.5]
rows = [
    ConstraintRow(((0, 1.0), (1, 1.0))),           # x0 + x1 >= 1
    ConstraintRow(((1, 2.0), (2, 0.5)), 2.0),       # rescaled to x1 + 0.25 x2 >= 1
    ConstraintRow(((0, 0.3), (1, 0.3), (2, 0.3))),  # three-wide row doubles k
]

state = ClpState.fresh(costs)
for row in rows:
    arrive(state, row)
    ev = state.events[-1]
    print(f"row {ev.index}: t={ev.t} k={ev.k_est} x={state.x} y={[round(float(d.y), 4) for d in state.duals]}")

cost = float(state.costs @ state.x)
print("primal", round(cost, 4), "dual", round(state.dual_total, 4))

# the offline optimum for comparison
A = np.array([[1, 1, 0], [0, 1, 0.25], [0.3, 0.3, 0.3]])
opt = covering_lp(costs, A).value
print("lp optimum", round(opt, 4), "ratio", round(cost / opt, 3))

report = check_lemmas(state)
print("audit passed:", report.passed, "dual factor", round(float(report.details["dual_factor"]), 3))

# a row that is already covered costs nothing and gets a zero dual
arrive(state, ConstraintRow(((0, 1.0),), 0.5))
print("covered row: t =", state.events[-1].t, "y =", state.duals[-1].y)
