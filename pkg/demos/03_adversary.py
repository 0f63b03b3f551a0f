#!/usr/bin/env python3
# Play the phase adversary against the reference guess-and-double scheme.

from fractions import Fraction

from onlinecover.adversary import ReferenceGD, run_adversary, validate_claims

for rho in (4, 8, 16):
    for g in (Fraction(1, 4), Fraction(1, 2), Fraction(1)):
        trace = run_adversary(ReferenceGD(g), rho, max_phases=3)
        rep = validate_claims(trace)
        print(f"rho={rho:2d} g={str(g):>3}: primal/dual {rep.gap:8.3f} "
              f"(>= rho/4 = {rho / 4}) checks {'ok' if rep.passed else rep.failures()}")

# a look inside one phase: runs of identical variables
trace = run_adversary(ReferenceGD(Fraction(1, 2)), 4, max_phases=1)
phase = trace.phases[0]
print("phase 1 budget", phase.alpha, "spent", phase.primal, "variables", phase.q)
for run in phase.runs:
    print("  ", run.count, "x", [str(y) for y in run.duals], "complete" if run.complete else "aborted")
