"""Experiment harness: random instances, end-to-end runs, reports, sweeps."""
from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import oracles
from .box import BoxState, arrive_box, bar_x, check_p_to_pprime
from .clp import REL_TOL, ClpState, arrive, check_lemmas
from .core import ConstraintRow, InfeasibleError, Instance, save_instance
from .rounding import IntegralState, advance, cost_decomposition, log_ell_tau

NINE_PI_SQ = 9 * math.pi ** 2


def gen_random(n: int, m: int, k_max: int, coeff_range=(0.1, 2.0), u_max: int | None = None,
               density: float | None = None, seed: int = 0) -> Instance:
    """Random covering instance; with ``u_max`` every row is integrally coverable.

    Support sizes are uniform on ``[1, k_max]``, or ``1 + Binomial(k_max-1,
    density)`` when ``density`` is given.  Costs are uniform on ``[0.5, 2]``.
    """
    if n < 1 or m < 1 or k_max < 1:
        raise ValueError("n, m and k_max must be positive")
    lo, hi = coeff_range
    if not 0 < lo <= hi or not math.isfinite(hi):
        raise ValueError("coefficient range must lie inside (0, inf)")
    if u_max is not None and u_max < 1:
        raise ValueError("u_max must be at least 1")
    if density is not None and not 0 <= density <= 1:
        raise ValueError("density must lie in [0, 1]")
    k_max = min(k_max, n)
    rng = np.random.default_rng(seed)
    costs = rng.uniform(0.5, 2.0, size=n)
    u = None if u_max is None else rng.integers(1, u_max + 1, size=n)
    rows = []
    for _ in range(m):
        for _attempt in range(10_000):
            if density is None:
                size = int(rng.integers(1, k_max + 1))
            else:
                size = 1 + int(rng.binomial(k_max - 1, density))
            idx = np.sort(rng.choice(n, size=size, replace=False))
            coef = rng.uniform(lo, hi, size=size)
            if u is None or float(np.dot(coef, u[idx])) >= 1.0:
                break
        else:
            raise ValueError("could not draw a coverable row; widen the coefficient range")
        rows.append(ConstraintRow(tuple(zip(idx.tolist(), coef.tolist())), 1.0))
    return Instance(n, tuple(costs.tolist()), tuple(rows),
                    None if u is None else tuple(int(v) for v in u))


def _plain(obj):
    # numpy scalars and arrays leak out of the solvers' check dicts
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, default=_plain)


def instance_digest(inst: Instance) -> str:
    return hashlib.sha256(save_instance(inst)).hexdigest()


@dataclass
class RunReport:
    header: dict
    events: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    timing: float = 0.0

    def all_checks(self):
        for ev in self.events:
            for name, ok in ev.get("checks", {}).items():
                yield ev.get("kind"), name, ok
        for name, ok in self.summary.get("checks", {}).items():
            yield "final", name, ok

    def invariant_counts(self) -> dict:
        run = failed = 0
        for _, _, ok in self.all_checks():
            run += 1
            failed += not ok
        return {"run": run, "failed": failed}

    @property
    def status(self) -> str:
        return self.summary.get("status", "OK")

    @property
    def exit_code(self) -> int:
        if self.status == "INFEASIBLE":
            return 2
        return 1 if self.invariant_counts()["failed"] else 0

    def lines(self, with_timing: bool = True) -> list[str]:
        out = [_dump({"kind": "header", **self.header})]
        out += [_dump(ev) for ev in self.events]
        summary = dict(self.summary)
        summary["invariants"] = self.invariant_counts()
        out.append(_dump({"kind": "summary", **summary}))
        if with_timing:
            out.append(json.dumps({"kind": "timing", "seconds": self.timing}))
        return out

    def dumps(self, with_timing: bool = True) -> str:
        return "\n".join(self.lines(with_timing)) + "\n"


def parse_report(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def _ratio(num, den):
    return num / den if den > 0 else math.inf


def run_clp(inst: Instance, check_invariants: bool = True, oracle: bool = False) -> RunReport:
    """Stream the rows through the unbounded fractional solver."""
    if inst.has_bounds:
        raise ValueError("instance has upper bounds; use run_cip")
    t0 = time.perf_counter()
    rep = RunReport({"mode": "clp", "instance": instance_digest(inst), "n": inst.n, "m": inst.m})
    state = ClpState.fresh(inst.costs)
    for j, row in enumerate(inst.rows):
        x_before = state.x.copy()
        _, ev = arrive(state, row)
        rec = ev.to_record()
        if check_invariants:
            audit = check_lemmas(state)
            rec["checks"].update({f"state_{k}": v for k, v in audit.checks.items()})
            rec["checks"]["x_outside_row_fixed"] = all(
                state.x[i] == x_before[i] for i in range(inst.n) if i not in row.support)
        rep.events.append(rec)
    cost = float(np.dot(state.x, state.costs))
    log_k = state.tracker.log_k
    summary = {
        "status": "OK",
        "primal_cost": cost,
        "dual_total": state.dual_total,
        "dual_factor": oracles.dual_feasibility_factor(state.duals, state.costs),
        "k_est": state.tracker.k_est,
        "x": state.x.tolist(),
        "checks": {"primal_le_4_dual": cost <= 4 * state.dual_total * (1 + REL_TOL) + 1e-12},
    }
    if oracle:
        lp = oracles.lp_opt(inst)
        summary["lp_opt"] = lp.value
        summary["ratio"] = _ratio(cost, lp.value)
        summary["checks"]["competitive"] = cost <= 48 * log_k * lp.value * (1 + REL_TOL) + 1e-12
        summary["checks"]["weak_duality"] = (
            state.dual_total <= 12 * log_k * lp.value * (1 + REL_TOL) + 1e-12)
    rep.summary = summary
    rep.timing = time.perf_counter() - t0
    return rep


def run_cip(inst: Instance, seed: int, check_invariants: bool = True,
            oracle: bool = False) -> RunReport:
    """Fractional box solver followed by online rounding, row by row."""
    if not inst.has_bounds:
        raise ValueError("instance has no upper bounds; use run_clp")
    t0 = time.perf_counter()
    rep = RunReport({"mode": "cip", "instance": instance_digest(inst), "n": inst.n,
                     "m": inst.m, "seed": int(seed)})
    box = BoxState.fresh(inst.costs, inst.upper_bounds, tau_policy=log_ell_tau)
    integral = IntegralState.fresh(inst.costs, inst.upper_bounds, seed)
    status = "OK"
    for j, row in enumerate(inst.rows):
        try:
            _, evs = arrive_box(box, row)
        except InfeasibleError:
            rep.events.extend(box.events[-1:])
            status = "INFEASIBLE"
            break
        rep.events.extend(evs)
        snap = box.snapshots[-1]
        rev = advance(integral, snap.x, row, snap.frozen, snap.tau)
        if check_invariants:
            rev["checks"]["feasible_all"] = all(
                r.lhs(integral.X) >= 1.0 - 1e-12 for r in integral.rows)
        rep.events.append(rev)
        rep.events.append({"kind": "arrival", "arrival": j, "tau": snap.tau,
                           "k_est": snap.k_est, "ell_est": snap.ell_est})
    cost_x = float(np.dot(box.costs, box.x))
    cost_xbar = float(np.dot(box.costs, bar_x(box)))
    cost_X = float(np.dot(box.costs, integral.X))
    cost_Z, cost_alt = cost_decomposition(integral)
    summary = {
        "status": status,
        "primal_cost": cost_x,
        "xbar_cost": cost_xbar,
        "integral_cost": cost_X,
        "cost_Z": cost_Z,
        "cost_alterations": cost_alt,
        "dual_total": box.dual_total,
        "dual_factor": oracles.dual_feasibility_factor(box.duals, box.costs),
        "k_est": box.tracker.k_est,
        "ell_est": box.tracker.ell_est,
        "X": integral.X.tolist(),
        "alterations": [a.to_record() for a in integral.alterations],
        "checks": {},
    }
    if status == "OK":
        log_k = box.tracker.log_k
        checks = summary["checks"]
        checks["primal_le_4_dual"] = cost_x <= 4 * box.dual_total * (1 + REL_TOL) + 1e-12
        checks["cost_decomposition"] = cost_X <= (cost_Z + cost_alt) * (1 + REL_TOL) + 1e-12
        if oracle:
            ip = oracles.ip_opt(inst)
            lp = oracles.lp_opt(inst)
            summary["ip_opt"] = ip.value
            summary["lp_opt"] = lp.value
            summary["fractional_ratio"] = _ratio(cost_x, ip.value)
            summary["integral_ratio"] = _ratio(cost_X, ip.value)
            checks["competitive"] = cost_x <= 48 * log_k * ip.value * (1 + REL_TOL) + 1e-12
            checks["p_to_pprime"] = check_p_to_pprime(box, ip)
            checks["integral_ge_opt"] = cost_X >= ip.value * (1 - REL_TOL)
    rep.summary = summary
    rep.timing = time.perf_counter() - t0
    return rep


def run_instance(inst: Instance, seed: int = 0, check_invariants: bool = True,
                 oracle: bool = False) -> RunReport:
    if inst.has_bounds:
        return run_cip(inst, seed, check_invariants, oracle)
    return run_clp(inst, check_invariants, oracle)


def ratio_sweep(config: dict) -> list[dict]:
    """Realized competitive ratios per instance family.

    ``config = {"families": [{"name", "n", "m", "k_max", "coeff_range",
    "u_max", "seeds", "rounding_seeds"}, ...]}``.  Families without ``u_max``
    are measured against the LP optimum, the others against the integral
    optimum (fractional and mean integral ratio).
    """
    rows = []
    for fam in config.get("families", []):
        frac, integ, envelopes = [], [], []
        k_seen = ell_seen = 0
        for s in range(int(fam.get("seeds", 10))):
            inst = gen_random(fam["n"], fam["m"], fam["k_max"],
                              tuple(fam.get("coeff_range", (0.1, 2.0))),
                              fam.get("u_max"), fam.get("density"), seed=s)
            if inst.has_bounds:
                reps = [run_cip(inst, r, check_invariants=False, oracle=(r == 0))
                        for r in range(int(fam.get("rounding_seeds", 5)))]
                ip = reps[0].summary["ip_opt"]
                frac.append(reps[0].summary["primal_cost"] / ip)
                integ.append(float(np.mean([r.summary["integral_cost"] for r in reps])) / ip)
                k_seen = max(k_seen, reps[0].summary["k_est"])
                ell_seen = max(ell_seen, reps[0].summary["ell_est"])
            else:
                rep = run_clp(inst, check_invariants=False, oracle=True)
                frac.append(rep.summary["ratio"])
                k_seen = max(k_seen, rep.summary["k_est"])
        log_k = int(math.log2(max(k_seen, 2)))
        row = {
            "family": fam.get("name", f"family{len(rows)}"),
            "instances": len(frac),
            "frac_ratio_max": max(frac) if frac else None,
            "frac_ratio_mean": float(np.mean(frac)) if frac else None,
            "frac_envelope": 48 * log_k,
        }
        if integ:
            tau = 1.0 / (8 * math.log2(max(ell_seen, 2)))
            row["int_ratio_max"] = max(integ)
            row["int_ratio_mean"] = float(np.mean(integ))
            row["int_envelope"] = (2 / tau + NINE_PI_SQ) * 48 * log_k
        rows.append(row)
        envelopes.append(row["frac_envelope"])
    return rows
