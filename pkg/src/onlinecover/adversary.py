"""Adaptive adversary against phase-based (guess-and-double) primal-dual schemes.

All costs are one and every constraint has a single variable, ``x_v >= rho**h``.
After a seed constraint ``x_0 >= rho**(rho+2)`` fixes the first budget
``alpha_1``, each phase uses fresh variables.  For a variable the bounds
``rho**0, rho**1, ...`` are issued until the algorithm assigns the newest
dual a value below ``rho**(h-1)``.  The phase ends as soon as the primal
spent on this phase's variables exceeds ``alpha_r``; the next budget is
``2 * alpha_r`` and the algorithm must zero its duals.

Exact rational arithmetic is used throughout, so large ``rho`` is fine.
"""
from __future__ import annotations

import abc
from dataclasses import dataclass, field
from fractions import Fraction


class FrameworkViolation(RuntimeError):
    """The algorithm left the phase framework the construction assumes."""


class GdAlgorithm(abc.ABC):
    """Interface a phase-based algorithm exposes to the adversary.

    Set ``local = True`` only if the response to a fresh variable's
    constraints depends on nothing but that variable's own constraints in
    the current phase; the adversary may then fast-forward identical
    variables through :meth:`replicate`.
    """

    local: bool = False

    @abc.abstractmethod
    def on_constraint(self, var: int, bound: int) -> tuple[Fraction, Fraction]:
        """Answer ``x_var >= bound``: return (primal increment, new dual value)."""

    @abc.abstractmethod
    def on_phase_reset(self) -> None:
        """Phase boundary: all dual values return to zero."""

    @abc.abstractmethod
    def value(self, var: int) -> Fraction:
        """Current primal value of ``var``."""

    @abc.abstractmethod
    def dual_values(self, var: int) -> list[Fraction]:
        """Duals of ``var``'s constraints issued in the current phase, in order."""

    @abc.abstractmethod
    def phase_dual_total(self) -> Fraction:
        ...

    @property
    @abc.abstractmethod
    def primal_cost(self) -> Fraction:
        ...

    def replicate(self, template: int, count: int) -> None:
        raise NotImplementedError


class ReferenceGD(GdAlgorithm):
    """Raise each variable to exactly the requested bound and give the new
    dual ``greediness`` times the slack left in its dual constraint."""

    local = True

    def __init__(self, greediness: float | Fraction = 1):
        g = Fraction(greediness)
        if not 0 < g <= 1:
            raise ValueError("greediness must lie in (0, 1]")
        self.greediness = g
        self._x: dict[int, Fraction] = {}
        self._hist: dict[int, list[tuple[int, Fraction]]] = {}
        self._primal = Fraction(0)
        self._phase_dual = Fraction(0)
        self.phase = 0

    def on_constraint(self, var, bound):
        x = self._x.get(var, Fraction(0))
        inc = max(Fraction(0), Fraction(bound) - x)
        self._x[var] = x + inc
        self._primal += inc
        hist = self._hist.setdefault(var, [])
        slack = 1 - sum((y / b for b, y in hist), Fraction(0))
        y = self.greediness * bound * slack
        hist.append((bound, y))
        self._phase_dual += y
        return inc, y

    def on_phase_reset(self):
        self._hist.clear()
        self._phase_dual = Fraction(0)
        self.phase += 1

    def value(self, var):
        return self._x.get(var, Fraction(0))

    def dual_values(self, var):
        return [y for _, y in self._hist.get(var, [])]

    def phase_dual_total(self):
        return self._phase_dual

    @property
    def primal_cost(self):
        return self._primal

    def replicate(self, template, count):
        hist = self._hist[template]
        self._primal += count * self._x[template]
        self._phase_dual += count * sum((y for _, y in hist), Fraction(0))


def reference_gd(greediness: float | Fraction = 1) -> ReferenceGD:
    return ReferenceGD(greediness)


@dataclass
class VarRun:
    """``count`` consecutive variables that received the same responses."""

    h: int
    count: int
    duals: list[Fraction]
    primal: Fraction
    complete: bool

    def to_dict(self) -> dict:
        return {"h": self.h, "count": self.count, "duals": [str(y) for y in self.duals],
                "primal": str(self.primal), "complete": self.complete}


@dataclass
class PhaseRecord:
    index: int
    alpha: int
    primal: Fraction
    dual: Fraction
    runs: list[VarRun] = field(default_factory=list)
    completed: bool = True

    @property
    def q(self) -> int:
        return sum(r.count for r in self.runs)

    def to_dict(self) -> dict:
        return {"phase": self.index, "alpha": str(self.alpha), "primal": str(self.primal),
                "dual": str(self.dual), "q": self.q, "completed": self.completed,
                "primal_over_dual": float(self.primal / self.dual) if self.dual else None,
                "runs": [r.to_dict() for r in self.runs]}


@dataclass
class AdversaryTrace:
    rho: int
    seed_bound: int
    seed_dual: Fraction
    phases: list[PhaseRecord]
    constraints_issued: int
    max_support: int = 1

    @property
    def total_primal(self) -> Fraction:
        return sum((p.primal for p in self.phases), Fraction(0))

    @property
    def total_dual(self) -> Fraction:
        return sum((p.dual for p in self.phases), Fraction(0))

    def gap(self) -> float:
        return float(self.total_primal / self.total_dual) if self.total_dual else float("inf")

    def to_dict(self) -> dict:
        return {"rho": self.rho, "seed_bound": str(self.seed_bound),
                "seed_dual": str(self.seed_dual), "constraints_issued": self.constraints_issued,
                "max_support": self.max_support, "total_primal": str(self.total_primal),
                "total_dual": str(self.total_dual), "primal_over_dual": self.gap(),
                "phases": [p.to_dict() for p in self.phases]}


def _check_response(algo: GdAlgorithm, var: int, bounds: list[int], inc, y, seen: list):
    bound = bounds[-1]
    if inc < 0:
        raise FrameworkViolation(f"primal of x_{var} decreased")
    if algo.value(var) < bound:
        raise FrameworkViolation(f"x_{var} left below its bound {bound}")
    if y < 0:
        raise FrameworkViolation(f"negative dual for x_{var}")
    current = algo.dual_values(var)
    if len(current) != len(seen) + 1 or any(c < s for c, s in zip(current, seen)):
        raise FrameworkViolation(f"duals of x_{var} decreased inside a phase")
    load = sum((Fraction(d) / b for d, b in zip(current, bounds)), Fraction(0))
    if load > 1:
        raise FrameworkViolation(f"dual constraint of x_{var} violated ({float(load):.4g} > 1)")


def run_adversary(algo: GdAlgorithm, rho: int, max_phases: int = 3,
                  fast_forward: bool = True) -> AdversaryTrace:
    """Play the construction against ``algo`` for ``max_phases`` phases."""
    if int(rho) != rho or rho <= 2:
        raise ValueError("rho must be an integer greater than 2")
    rho = int(rho)
    if max_phases < 1:
        raise ValueError("max_phases must be positive")
    powers = [rho ** h for h in range(rho + 4)]

    def bound_of(h):
        while h >= len(powers):
            powers.append(rho ** len(powers))
        return powers[h]

    issued = 0
    seed_bound = rho ** (rho + 2)
    _, seed_dual = algo.on_constraint(0, seed_bound)
    issued += 1
    alpha = seed_bound
    next_var = 1
    phases = []
    for r in range(1, max_phases + 1):
        # the seed constraint precedes phase 1 and its dual does not carry over
        algo.on_phase_reset()
        if algo.phase_dual_total() != 0:
            raise FrameworkViolation("duals not zeroed at a phase boundary")
        P = Fraction(0)
        recorded_dual = Fraction(0)
        rec = PhaseRecord(r, alpha, Fraction(0), Fraction(0))
        aborted = False
        while not aborted:
            v = next_var
            next_var += 1
            ys: list[Fraction] = []
            spent = Fraction(0)
            h = 0
            while True:
                b = bound_of(h)
                inc, y = algo.on_constraint(v, b)
                issued += 1
                _check_response(algo, v, [bound_of(t) for t in range(h + 1)], inc, y, ys)
                ys.append(Fraction(y))
                spent += inc
                P += inc
                recorded_dual += y
                if P > alpha:
                    aborted = True
                    break
                # sequence ends once the new dual drops below rho**(h-1)
                if y * rho < b:
                    break
                h += 1
            rec.runs.append(VarRun(len(ys), 1, ys, spent, not aborted))
            if aborted or not (fast_forward and algo.local) or spent <= 0:
                continue
            copies = int((alpha - P) // spent)
            if copies > 0:
                algo.replicate(v, copies)
                issued += copies * len(ys)
                next_var += copies
                P += copies * spent
                recorded_dual += copies * sum(ys, Fraction(0))
                rec.runs.append(VarRun(len(ys), copies, list(ys), spent, True))
        dual = algo.phase_dual_total()
        if dual < recorded_dual:
            raise FrameworkViolation(f"phase {r} duals were lowered before its boundary")
        rec.primal = P
        rec.dual = dual
        phases.append(rec)
        alpha *= 2
    return AdversaryTrace(rho, seed_bound, Fraction(seed_dual), phases, issued)


@dataclass
class ClaimReport:
    rho: int
    checks: list[tuple[str, int | None, bool]]
    gap: float

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.checks)

    def failures(self) -> list[tuple[str, int | None]]:
        return [(name, ph) for name, ph, ok in self.checks if not ok]


def validate_claims(trace: AdversaryTrace) -> ClaimReport:
    """Per-phase sequence-length, dual-share and budget checks, plus the global ratio."""
    rho = trace.rho
    checks = []
    for ph in trace.phases:
        checks.append(("sequence_length", ph.index, all(run.h <= rho + 1 for run in ph.runs)))
        checks.append(("phase_dual_share", ph.index, ph.dual * rho <= 4 * ph.primal))
        if ph.completed:
            checks.append(("budget_exceeded", ph.index, ph.primal >= ph.alpha))
        checks.append(("two_variables", ph.index, ph.q >= 2))
    checks.append(("global_dual_share", None,
                   trace.total_dual * rho <= 4 * trace.total_primal))
    checks.append(("single_variable_rows", None, trace.max_support == 1))
    return ClaimReport(rho, checks, trace.gap())
