from fractions import Fraction

import pytest

from onlinecover.adversary import (FrameworkViolation, ReferenceGD, VarRun, reference_gd,
                                   run_adversary, validate_claims)


def test_reference_sequence_shape():
    algo = reference_gd(1)
    inc, y = algo.on_constraint(1, 1)
    assert (inc, y) == (1, 1)
    inc, y = algo.on_constraint(1, 4)
    # full greediness leaves no slack for the second dual
    assert inc == 3 and y == 0


@pytest.mark.parametrize("rho", [4, 8, 16])
@pytest.mark.parametrize("g", ["1/4", "1/2", "1"])
def test_claims_hold(rho, g):
    trace = run_adversary(ReferenceGD(Fraction(g)), rho)
    rep = validate_claims(trace)
    assert rep.passed, rep.failures()
    assert rep.gap >= rho / 4


def test_fast_forward_matches_plain_play():
    a = run_adversary(ReferenceGD(Fraction(1, 2)), 3, max_phases=2, fast_forward=False)
    b = run_adversary(ReferenceGD(Fraction(1, 2)), 3, max_phases=2, fast_forward=True)
    assert a.total_primal == b.total_primal
    assert a.total_dual == b.total_dual
    assert a.constraints_issued == b.constraints_issued
    assert [p.q for p in a.phases] == [p.q for p in b.phases]


def test_phase_budgets_double():
    trace = run_adversary(reference_gd(1), 4, max_phases=3)
    alphas = [p.alpha for p in trace.phases]
    assert alphas == [4 ** 6, 2 * 4 ** 6, 4 * 4 ** 6]
    assert all(p.primal > p.alpha for p in trace.phases)


def test_fabricated_long_sequence_fails():
    trace = run_adversary(reference_gd(1), 4, max_phases=1)
    trace.phases[0].runs.append(VarRun(4 + 3, 1, [Fraction(0)] * 7, Fraction(0), True))
    rep = validate_claims(trace)
    assert ("sequence_length", 1) in rep.failures()


def test_rho_validation():
    with pytest.raises(ValueError):
        run_adversary(reference_gd(1), 2)
    with pytest.raises(ValueError):
        ReferenceGD(0)


class Cheater(ReferenceGD):
    """Overspends the dual constraint of every variable."""

    def on_constraint(self, var, bound):
        inc, y = super().on_constraint(var, bound)
        self._hist[var][-1] = (bound, 2 * bound)
        return inc, 2 * bound


def test_infeasible_duals_are_caught():
    with pytest.raises(FrameworkViolation):
        run_adversary(Cheater(1), 4)


def test_trace_serializes():
    d = run_adversary(reference_gd("1/2"), 4, max_phases=1).to_dict()
    assert d["rho"] == 4 and d["max_support"] == 1
    assert isinstance(d["phases"][0]["runs"][0]["duals"][0], str)
