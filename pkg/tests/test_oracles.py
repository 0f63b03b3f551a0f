import math

import numpy as np
import pytest
from scipy.optimize import linprog

from onlinecover.core import make_instance
from onlinecover.harness import gen_random
from onlinecover.oracles import (SearchTooLarge, Status, covering_ip, covering_ip_exhaustive,
                                 covering_lp, dense_rows, dual_feasibility_factor, ip_opt,
                                 knapsack_opt, lp_opt)


def test_gap_m_example():
    assert covering_lp([1.0], [[10.0]]).value == pytest.approx(0.1, abs=1e-12)
    assert covering_ip([1.0], [[10.0]]).value == 1.0


def test_gap_eps_example():
    lp = covering_lp([1.0, 0.0], [[1.0, 0.9]], [1, 1])
    assert lp.value == pytest.approx(0.1, abs=1e-12)
    assert lp.argument == pytest.approx([0.1, 1.0])
    assert covering_ip([1.0, 0.0], [[1.0, 0.9]], [1, 1]).value == 1.0


def test_empty_rows():
    assert covering_lp([1.0, 2.0], np.zeros((0, 2))).value == 0.0
    res = covering_ip([1.0, 2.0], np.zeros((0, 2)))
    assert res.value == 0.0 and list(res.argument) == [0, 0]


def test_infeasible_box():
    assert covering_lp([1.0], [[0.5]], [1]).status is Status.INFEASIBLE
    assert covering_ip([1.0], [[0.5]], [1]).status is Status.INFEASIBLE
    assert covering_ip_exhaustive([1.0], [[0.5]], [1]).status is Status.INFEASIBLE


def test_positive_value():
    inst = make_instance([1.0, 1.0], [([(0, 1.0), (1, 1.0)], 1.0)])
    assert lp_opt(inst).value > 0


def test_search_limit():
    with pytest.raises(SearchTooLarge):
        covering_ip([1.0] * 20, np.ones((1, 20)) * 0.1, [3] * 20, limit=1000)


def test_knapsack_single_item():
    assert knapsack_opt([2.0], [0.3], [5]).value == pytest.approx(8.0)


def test_dual_factor_zero():
    assert dual_feasibility_factor([], [1.0]) == 0.0


@pytest.mark.parametrize("seed", range(40))
def test_lp_agrees_with_scipy(seed):
    bounded = seed % 2 == 0
    inst = gen_random(8, 10, 4, u_max=3 if bounded else None, seed=seed)
    A = dense_rows(inst)
    ref = linprog(inst.costs, A_ub=-A, b_ub=-np.ones(inst.m),
                  bounds=[(0, u) for u in inst.upper_bounds] if bounded else (0, None),
                  method="highs")
    ours = lp_opt(inst)
    assert ours.status is Status.OPTIMAL
    assert ours.value == pytest.approx(ref.fun, rel=1e-9, abs=1e-12)
    assert np.all(A @ ours.argument >= 1 - 1e-9)


@pytest.mark.parametrize("seed", range(40))
def test_ip_agrees_with_enumeration(seed):
    bounded = seed % 3 != 0
    inst = gen_random(5, 8, 3, u_max=3 if bounded else None, seed=seed)
    A = dense_rows(inst)
    fast = ip_opt(inst)
    slow = covering_ip_exhaustive(inst.costs, A, inst.upper_bounds)
    assert fast.value == pytest.approx(slow.value, rel=1e-12)
    assert np.all(A @ fast.argument >= 1 - 1e-12)
    assert fast.value >= lp_opt(inst).value - 1e-9


def test_zero_cost_variable_in_search():
    res = covering_ip([1.0, 0.0], [[1.0, 0.9], [0.0, 2.0]], [1, 1])
    assert res.value == 1.0 and not math.isinf(res.value)
