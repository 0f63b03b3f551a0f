import numpy as np
from hypothesis import given, settings, strategies as st

from onlinecover.box import solve_online_box
from onlinecover.clp import check_lemmas, solve_online
from onlinecover.core import ConstraintRow
from onlinecover.oracles import knapsack_opt
from onlinecover.rounding import compute_Z, greedy_knapsack, replay_rounding

coef = st.floats(0.1, 2.0)


@st.composite
def streams(draw, n_max=6, m_max=10, bounded=False):
    n = draw(st.integers(1, n_max))
    costs = draw(st.lists(st.floats(0.5, 2.0), min_size=n, max_size=n))
    u = draw(st.lists(st.integers(1, 3), min_size=n, max_size=n)) if bounded else None
    rows = []
    for _ in range(draw(st.integers(1, m_max))):
        support = sorted(draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=min(n, 4))))
        entries = tuple((i, draw(coef)) for i in support)
        if u is not None and sum(a * u[i] for i, a in entries) < 1:
            entries = tuple((i, a / sum(a * u[j] for j, a in entries)) for i, a in entries)
        rows.append(ConstraintRow(entries, 1.0))
    return costs, u, rows


@settings(max_examples=60, deadline=None)
@given(streams())
def test_clp_stream_invariants(data):
    costs, _, rows = data
    state = solve_online(costs, rows)
    assert all(all(ev.checks.values()) for ev in state.events)
    assert check_lemmas(state).passed
    assert all(r.lhs(state.x) >= 1 - 1e-12 for r in rows)


@settings(max_examples=60, deadline=None)
@given(streams(bounded=True))
def test_box_and_rounding_invariants(data):
    costs, u, rows = data
    box = solve_online_box(costs, u, rows)
    for ev in box.events:
        assert all(ev.get("checks", {}).values()), ev
    integral = replay_rounding(box, 0)
    assert all(r.lhs(integral.X) >= 1 - 1e-12 for r in rows)
    assert np.all(integral.X <= np.asarray(u))


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.lists(st.floats(0.01, 5.0), min_size=n, max_size=n),
    st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n),
    st.lists(st.integers(1, 3), min_size=n, max_size=n))))
def test_greedy_within_two(data):
    c, a, u = map(np.asarray, data)
    if float(a @ u) < 1:
        return
    W = greedy_knapsack(c, a, u)
    assert float(a @ W) >= 1 - 1e-12 and np.all(W <= u)
    assert float(c @ W) <= 2 * knapsack_opt(c, a, u).value * (1 + 1e-9)


@given(st.floats(0, 10), st.floats(0, 1), st.sampled_from([1 / 8, 1 / 16, 0.3]),
       st.integers(1, 20))
def test_Z_branches(x, rho, tau, u):
    x = min(x, u)
    z = int(compute_Z([x], [rho], tau, [u])[0])
    assert 0 <= z <= u
    if x >= tau * u:
        assert z == u
    elif x < tau * rho:
        assert z == 0
    else:
        assert z == min(int(np.ceil(x / tau)), u)
