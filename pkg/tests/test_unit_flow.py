import math

import pytest
from hypothesis import given, settings, strategies as st

from expander_decomp.graph_core import Graph
from expander_decomp.unit_flow import (FlowContractError, FlowInstance, LevelState,
                                       excess, log2_ceil, parallel_unit_flow,
                                       push_then_relabel, staged_budget, sweep_bound)
from expander_decomp.verify import check_flow_feasible

from oracles import clique_edges, connected_graphs, flow_violations, naive_excess


@st.composite
def flow_instances(draw, max_n=9):
    G = draw(connected_graphs(max_n=max_n))
    eta = draw(st.integers(1, 4))
    cap = [draw(st.integers(1, eta)) for _ in range(G.m)]
    src = [draw(st.integers(0, eta * G.deg[v])) for v in range(G.n)]
    # keep total source within 2m by scaling down greedily
    while sum(src) > 2 * G.m:
        i = max(range(G.n), key=lambda v: src[v])
        src[i] -= 1
    sink = [draw(st.integers(0, 2 * G.deg[v])) for v in range(G.n)]
    h = draw(st.integers(2, 14))
    return G, cap, src, sink, h, eta


def test_excess_zero_instance():
    G = Graph(3, [(0, 1), (1, 2)])
    inst = FlowInstance.zero(G, [1, 1], [0, 0, 0], [0, 0, 0])
    assert excess(inst) == [0, 0, 0]


def test_excess_single_edge():
    G = Graph(2, [(0, 1)])
    inst = FlowInstance(G, [5], [2], [3, 0], [0, 2], [0, 2])
    assert excess(inst) == [1, 0]


def test_excess_rejects_infeasible():
    G = Graph(2, [(0, 1)])
    with pytest.raises(FlowContractError):
        excess(FlowInstance(G, [1], [2], [3, 0], [0, 2], [0, 0]))
    with pytest.raises(FlowContractError):
        excess(FlowInstance(G, [5], [0], [0, 0], [0, 1], [0, 2]))


@given(flow_instances())
def test_excess_matches_naive_recount(data):
    G, cap, src, sink, h, eta = data
    res = parallel_unit_flow(G, cap, src, sink, h, eta=eta)
    assert excess(res.inst) == naive_excess(res.inst)


def test_push_then_relabel_no_excess_is_noop():
    G = Graph(3, clique_edges(3))
    inst = FlowInstance.zero(G, [2] * 3, [0] * 3, [1] * 3)
    lvl = LevelState([0, 1, 2], 5)
    push_then_relabel(inst, lvl, [1] * 3)
    assert inst.flow == [0, 0, 0] and lvl.level == [0, 1, 2]


def test_push_then_relabel_hand_example():
    # edge u-v, cap 2, l(u)=1, l(v)=0, three units at u, budgets 0 / 5
    G = Graph(2, [(0, 1)])
    inst = FlowInstance.zero(G, [2], [3, 0], [0, 5])
    lvl = LevelState([1, 0], 10)
    push_then_relabel(inst, lvl, [0, 5])
    assert inst.flow == [2]
    assert inst.absorbed == [0, 2]
    assert excess(inst) == [1, 0]
    assert lvl.level == [2, 0]


def test_push_then_relabel_settles_at_top():
    G = Graph(2, [(0, 1)])
    inst = FlowInstance(G, [1], [1], [2, 0], [0, 1], [0, 1])
    lvl = LevelState([4, 0], 4)
    push_then_relabel(inst, lvl, [0, 1])
    assert lvl.level[0] == 5


def test_push_then_relabel_rejects_oversized_budget():
    G = Graph(2, [(0, 1)])
    inst = FlowInstance.zero(G, [1], [1, 0], [0, 1])
    with pytest.raises(FlowContractError):
        push_then_relabel(inst, LevelState.zeros(2, 3), [0, 2])


def test_parallel_unit_flow_zero_source():
    G = Graph(4, clique_edges(4))
    res = parallel_unit_flow(G, [3] * 6, [0] * 4, [3] * 4, 10)
    assert res.flow == [0] * 6 and res.level == [0] * 4


def test_parallel_unit_flow_k4_routes_everything():
    G = Graph(4, clique_edges(4))
    res = parallel_unit_flow(G, [4] * 6, list(G.deg), list(G.deg), 20)
    assert excess(res.inst) == [0] * 4
    assert res.inst.absorbed == [3] * 4
    assert flow_violations(res.inst, res.levels, log2_ceil(4)) == []
    # stage 1 may absorb one unit per vertex but must halve the unsettled
    # mass, so the symmetric clique settles together and levels end at h
    assert res.level == [20] * 4


def test_parallel_unit_flow_overloaded():
    # path 0-1-2: 4 units at 0, total sink 2
    G = Graph(3, [(0, 1), (1, 2)])
    res = parallel_unit_flow(G, [2, 2], [2, 2, 0], [1, 0, 1], 6)
    ex = excess(res.inst)
    assert sum(ex) == 2
    assert any(res.level[v] == 6 and ex[v] > 0 for v in range(3))
    assert flow_violations(res.inst, res.levels, log2_ceil(3)) == []


def test_parallel_unit_flow_preconditions():
    G = Graph(2, [(0, 1)])
    with pytest.raises(FlowContractError, match="2m"):
        parallel_unit_flow(G, [1], [2, 1], [0, 0], 3)
    with pytest.raises(FlowContractError, match="eta"):
        parallel_unit_flow(G, [3], [1, 0], [0, 0], 3, eta=2)
    with pytest.raises(FlowContractError):
        parallel_unit_flow(G, [1], [2, 0], [0, 0], 3, eta=1)


def test_staged_budget_is_monotone_and_capped():
    total = [0, 1, 5, 17]
    prev = [0] * 4
    for i in range(1, 25):
        b = staged_budget([0] * 4, total, i, 24)
        assert all(p <= x <= t for p, x, t in zip(prev, b, total))
        prev = b
    assert prev == total


@settings(max_examples=60)
@given(flow_instances(max_n=8), st.booleans())
def test_invariants_after_every_sweep(data, gap):
    G, cap, src, sink, h, eta = data
    seen = {"levels": [0] * G.n}
    mass = sum(src)

    def audit(engine):
        inst, lev = engine.inst, engine.lvl.level
        assert check_flow_feasible(inst)
        assert sum(inst.absorbed) + sum(excess(inst)) == mass
        assert all(a >= b for a, b in zip(lev, seen["levels"]))
        seen["levels"] = list(lev)
        for e, (a, b) in enumerate(G.edges):
            for u, v in ((a, b), (b, a)):
                if lev[u] > lev[v] + 1:
                    assert inst.residual(u, e) == 0

    res = parallel_unit_flow(G, cap, src, sink, h, eta=eta, gap_lift=gap, fast_forward=False,
                             observer=audit)
    assert flow_violations(res.inst, res.levels, log2_ceil(G.n)) == []


@given(flow_instances())
def test_fast_paths_keep_properties(data):
    G, cap, src, sink, h, eta = data
    res = parallel_unit_flow(G, cap, src, sink, h, eta=eta)
    assert flow_violations(res.inst, res.levels, log2_ceil(G.n)) == []
    assert res.stats.overflow_sweeps == 0 or sum(src) > sum(sink)
    bound = sweep_bound(G, sink, eta, h)
    assert all(s <= bound for s in res.stats.stage_sweeps)


@given(flow_instances(max_n=7))
def test_fast_forward_matches_plain_sweeps(data):
    G, cap, src, sink, h, eta = data
    a = parallel_unit_flow(G, cap, src, sink, h, eta=eta, gap_lift=False, fast_forward=True)
    b = parallel_unit_flow(G, cap, src, sink, h, eta=eta, gap_lift=False, fast_forward=False)
    assert a.flow == b.flow and a.level == b.level and a.inst.absorbed == b.inst.absorbed


@given(flow_instances())
def test_deterministic(data):
    G, cap, src, sink, h, eta = data
    a = parallel_unit_flow(G, cap, src, sink, h, eta=eta)
    b = parallel_unit_flow(G, cap, src, sink, h, eta=eta)
    assert a.flow == b.flow and a.level == b.level


def test_sweep_bound_formula():
    G = Graph(4, clique_edges(4))
    assert sweep_bound(G, [3] * 4, 2, 10) == 64 * 2 * 10 * 2 / 1 + 1
    assert math.isinf(sweep_bound(G, [0, 3, 3, 3], 2, 10))
