import re
from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridlet.caseio import bundled_case_text
from gridlet.netmodel import (
    Branch,
    Bus,
    Network,
    ValidationError,
    build_graph,
    connected_components,
)


def bfs_components(graph):
    seen = set()
    comps = []
    for s in range(graph.n):
        if s in seen:
            continue
        comp, q = [], deque([s])
        seen.add(s)
        while q:
            u = q.popleft()
            comp.append(u)
            for v in graph.adj[u]:
                if v not in seen:
                    seen.add(v)
                    q.append(v)
        comps.append(sorted(comp))
    return sorted(comps, key=lambda c: c[0])


def test_triangle_graph(triangle):
    g = build_graph(triangle)
    assert g.n == 3
    assert len(g.edges) == 3
    assert all(len(a) == 2 for a in g.adj)


def test_parallel_branches_collapse():
    net = Network.from_edges([(1, 2), (1, 2)], slack=1)
    g = build_graph(net)
    assert g.edges == ((0, 1),)
    assert g.edge_branches == ((0, 1),)
    assert g.branch_edge == {0: 0, 1: 0}


def test_out_of_service_excluded():
    net = Network.from_edges([(1, 2, 0.1), (2, 3, 0.1), (1, 3, 0.1, 0)], slack=1)
    g = build_graph(net)
    assert len(g.edges) == 2
    assert net.n_branch == 2


def test_ieee30_counts(ieee30):
    text = bundled_case_text("case_ieee30")
    block = re.search(r"mpc\.branch = \[(.*?)\];", text, re.S).group(1)
    records = [r for r in block.strip().splitlines() if r.strip()]
    g = build_graph(ieee30)
    assert g.n == 30
    assert len(records) == 41
    assert len(g.edges) == 41


def test_components_small():
    tri = build_graph(Network.from_edges([(1, 2), (2, 3), (1, 3)], slack=1))
    assert connected_components(tri) == [[0, 1, 2]]
    two = build_graph(Network.from_edges([(1, 2), (3, 4)], slack=1))
    assert len(connected_components(two)) == 2


@pytest.mark.parametrize("name", ["ieee30", "case57", "case118"])
def test_components_match_bfs(name, request):
    g = build_graph(request.getfixturevalue(name))
    comps = connected_components(g)
    assert comps == bfs_components(g)
    assert len(comps) == 1


def test_build_graph_idempotent(case118):
    assert build_graph(case118) == build_graph(case118)


def test_branch_edge_sum(case118):
    g = build_graph(case118)
    assert sum(len(b) for b in g.edge_branches) == case118.n_branch
    assert len(g.edges) < case118.n_branch  # case118 has parallel circuits


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 12), st.integers(1, 12)), min_size=1, max_size=40))
def test_components_partition(pairs):
    edges = [(a, b) for a, b in pairs if a != b]
    if not edges:
        return
    net = Network.from_edges(edges, slack=edges[0][0])
    g = build_graph(net)
    comps = connected_components(g)
    assert sorted(v for c in comps for v in c) == list(range(g.n))
    assert comps == bfs_components(g)
    assert sum(len(b) for b in g.edge_branches) == net.n_branch
    for u in range(g.n):
        for v in g.adj[u]:
            assert u in g.adj[v] and u != v


def test_validation_errors():
    with pytest.raises(ValidationError, match="self-loop"):
        Network.from_edges([(1, 1)], slack=1)
    with pytest.raises(ValidationError, match="reactance"):
        Network.from_edges([(1, 2, 0.0)], slack=1)
    with pytest.raises(ValidationError, match="unknown bus"):
        Network((Bus(1, True),), (Branch(0, 1, 9, 0.1),)).validate()
    with pytest.raises(ValidationError, match="slack"):
        Network((Bus(1), Bus(2)), (Branch(0, 1, 2, 0.1),)).validate()


def test_labels_and_lookup():
    net = Network.from_edges([(1, 2), (2, 3), (1, 2), (3, 1)], slack=1)
    assert net.labels() == ["1-2:1", "2-3", "1-2:2", "3-1"]
    assert net.find_branch("1-2:2") == 2
    assert net.find_branch("1-3") == 3
    assert net.find_branch("3-2") == 1
    with pytest.raises(ValidationError, match="parallel"):
        net.find_branch("1-2")
    with pytest.raises(ValidationError):
        net.find_branch("4-5")


def test_without_branches_reindexes(ieee30):
    red = ieee30.without_branches([0])
    assert red.n_branch == 40
    assert [b.index for b in red.active] == list(range(40))
    assert red.active[0].from_bus == 1 and red.active[0].to_bus == 3
    red.validate()
