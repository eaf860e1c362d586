import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridlet.dcsens import (
    ISLAND_TOL,
    dc_flow,
    dump_lodf_csv,
    incidence,
    isf_matrix,
    predict_outage_flows,
    ptdf_matrix,
    sensitivities,
)
from gridlet.netmodel import IslandingError, Network
from gridlet.oracle import outage_oracle

# Exact rational DC solves of the equal-reactance triangle (tests/conftest.py
# exact_dc_flow), lines ordered (1-2, 2-3, 1-3), slack bus 3:
#   1 p.u. from bus 1 to bus 2        -> ( 2/3, -1/3, 1/3)
#   1 p.u. at bus 1, withdrawn at 3   -> ( 1/3,  1/3, 2/3)
#   1 p.u. at bus 2, withdrawn at 3   -> (-1/3,  2/3, 1/3)
TRI_TRANSFER_12 = np.array([2, -1, 1]) / 3
TRI_ISF = np.array([[1, -1, 0], [1, 2, 0], [2, 1, 0]]) / 3


def balance(network, flows):
    A = incidence(network).toarray()
    return A.T @ flows  # net outflow per bus


def test_triangle_values_match_exact_oracle(triangle):
    from conftest import exact_dc_flow

    lines = [(0, 1, "0.1"), (1, 2, "0.1"), (0, 2, "0.1")]
    exact = [float(v) for v in exact_dc_flow(3, lines, 2, [1, -1, 0])]
    np.testing.assert_allclose(exact, TRI_TRANSFER_12, atol=0)
    np.testing.assert_allclose(dc_flow(triangle, [1, -1, 0]), TRI_TRANSFER_12, atol=1e-14)


def test_zero_injection(ieee30):
    assert np.all(dc_flow(ieee30, np.zeros(30)) == 0)


def test_two_bus_transfer():
    net = Network.from_edges([(1, 2, 0.3)], slack=2)
    assert dc_flow(net, {1: 1.0, 2: -1.0}) == pytest.approx([1.0])


def test_isf_triangle(triangle):
    isf = isf_matrix(triangle)
    np.testing.assert_allclose(isf.values, TRI_ISF, atol=1e-14)
    assert np.all(isf.values[:, 2] == 0)


def test_isf_path(path3):
    isf = isf_matrix(path3)
    np.testing.assert_allclose(isf.values[:, 0], [1, 1], atol=1e-14)


def test_ptdf_triangle(triangle):
    ptdf = ptdf_matrix(isf_matrix(triangle), triangle)
    np.testing.assert_allclose(np.diag(ptdf.values), [2 / 3] * 3, atol=1e-14)
    off = ptdf.values[~np.eye(3, dtype=bool)]
    np.testing.assert_allclose(np.abs(off), 1 / 3, atol=1e-14)


def test_ptdf_bridge_diagonal(path3, ieee30):
    ptdf = ptdf_matrix(isf_matrix(path3), path3)
    np.testing.assert_allclose(np.diag(ptdf.values), [1, 1], atol=1e-14)
    stack = sensitivities(ieee30)
    d = stack.ptdf.self_ptdf
    assert np.all(d > -1e-12) and np.all(d < 1 + 1e-12)


def test_lodf_triangle(triangle):
    lodf = sensitivities(triangle).lodf
    off = lodf.values[~np.eye(3, dtype=bool)]
    np.testing.assert_allclose(np.abs(off), 1.0, atol=1e-12)
    assert np.all(np.diag(lodf.values) == -1)
    assert not lodf.island.any()


def test_lodf_bridge_columns(path3, ieee30):
    lodf = sensitivities(path3).lodf
    assert lodf.island.all()
    assert np.isnan(lodf.values[1, 0]) and np.isnan(lodf.values[0, 1])
    lodf30 = sensitivities(ieee30).lodf
    bridges = sorted(ieee30.label(i) for i in np.flatnonzero(lodf30.island))
    assert bridges == ["12-13", "25-26", "9-11"]


def test_predict_outage_flows_triangle(triangle):
    lodf = sensitivities(triangle).lodf
    pre = dc_flow(triangle, [1, -1, 0])
    post = predict_outage_flows(lodf, pre, 0)
    np.testing.assert_allclose(post, [0, -1, 1], atol=1e-12)
    assert predict_outage_flows(lodf, np.zeros(3), 1) == pytest.approx(np.zeros(3))


def test_predict_outage_flows_island(path3):
    lodf = sensitivities(path3).lodf
    with pytest.raises(IslandingError):
        predict_outage_flows(lodf, [1.0, 1.0], 0)


def test_ieee30_outages_match_oracle(ieee30):
    rng = np.random.default_rng(7)
    p = rng.uniform(-1, 1, ieee30.n_bus)
    p -= p.mean()
    lodf = sensitivities(ieee30).lodf
    pre = dc_flow(ieee30, p)
    for lo in range(ieee30.n_branch):
        if lodf.island[lo]:
            with pytest.raises(IslandingError):
                outage_oracle(ieee30, p, lo)
            continue
        got = predict_outage_flows(lodf, pre, lo)
        np.testing.assert_allclose(got, outage_oracle(ieee30, p, lo), atol=1e-8, rtol=0)


@pytest.mark.parametrize("name", ["ieee30", "case118"])
def test_conservation(name, request):
    net = request.getfixturevalue(name)
    rng = np.random.default_rng(3)
    p = rng.uniform(-1, 1, net.n_bus)
    flows = dc_flow(net, p)
    out = balance(net, flows)
    slack = net.bus_position(net.slack)
    mask = np.arange(net.n_bus) != slack
    np.testing.assert_allclose(out[mask], p[mask], atol=1e-9)


def test_slack_invariance(ieee30):
    base = sensitivities(ieee30).lodf
    for s in (2, 10, 17, 30):
        other = sensitivities(ieee30.with_slack(s)).lodf
        assert np.array_equal(base.island, other.island)
        ok = ~np.isnan(base.values)
        assert np.max(np.abs(base.values[ok] - other.values[ok])) < 1e-9


@pytest.mark.parametrize("factor", [1e-3, 0.37, 250.0])
def test_reactance_scaling(ieee30, factor):
    a = sensitivities(ieee30)
    b = sensitivities(ieee30.scaled(factor))
    for x, y in [(a.isf.values, b.isf.values), (a.ptdf.values, b.ptdf.values)]:
        assert np.max(np.abs(x - y)) < 1e-9
    ok = ~np.isnan(a.lodf.values)
    assert np.max(np.abs(a.lodf.values[ok] - b.lodf.values[ok])) < 1e-9


def test_lodf_times_denominator_is_ptdf(ieee30):
    s = sensitivities(ieee30)
    tau = s.ptdf.values
    d = np.diag(tau)
    for lo in np.flatnonzero(~s.lodf.island):
        for lm in range(ieee30.n_branch):
            if lm != lo:
                assert s.lodf.values[lm, lo] * (1 - d[lo]) == pytest.approx(tau[lm, lo], abs=1e-12)


def test_island_threshold(ieee30):
    s = sensitivities(ieee30)
    d = s.ptdf.self_ptdf
    assert np.array_equal(s.lodf.island, np.abs(1 - d) < ISLAND_TOL)
    # meshed lines sit far away from the threshold
    assert np.min(np.abs(1 - d[~s.lodf.island])) > 1e-3


def test_disconnected_network():
    net = Network.from_edges([(1, 2), (3, 4)], slack=1)
    with pytest.raises(IslandingError, match="3"):
        isf_matrix(net)
    flows = dc_flow(net, {1: 1.0, 2: -1.0})
    np.testing.assert_allclose(flows, [1.0, 0.0])
    with pytest.raises(IslandingError, match="island"):
        dc_flow(net, {3: 1.0, 4: -1.0})


def test_parallel_circuits_share_flow():
    net = Network.from_edges([(1, 2, 0.1), (1, 2, 0.3), (2, 3, 0.1), (1, 3, 0.2)], slack=3)
    s = sensitivities(net)
    assert not s.lodf.island.any()
    # circuit 0 out: the 0.3 twin and the 1-3-2 detour (0.2 + 0.1) split evenly
    assert s.lodf.values[1, 0] == pytest.approx(0.5, abs=1e-12)
    assert s.lodf.values[2, 0] == pytest.approx(-0.5, abs=1e-12)


def test_dump_lodf_csv(path3, triangle):
    text = dump_lodf_csv(sensitivities(path3).lodf, path3)
    lines = text.strip().splitlines()
    assert lines[0] == "line,1-2,2-3"
    assert lines[1] == "1-2,-1.0,ISLAND"
    tri = dump_lodf_csv(sensitivities(triangle).lodf, triangle).splitlines()
    assert len(tri) == 4 and "ISLAND" not in "".join(tri)


@st.composite
def meshed_networks(draw):
    n = draw(st.integers(3, 9))
    # a ring guarantees connectivity; chords add meshing
    edges = [(i, i % n + 1) for i in range(1, n + 1)]
    chords = draw(st.lists(st.tuples(st.integers(1, n), st.integers(1, n)), max_size=8))
    edges += [(a, b) for a, b in chords if a != b]
    xs = draw(st.lists(st.floats(0.01, 2.0), min_size=len(edges), max_size=len(edges)))
    slack = draw(st.integers(1, n))
    return Network.from_edges([(a, b, x) for (a, b), x in zip(edges, xs)], slack=slack)


@settings(max_examples=60, deadline=None)
@given(meshed_networks(), st.data())
def test_random_networks_outage_identity(net, data):
    p = np.array(data.draw(st.lists(st.floats(-1, 1), min_size=net.n_bus, max_size=net.n_bus)))
    p -= p.mean()
    s = sensitivities(net)
    pre = dc_flow(net, p)
    assert np.allclose(balance(net, pre)[np.arange(net.n_bus) != net.bus_position(net.slack)],
                       p[np.arange(net.n_bus) != net.bus_position(net.slack)], atol=1e-9)
    for lo in range(net.n_branch):
        if s.lodf.island[lo]:
            continue
        np.testing.assert_allclose(predict_outage_flows(s.lodf, pre, lo), outage_oracle(net, p, lo),
                                   atol=1e-8, rtol=0)
