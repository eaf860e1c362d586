"""Slow, independent cross-checks for the fast paths.

Nothing here reuses the sensitivity, contingency or ESU code: DC flows are
solved densely from a freshly assembled susceptance matrix, LODF columns are
measured by physically removing the branch, and graphlets are counted over all
4-node combinations.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graphlets import GraphletCensus
from .netmodel import IslandingError, Network, SimpleGraph

BRUTE_NODE_LIMIT = 60

# sorted degree sequence -> census column (M1..M6)
_CLASSES = {(1, 1, 1, 3): 0, (1, 1, 2, 2): 1, (1, 2, 2, 3): 2,
            (2, 2, 2, 2): 3, (2, 2, 3, 3): 4, (3, 3, 3, 3): 5}


@dataclass(frozen=True)
class OracleReport:
    quantity: str
    fast: float
    oracle: float
    difference: float
    tolerance: float
    passed: bool

    @classmethod
    def compare(cls, quantity: str, fast: float, oracle: float, tolerance: float) -> "OracleReport":
        d = abs(float(fast) - float(oracle))
        return cls(quantity, float(fast), float(oracle), d, tolerance, bool(d <= tolerance))


def _reachable(n: int, edges, start: int) -> set[int]:
    nbr = [[] for _ in range(n)]
    for u, v in edges:
        nbr[u].append(v)
        nbr[v].append(u)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            for v in nbr[u]:
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return seen


def dense_dc_flow(network: Network, injections, removed: int | None = None) -> np.ndarray:
    """DC branch flows with an optional branch taken out of service.

    Returns a vector over the original in-service branches; the removed branch
    carries zero. Raises IslandingError if any bus with nonzero injection loses
    its path to the slack.
    """
    pos = {b.id: i for i, b in enumerate(network.buses)}
    slack = pos[network.slack]
    lines = [(i, pos[b.from_bus], pos[b.to_bus], 1.0 / b.reactance)
             for i, b in enumerate(sorted((b for b in network.branches if b.in_service),
                                          key=lambda b: b.index))]
    live = [ln for ln in lines if ln[0] != removed]
    n = len(network.buses)
    p = np.asarray(injections, dtype=float)
    reach = _reachable(n, [(u, v) for _, u, v, _ in live], slack)
    stranded = [i for i in range(n) if i not in reach and abs(p[i]) > 1e-12]
    if stranded:
        raise IslandingError(f"buses {[network.buses[i].id for i in stranded]} cut off from the slack")
    B = np.zeros((n, n))
    for _, u, v, b in live:
        B[u, u] += b
        B[v, v] += b
        B[u, v] -= b
        B[v, u] -= b
    idx = sorted(reach - {slack})
    theta = np.zeros(n)
    if idx:
        theta[idx] = np.linalg.solve(B[np.ix_(idx, idx)], p[idx])
    flows = np.zeros(len(lines))
    for i, u, v, b in live:
        flows[i] = b * (theta[u] - theta[v])
    return flows


def outage_oracle(network: Network, injections, outaged: int) -> np.ndarray:
    """Post-outage flows from a fresh DC solve without ``outaged``."""
    _check_bridge(network, outaged)
    return dense_dc_flow(network, injections, removed=outaged)


def _check_bridge(network: Network, branch: int):
    pos = {b.id: i for i, b in enumerate(network.buses)}
    act = sorted((b for b in network.branches if b.in_service), key=lambda b: b.index)
    edges = [(pos[b.from_bus], pos[b.to_bus]) for i, b in enumerate(act) if i != branch]
    u = pos[act[branch].from_bus]
    v = pos[act[branch].to_bus]
    if v not in _reachable(len(network.buses), edges, u):
        raise IslandingError(f"removing branch {act[branch].from_bus}-{act[branch].to_bus} islands the network")


def brute_lodf(network: Network) -> tuple[np.ndarray, np.ndarray]:
    """LODF by explicit outage: for each branch, push 1 p.u. across its ends,
    remove it, and take the change in every other flow over its pre-outage flow.

    Returns ``(values, island)`` laid out like the fast LODF matrix.
    """
    act = sorted((b for b in network.branches if b.in_service), key=lambda b: b.index)
    pos = {b.id: i for i, b in enumerate(network.buses)}
    L = len(act)
    values = np.full((L, L), np.nan)
    island = np.zeros(L, dtype=bool)
    for lo, br in enumerate(act):
        p = np.zeros(len(network.buses))
        p[pos[br.from_bus]] += 1.0
        p[pos[br.to_bus]] -= 1.0
        try:
            _check_bridge(network, lo)
        except IslandingError:
            island[lo] = True
            values[lo, lo] = -1.0
            continue
        pre = dense_dc_flow(network, p)
        post = dense_dc_flow(network, p, removed=lo)
        values[:, lo] = (post - pre) / pre[lo]
        values[lo, lo] = -1.0
    return values, island


def n2_rebuild_oracle(network: Network, first: int) -> tuple[np.ndarray, np.ndarray]:
    """LODF ``(values, island)`` of the network rebuilt without branch ``first``.

    Rows and columns follow the surviving branches in original index order.
    """
    _check_bridge(network, first)
    branches = []
    k = 0
    for b in network.branches:
        if b.in_service and b.index == first:
            continue
        if b.in_service:
            branches.append(type(b)(k, b.from_bus, b.to_bus, b.reactance, True))
            k += 1
        else:
            branches.append(b)
    reduced = Network(network.buses, tuple(branches), network.name)
    return brute_lodf(reduced)


def brute_census(graph: SimpleGraph) -> GraphletCensus:
    """Graphlet census by testing every 4-node subset."""
    if graph.n > BRUTE_NODE_LIMIT:
        raise ValueError(f"brute-force census refused: {graph.n} nodes > {BRUTE_NODE_LIMIT}")
    eid = {e: i for i, e in enumerate(graph.edges)}
    counts = np.zeros((len(graph.edges), 6), dtype=np.int64)
    totals = np.zeros(6, dtype=np.int64)
    for quad in combinations(range(graph.n), 4):
        present = [(a, b) for a, b in combinations(quad, 2) if b in graph.adj[a]]
        deg = tuple(sorted(sum(v in e for e in present) for v in quad))
        c = _CLASSES.get(deg)
        if c is None:
            continue
        if len(_reachable(graph.n, present, quad[0]) & set(quad)) != 4:
            continue
        totals[c] += 1
        for e in present:
            counts[eid[e], c] += 1
    return GraphletCensus(graph, counts, totals)


def verify_case(network: Network, tolerance: float = 1e-8, injections=None) -> list[OracleReport]:
    """Run every oracle on ``network`` and compare against the fast paths."""
    from .contingency import n1_scan
    from .dcsens import dc_flow, predict_outage_flows, sensitivities
    from .graphlets import edge_census
    from .netmodel import build_graph

    reports = []
    stack = sensitivities(network)
    lodf = stack.lodf
    n = network.n_bus
    if injections is None:
        # fixed, seed-free pattern in [-1, 1] that sums to zero
        p = np.cos(np.arange(n) * 2.399963)
        p -= p.mean()
        p /= max(1.0, np.abs(p).max())
    else:
        p = np.asarray(injections, dtype=float)
    pre = dc_flow(network, p)

    worst_flow, worst_lodf, flag_mismatch = 0.0, 0.0, 0
    ref_vals, ref_island = brute_lodf(network)
    for lo in range(network.n_branch):
        if ref_island[lo] != lodf.island[lo]:
            flag_mismatch += 1
            continue
        if lodf.island[lo]:
            continue
        fast = predict_outage_flows(lodf, pre, lo) - pre
        slow = outage_oracle(network, p, lo) - pre
        worst_flow = max(worst_flow, float(np.max(np.abs(fast - slow))))
        worst_lodf = max(worst_lodf, float(np.max(np.abs(lodf.values[:, lo] - ref_vals[:, lo]))))
    reports.append(OracleReport.compare("island flags (mismatches)", flag_mismatch, 0, 0))
    reports.append(OracleReport.compare("post-outage flow change (max abs diff)", worst_flow, 0.0, tolerance))
    reports.append(OracleReport.compare("LODF entries (max abs diff)", worst_lodf, 0.0, tolerance))

    worst_max = 0.0
    for rec in n1_scan(network, lodf):
        if rec.max_abs_lodf is None:
            continue
        col = np.abs(ref_vals[:, rec.outage])
        col[rec.outage] = np.nan
        worst_max = max(worst_max, abs(rec.max_abs_lodf - np.nanmax(col)))
    reports.append(OracleReport.compare("N-1 max |LODF| (max abs diff)", worst_max, 0.0, tolerance))

    graph = build_graph(network)
    if graph.n <= BRUTE_NODE_LIMIT:
        esu = edge_census(graph)
        ref = brute_census(graph)
        diff = int(np.abs(esu.edge_counts - ref.edge_counts).sum() + np.abs(esu.totals - ref.totals).sum())
        reports.append(OracleReport.compare("graphlet census (count mismatches)", diff, 0, 0))
    return reports
