"""Exact census of connected 4-node induced subgraphs, per edge.

Subgraphs are enumerated with ESU (the FANMOD enumeration): every connected
induced 4-node subgraph is produced exactly once, rooted at its smallest node.
Each occurrence is classified by its sorted degree sequence, which is a
complete invariant for connected graphs on four nodes, and credited to every
edge it contains.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from .netmodel import SimpleGraph


class Graphlet(Enum):
    M1 = (1, 1, 1, 3)  # star
    M2 = (1, 1, 2, 2)  # path
    M3 = (1, 2, 2, 3)  # paw (triangle with a tail)
    M4 = (2, 2, 2, 2)  # 4-cycle
    M5 = (2, 2, 3, 3)  # diamond
    M6 = (3, 3, 3, 3)  # 4-clique

    @property
    def label(self) -> str:
        return self.name

    @property
    def degrees(self) -> tuple[int, ...]:
        return self.value

    @property
    def n_edges(self) -> int:
        return sum(self.value) // 2

    @property
    def column(self) -> int:
        return _COLUMN[self]


GRAPHLETS = tuple(Graphlet)
LABELS = tuple(g.name for g in GRAPHLETS)
_COLUMN = {g: i for i, g in enumerate(GRAPHLETS)}
_BY_DEGREES = {g.value: g for g in GRAPHLETS}


class DisconnectedSubgraphError(ValueError):
    pass


@dataclass(frozen=True)
class GraphletCensus:
    """``edge_counts[e, c]``: occurrences of class ``c`` containing simple edge ``e``.
    ``totals[c]``: occurrences of class ``c`` in the whole graph."""

    graph: SimpleGraph
    edge_counts: np.ndarray
    totals: np.ndarray

    def counts(self, u: int, v: int) -> np.ndarray:
        return self.edge_counts[self.graph.edge_id(u, v)]

    def branch_counts(self, branch: int) -> np.ndarray:
        """Counts inherited by an in-service branch from its simple edge."""
        return self.edge_counts[self.graph.branch_edge[branch]]

    def __eq__(self, other):
        if not isinstance(other, GraphletCensus):
            return NotImplemented
        return (self.graph.edges == other.graph.edges
                and np.array_equal(self.edge_counts, other.edge_counts)
                and np.array_equal(self.totals, other.totals))

    __hash__ = None


def enumerate_4subgraphs(graph: SimpleGraph, roots: Sequence[int] | None = None) -> Iterator[tuple[int, ...]]:
    """Yield the node set (sorted tuple) of every connected induced 4-node subgraph.

    ``roots`` restricts enumeration to subgraphs whose smallest node is in it,
    which lets callers split the work without overlap.
    """
    adj = graph.adj
    k = 4

    def extend(sub: list[int], nbhd: set[int], ext: list[int], v: int):
        if len(sub) == k:
            yield tuple(sorted(sub))
            return
        ext = sorted(ext, reverse=True)
        while ext:
            w = ext.pop()
            # exclusive neighbours of w: not in sub and not adjacent to sub
            new = ext + [u for u in adj[w] if u > v and u not in nbhd and u not in sub]
            yield from extend(sub + [w], nbhd | adj[w], new, v)

    for v in range(graph.n) if roots is None else roots:
        ext = [u for u in adj[v] if u > v]
        yield from extend([v], set(adj[v]) | {v}, ext, v)


def induced_edges(graph: SimpleGraph, nodes: Sequence[int]) -> list[tuple[int, int]]:
    return [(a, b) if a < b else (b, a) for a, b in combinations(nodes, 2) if b in graph.adj[a]]


def classify(graph: SimpleGraph, nodes: Sequence[int]) -> Graphlet:
    if len(nodes) != 4:
        raise ValueError(f"expected 4 nodes, got {len(nodes)}")
    deg = {v: 0 for v in nodes}
    for a, b in induced_edges(graph, nodes):
        deg[a] += 1
        deg[b] += 1
    key = tuple(sorted(deg.values()))
    try:
        return _BY_DEGREES[key]
    except KeyError:
        raise DisconnectedSubgraphError(f"induced subgraph on {tuple(nodes)} is not connected") from None


def _partial_census(graph: SimpleGraph, roots) -> tuple[np.ndarray, np.ndarray]:
    counts = np.zeros((len(graph.edges), 6), dtype=np.int64)
    totals = np.zeros(6, dtype=np.int64)
    eid = graph._edge_lookup
    for nodes in enumerate_4subgraphs(graph, roots):
        edges = induced_edges(graph, nodes)
        deg = [0, 0, 0, 0]
        pos = {v: i for i, v in enumerate(nodes)}
        for a, b in edges:
            deg[pos[a]] += 1
            deg[pos[b]] += 1
        c = _COLUMN[_BY_DEGREES[tuple(sorted(deg))]]
        totals[c] += 1
        for e in edges:
            counts[eid[e], c] += 1
    return counts, totals


def edge_census(graph: SimpleGraph, workers: int = 1) -> GraphletCensus:
    """Per-edge graphlet incidence counts. With ``workers > 1`` the ESU roots are
    dealt round-robin to worker processes and the partial counts summed."""
    if workers <= 1 or graph.n < 2 * workers:
        counts, totals = _partial_census(graph, None)
    else:
        chunks = [range(i, graph.n, workers) for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_partial_census, [graph] * workers, chunks))
        counts = sum(p[0] for p in parts)
        totals = sum(p[1] for p in parts)
    return GraphletCensus(graph, counts, totals)


def edge_percentages(census: GraphletCensus, edge: int) -> tuple[np.ndarray, bool]:
    """Share (in %) of each class among the edge's own graphlet count.

    Returns ``(percentages, zero_total)``; an edge in no graphlet gets all zeros
    and ``zero_total=True``.
    """
    c = census.edge_counts[edge].astype(float)
    total = c.sum()
    if total == 0:
        return np.zeros(6), True
    return 100.0 * c / total, False
