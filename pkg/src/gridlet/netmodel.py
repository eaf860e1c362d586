"""Power network data model and its simple undirected graph view."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _cc


class NetworkError(ValueError):
    """Base class for invalid network input."""


class ValidationError(NetworkError):
    pass


class IslandingError(NetworkError):
    """Raised when an operation needs a connected network and it is not."""


@dataclass(frozen=True)
class Bus:
    id: int
    is_slack: bool = False


@dataclass(frozen=True)
class Branch:
    """A series branch. ``index`` is None for out-of-service branches."""

    index: int | None
    from_bus: int
    to_bus: int
    reactance: float
    in_service: bool = True


@dataclass(frozen=True)
class Network:
    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]
    name: str = ""
    _bus_pos: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "buses", tuple(self.buses))
        object.__setattr__(self, "branches", tuple(self.branches))
        object.__setattr__(self, "_bus_pos", {b.id: i for i, b in enumerate(self.buses)})

    @classmethod
    def from_edges(cls, edges, slack, reactance=1.0, name="", buses=None):
        """Convenience constructor from ``(from, to[, x[, in_service]])`` tuples."""
        branches = []
        k = 0
        for e in edges:
            f, t = int(e[0]), int(e[1])
            x = float(e[2]) if len(e) > 2 else float(reactance)
            on = bool(e[3]) if len(e) > 3 else True
            branches.append(Branch(k if on else None, f, t, x, on))
            k += on
        if buses is None:
            seen = {}
            for br in branches:
                seen.setdefault(br.from_bus, None)
                seen.setdefault(br.to_bus, None)
            seen.setdefault(slack, None)
            buses = sorted(seen)
        net = cls(tuple(Bus(b, b == slack) for b in buses), tuple(branches), name)
        net.validate()
        return net

    # -- lookups -----------------------------------------------------------

    @property
    def n_bus(self) -> int:
        return len(self.buses)

    @cached_property
    def active(self) -> tuple[Branch, ...]:
        """In-service branches ordered by their dense index."""
        return tuple(sorted((b for b in self.branches if b.in_service), key=lambda b: b.index))

    @property
    def n_branch(self) -> int:
        return sum(1 for b in self.branches if b.in_service)

    @property
    def slack(self) -> int:
        for b in self.buses:
            if b.is_slack:
                return b.id
        raise ValidationError(f"network {self.name!r} has no slack bus")

    def bus_position(self, bus_id: int) -> int:
        try:
            return self._bus_pos[bus_id]
        except KeyError:
            raise ValidationError(f"unknown bus {bus_id}") from None

    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense bus positions of the from/to end of every in-service branch."""
        act = self.active
        f = np.fromiter((self._bus_pos[b.from_bus] for b in act), dtype=np.intp, count=len(act))
        t = np.fromiter((self._bus_pos[b.to_bus] for b in act), dtype=np.intp, count=len(act))
        return f, t

    def reactances(self) -> np.ndarray:
        return np.array([b.reactance for b in self.active], dtype=float)

    # -- validation and derived networks -----------------------------------

    def validate(self) -> "Network":
        if len(self._bus_pos) != len(self.buses):
            dup = [k for k, n in Counter(b.id for b in self.buses).items() if n > 1]
            raise ValidationError(f"duplicate bus ids: {dup}")
        n_slack = sum(b.is_slack for b in self.buses)
        if n_slack != 1:
            raise ValidationError(f"expected exactly one slack bus, found {n_slack}")
        idx = []
        for pos, br in enumerate(self.branches):
            where = f"branch {pos + 1} ({br.from_bus}-{br.to_bus})"
            for end in (br.from_bus, br.to_bus):
                if end not in self._bus_pos:
                    raise ValidationError(f"{where}: unknown bus {end}")
            if br.from_bus == br.to_bus:
                raise ValidationError(f"{where}: self-loop")
            if br.in_service:
                if br.reactance == 0 or not np.isfinite(br.reactance):
                    raise ValidationError(f"{where}: in-service branch with reactance {br.reactance}")
                idx.append(br.index)
            elif br.index is not None:
                raise ValidationError(f"{where}: out-of-service branch carries index {br.index}")
        if sorted(idx) != list(range(len(idx))):
            raise ValidationError("in-service branch indices are not dense 0..L-1")
        return self

    def with_slack(self, bus_id: int) -> "Network":
        self.bus_position(bus_id)
        return replace(self, buses=tuple(Bus(b.id, b.id == bus_id) for b in self.buses))

    def without_branches(self, indices: Iterable[int]) -> "Network":
        """Drop in-service branches by index; survivors are re-indexed densely
        in their original order."""
        drop = set(indices)
        out = []
        k = 0
        for br in self.branches:
            if not br.in_service:
                out.append(br)
            elif br.index not in drop:
                out.append(replace(br, index=k))
                k += 1
        return replace(self, branches=tuple(out))

    def scaled(self, factor: float) -> "Network":
        return replace(self, branches=tuple(replace(b, reactance=b.reactance * factor) for b in self.branches))

    # -- labels ------------------------------------------------------------

    @cached_property
    def _labels(self) -> tuple[str, ...]:
        """``FROM-TO`` label per in-service branch; parallel circuits get ``:k``."""
        act = self.active
        key = [frozenset((b.from_bus, b.to_bus)) for b in act]
        total = Counter(key)
        seen: Counter = Counter()
        out = []
        for b, k in zip(act, key):
            seen[k] += 1
            lab = f"{b.from_bus}-{b.to_bus}"
            out.append(lab if total[k] == 1 else f"{lab}:{seen[k]}")
        return tuple(out)

    def labels(self) -> list[str]:
        return list(self._labels)

    def label(self, index: int) -> str:
        return self._labels[index]

    def find_branch(self, spec: str) -> int:
        """Resolve ``FROM-TO`` or ``FROM-TO:k`` (either orientation) to a branch index."""
        circuit = None
        text = spec.strip()
        if ":" in text:
            text, c = text.split(":", 1)
            circuit = int(c)
        try:
            a, b = (int(s) for s in text.split("-"))
        except ValueError:
            raise ValidationError(f"bad line name {spec!r}, expected FROM-TO") from None
        hits = [br.index for br in self.active if {br.from_bus, br.to_bus} == {a, b}]
        if not hits:
            raise ValidationError(f"no in-service line {spec}")
        if circuit is None:
            if len(hits) > 1:
                raise ValidationError(f"line {spec} has {len(hits)} parallel circuits; add :k")
            return hits[0]
        if not 1 <= circuit <= len(hits):
            raise ValidationError(f"line {spec}: circuit {circuit} out of range 1..{len(hits)}")
        return hits[circuit - 1]

    def endpoint_key(self, index: int) -> tuple[int, int, int]:
        """Sort key ``(from_bus, to_bus, index)`` used for deterministic tie-breaks."""
        b = self.active[index]
        return (b.from_bus, b.to_bus, index)


@dataclass(frozen=True)
class SimpleGraph:
    """Undirected simple graph over dense node indices.

    ``edge_branches[e]`` lists every in-service branch collapsed onto edge ``e``;
    ``branch_edge`` is the inverse map.
    """

    n: int
    adj: tuple[frozenset, ...]
    edges: tuple[tuple[int, int], ...]
    edge_branches: tuple[tuple[int, ...], ...]
    branch_edge: dict
    node_ids: tuple[int, ...] = ()

    def edge_id(self, u: int, v: int) -> int:
        return self._edge_lookup[(u, v) if u < v else (v, u)]

    @property
    def _edge_lookup(self) -> dict:
        cache = self.__dict__.get("_lookup")
        if cache is None:
            cache = {e: i for i, e in enumerate(self.edges)}
            object.__setattr__(self, "_lookup", cache)
        return cache

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "SimpleGraph":
        """Graph on ``range(n)`` from an edge iterable (duplicates collapse)."""
        uniq = sorted({(min(u, v), max(u, v)) for u, v in edges if u != v})
        adj = [set() for _ in range(n)]
        for u, v in uniq:
            adj[u].add(v)
            adj[v].add(u)
        return cls(n, tuple(frozenset(a) for a in adj), tuple(uniq),
                   tuple((i,) for i in range(len(uniq))), {i: i for i in range(len(uniq))},
                   tuple(range(n)))


def build_graph(network: Network) -> SimpleGraph:
    act = network.active
    pos = [(network.bus_position(b.from_bus), network.bus_position(b.to_bus)) for b in act]
    groups: dict[tuple[int, int], list[int]] = {}
    for br, (u, v) in zip(act, pos):
        groups.setdefault((min(u, v), max(u, v)), []).append(br.index)
    edges = tuple(sorted(groups))
    adj = [set() for _ in range(network.n_bus)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    edge_branches = tuple(tuple(groups[e]) for e in edges)
    branch_edge = {b: e for e, bs in enumerate(edge_branches) for b in bs}
    return SimpleGraph(
        n=network.n_bus,
        adj=tuple(frozenset(a) for a in adj),
        edges=edges,
        edge_branches=edge_branches,
        branch_edge=branch_edge,
        node_ids=tuple(b.id for b in network.buses),
    )


def connected_components(graph: SimpleGraph) -> list[list[int]]:
    """Node partition into connected components, each sorted, ordered by smallest node."""
    if graph.n == 0:
        return []
    if graph.edges:
        u, v = np.array(graph.edges).T
    else:
        u = v = np.zeros(0, dtype=int)
    m = coo_matrix((np.ones(len(u)), (u, v)), shape=(graph.n, graph.n))
    _, lab = _cc(m, directed=False)
    comps: dict[int, list[int]] = {}
    for node, c in enumerate(lab):
        comps.setdefault(int(c), []).append(node)
    return sorted(comps.values(), key=lambda c: c[0])


def is_connected(network: Network) -> bool:
    return len(connected_components(build_graph(network))) <= 1


def component_of(graph: SimpleGraph, node: int, comps: Sequence[Sequence[int]] | None = None) -> list[int]:
    for c in comps if comps is not None else connected_components(graph):
        if node in c:
            return list(c)
    raise ValueError(f"node {node} not in graph")
