"""DC power flow and linear sensitivity factors (ISF, PTDF, LODF).

Conventions: branch flow is positive from ``from_bus`` to ``to_bus`` and equals
``(theta_from - theta_to) / x``; an injection at bus ``k`` is withdrawn at the
slack. Matrices are indexed by dense in-service branch index (rows) and by bus
position in ``Network.buses`` (ISF columns).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Mapping

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .netmodel import IslandingError, Network, build_graph, connected_components

#: |1 - self-PTDF| below this marks an outage as island-causing.
ISLAND_TOL = 1e-6


@dataclass(frozen=True)
class IsfMatrix:
    values: np.ndarray  # L x N
    slack: int  # bus position


@dataclass(frozen=True)
class PtdfMatrix:
    values: np.ndarray  # L x L

    @property
    def self_ptdf(self) -> np.ndarray:
        return np.diag(self.values).copy()


@dataclass(frozen=True)
class LodfMatrix:
    """``values[lm, lo]`` is the share of ``lo``'s pre-outage flow that shows up
    on ``lm`` once ``lo`` is out. Diagonal is -1; island-causing columns are NaN
    off the diagonal."""

    values: np.ndarray
    island: np.ndarray  # bool per outaged branch

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def column(self, lo: int) -> np.ndarray:
        """Defined entries of column ``lo`` with the diagonal masked out as NaN."""
        col = self.values[:, lo].copy()
        col[lo] = np.nan
        return col


@dataclass(frozen=True)
class SensitivityStack:
    isf: IsfMatrix
    ptdf: PtdfMatrix
    lodf: LodfMatrix


def incidence(network: Network) -> sp.csr_matrix:
    """Branch-bus incidence, +1 at the from end and -1 at the to end."""
    f, t = network.endpoints()
    L = len(f)
    rows = np.r_[np.arange(L), np.arange(L)]
    return sp.csr_matrix((np.r_[np.ones(L), -np.ones(L)], (rows, np.r_[f, t])), shape=(L, network.n_bus))


class DCSystem:
    """Nodal susceptance matrix of a connected network, reduced at the slack
    and factored once."""

    def __init__(self, network: Network):
        comps = connected_components(build_graph(network))
        if len(comps) > 1:
            slack = network.bus_position(network.slack)
            other = next(c for c in comps if slack not in c)
            ids = [network.buses[i].id for i in other]
            raise IslandingError(f"network is not connected; island without slack: buses {ids}")
        self.network = network
        self.A = incidence(network)
        self.b = 1.0 / network.reactances()
        self.slack = network.bus_position(network.slack)
        self.keep = np.array([i for i in range(network.n_bus) if i != self.slack], dtype=np.intp)
        Bbus = (self.A.T @ sp.diags(self.b) @ self.A).tocsc()
        self.Bf = (sp.diags(self.b) @ self.A).tocsr()
        self.lu = splu(Bbus[self.keep][:, self.keep].tocsc()) if len(self.keep) else None

    def angles(self, p: np.ndarray) -> np.ndarray:
        theta = np.zeros((self.network.n_bus,) + p.shape[1:])
        if self.lu is not None:
            theta[self.keep] = self.lu.solve(np.ascontiguousarray(p[self.keep]))
        return theta

    def flows(self, p: np.ndarray) -> np.ndarray:
        return self.Bf @ self.angles(p)


def _injection_vector(network: Network, injections) -> np.ndarray:
    if isinstance(injections, Mapping):
        p = np.zeros(network.n_bus)
        for bus, val in injections.items():
            p[network.bus_position(bus)] += val
        return p
    p = np.asarray(injections, dtype=float)
    if p.shape != (network.n_bus,):
        raise ValueError(f"expected {network.n_bus} injections, got shape {p.shape}")
    return p


def dc_flow(network: Network, injections) -> np.ndarray:
    """Branch flows for per-bus injections (array in bus order or ``{bus_id: p}``).

    Any imbalance in the slack's island is absorbed by the slack. Islands without
    the slack must carry zero injection; their flows are zero.
    """
    p = _injection_vector(network, injections)
    comps = connected_components(build_graph(network))
    if len(comps) <= 1:
        return DCSystem(network).flows(p)

    slack = network.bus_position(network.slack)
    main = set()
    for c in comps:
        if slack in c:
            main = set(c)
        elif np.any(np.abs(p[c]) > 1e-12):
            ids = [network.buses[i].id for i in c]
            raise IslandingError(f"nonzero injection in island without slack: buses {ids}")
    # solve on the slack's island only
    sub = network.without_branches(
        br.index for br in network.active if network.bus_position(br.from_bus) not in main
    )
    order = sorted(main)
    sub = type(network)(tuple(network.buses[i] for i in order), sub.branches, network.name)
    kept = [br.index for br in network.active if network.bus_position(br.from_bus) in main]
    flows = np.zeros(network.n_branch)
    flows[kept] = DCSystem(sub).flows(p[order])
    return flows


def isf_matrix(network: Network, system: DCSystem | None = None) -> IsfMatrix:
    sysm = system or DCSystem(network)
    N = network.n_bus
    isf = np.zeros((network.n_branch, N))
    if len(sysm.keep):
        X = sysm.lu.solve(np.eye(len(sysm.keep)))
        isf[:, sysm.keep] = sysm.Bf[:, sysm.keep] @ X
    return IsfMatrix(isf, sysm.slack)


def ptdf_matrix(isf: IsfMatrix, network: Network) -> PtdfMatrix:
    f, t = network.endpoints()
    return PtdfMatrix(isf.values[:, f] - isf.values[:, t])


def lodf_matrix(ptdf: PtdfMatrix) -> LodfMatrix:
    tau = ptdf.values
    den = 1.0 - np.diag(tau)
    island = np.abs(den) < ISLAND_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = tau / np.where(island, 1.0, den)[None, :]
    phi[:, island] = np.nan
    np.fill_diagonal(phi, -1.0)
    return LodfMatrix(phi, island)


def sensitivities(network: Network) -> SensitivityStack:
    isf = isf_matrix(network)
    ptdf = ptdf_matrix(isf, network)
    return SensitivityStack(isf, ptdf, lodf_matrix(ptdf))


def predict_outage_flows(lodf: LodfMatrix, pre_outage, outaged: int) -> np.ndarray:
    if lodf.island[outaged]:
        raise IslandingError(f"outage of branch {outaged} islands the network")
    w = np.asarray(pre_outage, dtype=float)
    post = w + lodf.values[:, outaged] * w[outaged]
    post[outaged] = 0.0
    return post


def dump_lodf_csv(lodf: LodfMatrix, network: Network) -> str:
    """L x L LODF as CSV. Header and first column carry branch labels; entries of
    island-causing columns read ``ISLAND``."""
    labels = network.labels()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["line"] + labels)
    for i, lab in enumerate(labels):
        row = [lab]
        for j in range(lodf.n):
            row.append("ISLAND" if lodf.island[j] and i != j else repr(float(lodf.values[i, j])))
        w.writerow(row)
    return buf.getvalue()
