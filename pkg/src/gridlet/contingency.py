"""N-1 and N-2 critical-line screening by maximum |LODF|.

The criticality of an outage is the largest |LODF| over the surviving lines
(the outaged line's own entry excluded). Island-causing outages have no LODF
and are ranked after every numeric record.

Ranking ties: values are compared after rounding to ``TIE_DECIMALS`` places so
that entries equal in exact arithmetic (e.g. |LODF| = 1 for lines in series)
tie regardless of rounding noise; ties fall back to the ``(from_bus, to_bus)``
order of the outaged line.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dcsens import LodfMatrix, sensitivities
from .netmodel import Network

TIE_DECIMALS = 9


def _key(value: float) -> float:
    return round(float(value), TIE_DECIMALS)


@dataclass(frozen=True)
class N1Record:
    outage: int
    max_abs_lodf: float | None
    argmax: int | None
    island_causing: bool


@dataclass(frozen=True)
class N2Record:
    first: int
    second: int | None
    max_abs_lodf: float | None
    argmax: int | None
    feasible: bool


@dataclass(frozen=True)
class N2Result:
    records: list[N2Record]
    best: N2Record | None


def default_threads() -> int:
    env = os.environ.get("GRIDLET_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def column_max(lodf: LodfMatrix, lo: int, network: Network) -> tuple[float, int] | None:
    """Largest |LODF| in column ``lo`` and the line attaining it (first in
    ``(from_bus, to_bus)`` order among ties). None if the column is undefined or
    has no surviving line."""
    if lodf.island[lo]:
        return None
    col = np.abs(lodf.column(lo))
    ok = np.flatnonzero(~np.isnan(col))
    if ok.size == 0:
        return None
    top = _key(col[ok].max())
    cand = [int(i) for i in ok if _key(col[i]) == top]
    arg = min(cand, key=network.endpoint_key)
    return float(col[arg]), arg


def _n1_order(records: Sequence[N1Record], network: Network, reverse: bool = False):
    def key(r: N1Record):
        if r.max_abs_lodf is None:
            return (True, 0.0, network.endpoint_key(r.outage))
        v = _key(r.max_abs_lodf)
        return (False, v if reverse else -v, network.endpoint_key(r.outage))

    return sorted(records, key=key)


def n1_scan(network: Network, lodf: LodfMatrix | None = None) -> list[N1Record]:
    """One record per in-service branch, most critical first."""
    if lodf is None:
        lodf = sensitivities(network).lodf
    recs = []
    for lo in range(network.n_branch):
        hit = column_max(lodf, lo, network)
        if hit is None:
            recs.append(N1Record(lo, None, None, bool(lodf.island[lo])))
        else:
            recs.append(N1Record(lo, hit[0], hit[1], False))
    return _n1_order(recs, network)


def least_critical(records: Sequence[N1Record], k: int, network: Network) -> list[N1Record]:
    """The ``k`` non-islanding records with the smallest max |LODF|, least critical first."""
    if k <= 0:
        return []
    numeric = [r for r in records if r.max_abs_lodf is not None]
    return _n1_order(numeric, network, reverse=True)[:k]


def reduced_lodf(network: Network, first: int) -> tuple[Network, LodfMatrix, np.ndarray]:
    """LODF of the network with ``first`` removed, plus the map from reduced to
    original branch indices."""
    reduced = network.without_branches([first])
    orig = np.array([i for i in range(network.n_branch) if i != first], dtype=np.intp)
    return reduced, sensitivities(reduced).lodf, orig


def _best_second(network: Network, first: int, exclude: frozenset) -> N2Record:
    reduced, lodf, orig = reduced_lodf(network, first)
    best = None
    for l2 in range(reduced.n_branch):
        if (first, int(orig[l2])) in exclude:
            continue
        hit = column_max(lodf, l2, reduced)
        if hit is None:
            continue
        key = (-_key(hit[0]), network.endpoint_key(orig[l2]), network.endpoint_key(orig[hit[1]]))
        if best is None or key < best[0]:
            best = (key, int(orig[l2]), hit[0], int(orig[hit[1]]))
    if best is None:
        return N2Record(first, None, None, None, False)
    return N2Record(first, best[1], best[2], best[3], True)


def n2_scan(network: Network, threads: int | None = None,
            exclude: Iterable[tuple[int, int]] = ()) -> N2Result:
    """For every non-islanding first outage, rebuild the network without it and
    find the second outage whose LODF column holds the largest |LODF|.

    ``exclude`` removes ``(first, second)`` candidate pairs from the search.
    Records are returned most critical first; infeasible first outages (every
    second outage islands) trail with ``feasible=False``.
    """
    if network.n_branch < 3:
        return N2Result([], None)
    base = sensitivities(network).lodf
    firsts = [lo for lo in range(network.n_branch) if not base.island[lo]]
    excl = frozenset((int(a), int(b)) for a, b in exclude)
    n = threads or default_threads()
    if n > 1 and len(firsts) > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            recs = list(pool.map(lambda lo: _best_second(network, lo, excl), firsts))
    else:
        recs = [_best_second(network, lo, excl) for lo in firsts]

    def key(r: N2Record):
        if not r.feasible:
            return (1, 0.0, network.endpoint_key(r.first), ())
        return (0, -_key(r.max_abs_lodf), network.endpoint_key(r.first), network.endpoint_key(r.second))

    recs.sort(key=key)
    best = recs[0] if recs and recs[0].feasible else None
    return N2Result(recs, best)
