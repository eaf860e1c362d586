"""Join contingency rankings with graphlet counts into tables and plot data."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .contingency import N1Record, N2Result, least_critical, n1_scan, n2_scan
from .dcsens import sensitivities
from .graphlets import LABELS, GraphletCensus, edge_census, edge_percentages
from .netmodel import Network, build_graph

log = logging.getLogger(__name__)

TABLE_HEADER = ["From", "To"] + list(LABELS)


@dataclass(frozen=True)
class LineRow:
    from_bus: int
    to_bus: int
    label: str
    counts: tuple[int, ...]
    max_abs_lodf: float | None

    def table_cells(self) -> list:
        return [self.from_bus, self.to_bus, *self.counts]


@dataclass
class CaseReport:
    name: str
    top: list[LineRow] = field(default_factory=list)
    bottom: list[LineRow] = field(default_factory=list)
    n1_max: float | None = None
    n1_line: str | None = None
    n1_percentages: list[float] | None = None
    n2_max: float | None = None
    n2_pair: tuple[str, str] | None = None
    n2_percentages: list[float] | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n2_pair"] = list(self.n2_pair) if self.n2_pair else None
        return d


@dataclass(frozen=True)
class BubbleRecord:
    case: str
    variant: str  # "n1" or "n2"
    graphlet: str
    percentage: float
    max_abs_lodf: float


def _row(network: Network, census: GraphletCensus, branch: int, value) -> LineRow:
    br = network.active[branch]
    counts = tuple(int(c) for c in census.branch_counts(branch))
    return LineRow(br.from_bus, br.to_bus, network.label(branch), counts, value)


def _percentages(census: GraphletCensus, branch: int) -> list[float]:
    pct, _ = edge_percentages(census, census.graph.branch_edge[branch])
    return [float(x) for x in pct]


def n1_report(network: Network, k: int = 10, n2: bool = False, *,
              records: Sequence[N1Record] | None = None,
              census: GraphletCensus | None = None,
              n2_result: N2Result | None = None,
              threads: int | None = None) -> CaseReport:
    """Top-k and bottom-k N-1 lines with their graphlet counts, plus the
    percentage profile of the most critical line (and of the N-2 second line
    when ``n2`` is set). Cached scan results may be passed in."""
    if records is None:
        records = n1_scan(network, sensitivities(network).lodf)
    if census is None:
        census = edge_census(build_graph(network))
    rep = CaseReport(network.name)
    numeric = [r for r in records if r.max_abs_lodf is not None]
    rep.top = [_row(network, census, r.outage, r.max_abs_lodf) for r in numeric[:k]]
    rep.bottom = [_row(network, census, r.outage, r.max_abs_lodf)
                  for r in least_critical(records, k, network)]
    if numeric:
        head = numeric[0]
        rep.n1_max = head.max_abs_lodf
        rep.n1_line = network.label(head.outage)
        rep.n1_percentages = _percentages(census, head.outage)
    if n2:
        res = n2_result if n2_result is not None else n2_scan(network, threads=threads)
        if res.best is not None:
            rep.n2_max = res.best.max_abs_lodf
            rep.n2_pair = (network.label(res.best.first), network.label(res.best.second))
            rep.n2_percentages = _percentages(census, res.best.second)
    return rep


def bubble_records(report: CaseReport, variant: str = "n1") -> list[BubbleRecord]:
    if variant == "n1":
        pct, lodf = report.n1_percentages, report.n1_max
    elif variant == "n2":
        pct, lodf = report.n2_percentages, report.n2_max
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if pct is None or lodf is None:
        return []
    return [BubbleRecord(report.name, variant, lab, p, lodf) for lab, p in zip(LABELS, pct)]


def multi_case_bubble_data(cases: Iterable, n2: bool = False, k: int = 10, threads: int | None = None):
    """Bubble-chart records for many cases.

    ``cases`` holds Networks or paths. Returns ``(records, reports, failures)``
    where ``failures`` lists ``(case, message)`` for cases that could not be
    processed; they are skipped.
    """
    from .caseio import load_case

    records: list[BubbleRecord] = []
    reports: list[CaseReport] = []
    failures: list[tuple[str, str]] = []
    for case in cases:
        try:
            net = case if isinstance(case, Network) else load_case(case)
            rep = n1_report(net, k, n2=n2, threads=threads)
        except (ValueError, OSError) as e:
            name = case.name if isinstance(case, Network) else str(case)
            log.info("skipping case %s: %s", name, e)
            failures.append((name, str(e)))
            continue
        reports.append(rep)
        records += bubble_records(rep, "n1")
        if n2:
            records += bubble_records(rep, "n2")
    return records, reports, failures


# -- rendering -------------------------------------------------------------------


def _fmt_lodf(v) -> str:
    return "" if v is None else f"{v:.6f}"


def _fmt_pct(v) -> str:
    return f"{v:.2f}"


def emit_table(rows: Sequence[LineRow]) -> str:
    """Rows in the From, To, M1..M6 layout."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_HEADER)
    for r in rows:
        w.writerow(r.table_cells())
    return buf.getvalue()


def emit_report(report: CaseReport | Sequence[CaseReport] | None, format: str = "csv",
                table: str | None = None) -> str:
    """Render one or more reports.

    CSV with ``table="top"`` or ``"bottom"`` gives that table alone in the
    From, To, M1..M6 layout; otherwise every table row of every report is
    listed with its case, table, rank and max |LODF|. JSON always carries the
    full reports.
    """
    if report is None:
        reports = []
    elif isinstance(report, CaseReport):
        reports = [report]
    else:
        reports = list(report)
    if format == "json":
        payload = [r.to_dict() for r in reports]
        for d in payload:
            for key in ("n1_percentages", "n2_percentages"):
                if d[key] is not None:
                    d[key] = [round(x, 2) for x in d[key]]
            for key in ("n1_max", "n2_max"):
                if d[key] is not None:
                    d[key] = round(d[key], 6)
            for t in ("top", "bottom"):
                for row in d[t]:
                    if row["max_abs_lodf"] is not None:
                        row["max_abs_lodf"] = round(row["max_abs_lodf"], 6)
        return json.dumps(payload if not isinstance(report, CaseReport) else payload[0], indent=1) + "\n"
    if format != "csv":
        raise ValueError(f"unknown format {format!r}")
    if table is not None:
        if table not in ("top", "bottom"):
            raise ValueError("table must be 'top' or 'bottom'")
        return emit_table([row for r in reports for row in getattr(r, table)])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case", "table", "rank", *TABLE_HEADER, "max_abs_lodf"])
    for r in reports:
        for t in ("top", "bottom"):
            for i, row in enumerate(getattr(r, t), start=1):
                w.writerow([r.name, t, i, *row.table_cells(), _fmt_lodf(row.max_abs_lodf)])
    return buf.getvalue()


def emit_bubbles(records: Sequence[BubbleRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case", "variant", "graphlet", "percentage", "max_abs_lodf"])
    for b in records:
        w.writerow([b.case, b.variant, b.graphlet, _fmt_pct(b.percentage), _fmt_lodf(b.max_abs_lodf)])
    return buf.getvalue()


def write_outputs(reports: Sequence[CaseReport], records: Sequence[BubbleRecord], out_dir) -> list[Path]:
    """Write ``tables.csv``, ``bubble_n1.csv``, ``bubble_n2.csv`` and ``report.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "tables.csv": emit_report(list(reports), "csv"),
        "bubble_n1.csv": emit_bubbles([b for b in records if b.variant == "n1"]),
        "bubble_n2.csv": emit_bubbles([b for b in records if b.variant == "n2"]),
        "report.json": emit_report(list(reports), "json"),
    }
    paths = []
    for name, text in files.items():
        p = out / name
        p.write_text(text)
        paths.append(p)
    return paths
