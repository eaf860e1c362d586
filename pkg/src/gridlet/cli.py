"""``gridlet`` command line.

Exit status: 0 on success, 1 on bad input or usage, 2 when ``verify`` finds a
mismatch.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import caseio
from .contingency import least_critical, n1_scan, n2_scan
from .dcsens import dump_lodf_csv, sensitivities
from .graphlets import LABELS, edge_census
from .netmodel import NetworkError, build_graph
from .oracle import verify_case
from .report import multi_case_bubble_data, write_outputs


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _threads(value) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("--threads must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=caseio.FORMATS,
                        help="case file format (default: from the file extension)")
    common.add_argument("--threads", type=_threads, default=None,
                        help="worker cap (default: $GRIDLET_THREADS or all cores)")

    def out_flags(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--json", dest="out", action="store_const", const="json")
        g.add_argument("--csv", dest="out", action="store_const", const="csv")

    p = _Parser(prog="gridlet", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    s = sub.add_parser("n1", parents=[common], help="N-1 ranking by max |LODF|")
    s.add_argument("case")
    s.add_argument("--top", type=int, metavar="K")
    s.add_argument("--bottom", type=int, metavar="K")
    s.add_argument("--dump-lodf", metavar="PATH", help="also write the LODF matrix as CSV")
    out_flags(s)

    s = sub.add_parser("n2", parents=[common], help="N-2 pair search")
    s.add_argument("case")
    s.add_argument("--top", type=int, metavar="K")
    out_flags(s)

    s = sub.add_parser("graphlets", parents=[common], help="per-line 4-node graphlet counts")
    s.add_argument("case")
    s.add_argument("--edge", metavar="FROM-TO")
    out_flags(s)

    s = sub.add_parser("report", parents=[common], help="tables and bubble-chart data for cases")
    s.add_argument("cases", nargs="+")
    s.add_argument("--n2", action="store_true", help="include the N-2 search")
    s.add_argument("-k", type=int, default=10, help="rows per top/bottom table")
    s.add_argument("--out", metavar="DIR", default=".")

    s = sub.add_parser("verify", parents=[common], help="check fast paths against the oracles")
    s.add_argument("case")
    s.add_argument("--tolerance", type=float, default=1e-8)

    s = sub.add_parser("dump", parents=[common], help="canonical JSON of a case, or its LODF matrix")
    s.add_argument("case")
    s.add_argument("--lodf", metavar="PATH", help="write LODF CSV here ('-' for stdout)")
    return p


def _write_rows(header, rows, mode, stream, with_header=True):
    if mode == "json":
        json.dump([dict(zip(header, r)) for r in rows], stream, indent=1)
        stream.write("\n")
    elif mode == "csv":
        w = csv.writer(stream, lineterminator="\n")
        if with_header:
            w.writerow(header)
        w.writerows(rows)
    else:
        cells = [header] + [["" if c is None else str(c) for c in r] for r in rows]
        widths = [max(len(str(row[i])) for row in cells) for i in range(len(header))]
        for row in cells:
            stream.write("  ".join(str(c).rjust(w) for c, w in zip(row, widths)).rstrip() + "\n")


def _lodf_cell(v):
    return None if v is None else f"{v:.6f}"


def _cmd_n1(args, net, out):
    lodf = sensitivities(net).lodf
    if args.dump_lodf:
        with open(args.dump_lodf, "w") as fh:
            fh.write(dump_lodf_csv(lodf, net))
    recs = n1_scan(net, lodf)
    rank = {r.outage: i for i, r in enumerate(recs, start=1)}
    chosen = []
    if args.top is None and args.bottom is None:
        chosen = recs
    if args.top is not None:
        chosen += [r for r in recs if r.max_abs_lodf is not None][: max(args.top, 0)]
    if args.bottom is not None:
        chosen += least_critical(recs, args.bottom, net)
    rows = [[rank[r.outage], net.label(r.outage), _lodf_cell(r.max_abs_lodf),
             None if r.argmax is None else net.label(r.argmax), int(r.island_causing)]
            for r in chosen]
    if args.out == "json":
        rows = [[a, b, None if c is None else float(c), d, bool(e)] for a, b, c, d, e in rows]
    _write_rows(["rank", "outage", "max_abs_lodf", "argmax", "island"], rows, args.out, out)


def _cmd_n2(args, net, out):
    res = n2_scan(net, threads=args.threads)
    recs = res.records if args.top is None else res.records[: max(args.top, 0)]
    lab = lambda i: None if i is None else net.label(i)  # noqa: E731
    rows = [[i, net.label(r.first), lab(r.second), _lodf_cell(r.max_abs_lodf), lab(r.argmax), int(not r.feasible)]
            for i, r in enumerate(recs, start=1)]
    if args.out == "json":
        rows = [[a, b, c, None if d is None else float(d), e, bool(f)] for a, b, c, d, e, f in rows]
    _write_rows(["rank", "first", "second", "max_abs_lodf", "argmax", "island"], rows, args.out, out)


def _cmd_graphlets(args, net, out):
    graph = build_graph(net)
    census = edge_census(graph)
    if args.edge:
        branches = [net.find_branch(args.edge)]
    else:
        branches = [bs[0] for bs in graph.edge_branches]
    rows = []
    for b in branches:
        br = net.active[b]
        rows.append([br.from_bus, br.to_bus, *(int(c) for c in census.branch_counts(b))])
    header = ["From", "To", *LABELS]
    # plain mode: bare comma-separated rows, no header
    mode = args.out or "csv"
    _write_rows(header, rows, mode, out, with_header=args.out is not None)


def _cmd_report(args, out, err):
    records, reports, failures = multi_case_bubble_data(args.cases, n2=args.n2, k=args.k, threads=args.threads)
    for name, msg in failures:
        err.write(f"gridlet: skipped {name}: {msg}\n")
    paths = write_outputs(reports, records, args.out)
    for p in paths:
        err.write(f"wrote {p}\n")
    return 1 if failures and not reports else 0


def _cmd_verify(args, net, out):
    reports = verify_case(net, tolerance=args.tolerance)
    rows = [[r.quantity, f"{r.fast:.3e}", f"{r.oracle:.3e}", f"{r.difference:.3e}", f"{r.tolerance:g}",
             "PASS" if r.passed else "FAIL"] for r in reports]
    _write_rows(["quantity", "fast", "oracle", "difference", "tolerance", "status"], rows, None, out)
    return 0 if all(r.passed for r in reports) else 2


def _cmd_dump(args, net, out):
    if args.lodf:
        text = dump_lodf_csv(sensitivities(net).lodf, net)
        if args.lodf == "-":
            out.write(text)
        else:
            with open(args.lodf, "w") as fh:
                fh.write(text)
    else:
        out.write(caseio.emit_json(net) + "\n")


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        err.write(f"{e}\n")
        return 1
    except SystemExit as e:  # --help
        return int(e.code or 0)
    if args.threads is None:
        env = os.environ.get("GRIDLET_THREADS")
        args.threads = int(env) if env and env.isdigit() and int(env) > 0 else None
    try:
        if args.command == "report":
            return _cmd_report(args, out, err)
        net = caseio.load_case(args.case, args.format)
        if args.command == "n1":
            _cmd_n1(args, net, out)
        elif args.command == "n2":
            _cmd_n2(args, net, out)
        elif args.command == "graphlets":
            _cmd_graphlets(args, net, out)
        elif args.command == "verify":
            return _cmd_verify(args, net, out)
        elif args.command == "dump":
            _cmd_dump(args, net, out)
    except (NetworkError, OSError, ValueError) as e:
        err.write(f"gridlet: {e}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
