"""Reading networks from MATPOWER case files, CSV edge lists and JSON.

JSON layout (what :func:`emit_json` writes and :func:`parse_simple` reads)::

    {"name": "tri", "slack": 1, "buses": [1, 2, 3],
     "branches": [{"from": 1, "to": 2, "x": 0.1, "status": 1}, ...]}

CSV layout: one branch per row, ``from,to,reactance[,status]``. Lines starting
with ``#`` are either comments or ``# key: value`` directives; ``slack`` and
``name`` are recognised. A header row whose first cell is not numeric is
skipped.
"""

from __future__ import annotations

import csv
import json
import re
from importlib import resources
from pathlib import Path

from .netmodel import Branch, Bus, Network, NetworkError, ValidationError

FORMATS = ("matpower", "csv", "json")
BUNDLED = ("case_ieee30", "case30", "case57", "case118")


class CaseFormatError(NetworkError):
    """Input text cannot be parsed in the declared format."""


# -- MATPOWER ----------------------------------------------------------------

_BLOCK = r"mpc\.{name}\s*=\s*\[(.*?)\]\s*;?"


def _strip_matlab(text: str) -> str:
    out = []
    for line in text.splitlines():
        line = line.split("%", 1)[0]
        if "..." in line:
            line = line.split("...", 1)[0] + " "
            out.append(line)
            continue
        out.append(line + "\n")
    return "".join(out)


def _matrix(text: str, name: str) -> list[list[float]]:
    m = re.search(_BLOCK.format(name=name), text, re.S)
    if m is None:
        raise CaseFormatError(f"missing mpc.{name} matrix")
    rows = []
    for chunk in re.split(r"[;\n]", m.group(1)):
        chunk = chunk.replace(",", " ").strip()
        if not chunk:
            continue
        try:
            rows.append([float(v) for v in chunk.split()])
        except ValueError:
            raise CaseFormatError(f"mpc.{name}: non-numeric row {chunk!r}") from None
    return rows


def parse_matpower(text: str, name: str | None = None) -> Network:
    """Parse the bus and branch blocks of a MATPOWER ``.m`` case.

    Only bus id/type and branch from/to/x/status are read; every other column
    and block (gen, gencost, ...) is ignored. Transformer taps are ignored.
    """
    clean = _strip_matlab(text)
    if name is None:
        m = re.search(r"function\s+\w+\s*=\s*(\w+)", clean)
        name = m.group(1) if m else ""
    bus_rows = _matrix(clean, "bus")
    br_rows = _matrix(clean, "branch")

    slack = [int(r[0]) for r in bus_rows if len(r) > 1 and int(r[1]) == 3]
    if len(slack) != 1:
        raise ValidationError(f"expected exactly one type-3 (slack) bus, found {len(slack)}")
    buses = tuple(Bus(int(r[0]), int(r[0]) == slack[0]) for r in bus_rows)

    branches = []
    k = 0
    for i, r in enumerate(br_rows, start=1):
        if len(r) < 4:
            raise CaseFormatError(f"mpc.branch row {i}: expected at least 4 columns, got {len(r)}")
        on = len(r) < 11 or r[10] != 0
        f, t, x = int(r[0]), int(r[1]), r[3]
        if on and x == 0:
            raise ValidationError(f"branch {i} ({f}-{t}): zero reactance on an in-service branch")
        branches.append(Branch(k if on else None, f, t, x, on))
        k += on
    return Network(buses, tuple(branches), name).validate()


# -- CSV / JSON ----------------------------------------------------------------


def _network_from_rows(rows, slack, name, bus_ids=None) -> Network:
    if not rows:
        raise ValidationError("no branches")
    if slack is None:
        raise ValidationError("no slack bus declared")
    branches = []
    k = 0
    for lineno, f, t, x, on in rows:
        if f == t:
            raise ValidationError(f"line {lineno}: self-loop at bus {f}")
        if on and x == 0:
            raise ValidationError(f"line {lineno}: zero reactance on an in-service branch")
        branches.append(Branch(k if on else None, f, t, x, on))
        k += on
    if bus_ids is None:
        seen = {}
        for b in branches:
            seen.setdefault(b.from_bus)
            seen.setdefault(b.to_bus)
        bus_ids = sorted(seen)
    if slack not in bus_ids:
        raise ValidationError(f"slack bus {slack} does not appear in the network")
    buses = tuple(Bus(b, b == slack) for b in bus_ids)
    return Network(buses, tuple(branches), name).validate()


def _parse_csv(text: str, slack, name):
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            m = re.match(r"#\s*(\w+)\s*[:=]\s*(.+)$", s)
            if m and m.group(1).lower() == "slack" and slack is None:
                slack = int(m.group(2))
            elif m and m.group(1).lower() == "name":
                name = m.group(2).strip()
            continue
        cells = next(csv.reader([s]))
        cells = [c.strip() for c in cells]
        if not rows and cells and not re.match(r"^[+-]?\d", cells[0]):
            continue  # header
        if len(cells) not in (3, 4):
            raise CaseFormatError(f"line {lineno}: expected from,to,reactance[,status], got {s!r}")
        try:
            f, t, x = int(cells[0]), int(cells[1]), float(cells[2])
            on = int(cells[3]) != 0 if len(cells) == 4 else True
        except ValueError:
            raise CaseFormatError(f"line {lineno}: malformed row {s!r}") from None
        rows.append((lineno, f, t, x, on))
    return _network_from_rows(rows, slack, name or "")


def _parse_json(text: str, slack, name):
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as e:
        raise CaseFormatError(f"line {e.lineno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise CaseFormatError("JSON case must be an object")
    rows = []
    for i, b in enumerate(doc.get("branches", []), start=1):
        try:
            rows.append((i, int(b["from"]), int(b["to"]), float(b["x"]), int(b.get("status", 1)) != 0))
        except (KeyError, TypeError, ValueError):
            raise CaseFormatError(f"branch {i}: malformed entry {b!r}") from None
    bus_ids = [int(b) for b in doc["buses"]] if "buses" in doc else None
    slack = slack if slack is not None else doc.get("slack")
    return _network_from_rows(rows, None if slack is None else int(slack), doc.get("name") or name, bus_ids)


def parse_simple(text: str, format: str = "csv", slack: int | None = None, name: str = "") -> Network:
    """Parse a CSV edge list or JSON case.

    ``slack`` overrides a slack declared in the text; ``name`` is used only when
    the text declares none.
    """
    if format == "csv":
        return _parse_csv(text, slack, name)
    if format == "json":
        return _parse_json(text, slack, name)
    raise ValueError(f"unknown simple format {format!r}")


def emit_json(network: Network, indent: int | None = 1) -> str:
    doc = {
        "name": network.name,
        "slack": network.slack,
        "buses": [b.id for b in network.buses],
        "branches": [
            {"from": b.from_bus, "to": b.to_bus, "x": b.reactance, "status": int(b.in_service)}
            for b in network.branches
        ],
    }
    return json.dumps(doc, indent=indent)


# -- files ---------------------------------------------------------------------


def guess_format(path) -> str:
    ext = Path(path).suffix.lower()
    return {".m": "matpower", ".csv": "csv", ".json": "json"}.get(ext, "matpower")


def parse(text: str, format: str, name: str | None = None) -> Network:
    if format == "matpower":
        return parse_matpower(text, name)
    return parse_simple(text, format, name=name or "")


def bundled_case_text(name: str) -> str:
    stem = Path(name).stem
    if stem not in BUNDLED:
        raise FileNotFoundError(f"no bundled case {name!r}; available: {', '.join(BUNDLED)}")
    return resources.files("gridlet").joinpath("data").joinpath(f"{stem}.m").read_text()


def load_bundled(name: str) -> Network:
    """One of the MATPOWER cases shipped with the package, e.g. ``"case_ieee30"``."""
    return parse_matpower(bundled_case_text(name), Path(name).stem)


def load_case(path, format: str | None = None) -> Network:
    """Load a case from disk, falling back to a bundled case of the same name."""
    p = Path(path)
    fmt = format or guess_format(p)
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    if not p.exists():
        if Path(p.name).stem in BUNDLED and fmt == "matpower":
            return load_bundled(p.name)
        raise FileNotFoundError(f"case file not found: {path}")
    text = p.read_text()
    return parse(text, fmt, name=None if fmt == "matpower" else p.stem)
