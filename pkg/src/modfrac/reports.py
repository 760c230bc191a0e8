"""Report and field serialization for the command line tools.

Reports are written as CSV (``#`` comment lines carrying the command,
parameters and summary, then a header and one record per row, floats with 17
significant digits) or as JSON with the same rows under ``"rows"``.
Rationals travel as ``"a/b"`` strings in both.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
import io
import json
import math
import re

import numpy as np

from .grid import Field, GridSpec

VERSION = "0.1.0"


@dataclass
class Report:
    command: str
    params: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    version: str = VERSION

    @property
    def columns(self) -> list:
        cols: list = []
        for row in self.rows:
            cols += [c for c in row if c not in cols]
        return cols


def _plain(v):
    """JSON-ready value."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if v is None:
        return None
    return str(v)


def _cell(v) -> str:
    """CSV text of one value."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    if v is None:
        return ""
    return str(v)


def to_csv(rep: Report) -> str:
    buf = io.StringIO()
    buf.write(f"# command: {rep.command}\n# version: {rep.version}\n")
    for k, v in rep.params.items():
        buf.write(f"# param {k}: {_cell(v)}\n")
    for k, v in rep.summary.items():
        buf.write(f"# summary {k}: {_cell(v)}\n")
    cols = rep.columns
    w = csv.writer(buf, lineterminator="\n")
    if cols:
        w.writerow(cols)
        for row in rep.rows:
            w.writerow([_cell(row.get(c)) for c in cols])
    return buf.getvalue()


def to_json(rep: Report) -> str:
    doc = {
        "command": rep.command,
        "version": rep.version,
        "params": _plain(rep.params),
        "summary": _plain(rep.summary),
        "columns": rep.columns,
        "rows": [_plain(r) for r in rep.rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def render(rep: Report, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(rep)
    if fmt == "json":
        return to_json(rep)
    raise ValueError(f"unknown format {fmt!r}")


def read_csv_rows(text: str) -> list[dict]:
    """Rows of a CSV report as dicts of strings."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


# ----------------------------------------------------------------------------
# raw fields

_GRID_LINE = re.compile(
    r"#\s*grid:\s*n=(?P<n>\d+)\s+m=(?P<m>\d+)\s+l=(?P<l>\S+)\s+domain=(?P<domain>\w+)"
)


def field_to_csv(f: Field) -> str:
    s = f.spec
    buf = io.StringIO()
    buf.write(f"# grid: n={s.n} m={s.m} l={'%.17g' % s.l} domain={f.domain}\n")
    buf.write("index,re,im\n")
    for i, v in enumerate(f.values.reshape(-1)):
        buf.write(f"{i},{'%.17g' % v.real},{'%.17g' % v.imag}\n")
    return buf.getvalue()


def field_from_csv(text: str) -> Field:
    """Parse the ``index,re,im`` format written by :func:`field_to_csv`."""
    lines = text.splitlines()
    header = next((ln for ln in lines if ln.startswith("#")), None)
    if header is None:
        raise ValueError("field file lacks the '# grid:' header")
    m = _GRID_LINE.match(header.strip())
    if m is None:
        raise ValueError(f"cannot parse grid header {header!r}")
    spec = GridSpec(int(m["n"]), int(m["m"]), float(m["l"]))
    rows = list(csv.DictReader(ln for ln in lines if not ln.startswith("#")))
    if set(rows[0] if rows else ()) != {"index", "re", "im"}:
        raise ValueError("field file needs columns index, re, im")
    size = spec.m ** spec.n
    if len(rows) != size:
        raise ValueError(f"grid needs {size} samples, file has {len(rows)}")
    vals = np.empty(size, dtype=complex)
    seen = np.zeros(size, dtype=bool)
    for r in rows:
        i = int(r["index"])
        if not 0 <= i < size or seen[i]:
            raise ValueError(f"bad or repeated index {i}")
        seen[i] = True
        vals[i] = complex(float(r["re"]), float(r["im"]))
    return Field(spec, vals, m["domain"])


def field_to_json(f: Field) -> str:
    s = f.spec
    v = f.values.reshape(-1)
    doc = {"grid": {"n": s.n, "m": s.m, "l": s.l}, "domain": f.domain,
           "re": [float(x) for x in v.real], "im": [float(x) for x in v.imag]}
    return json.dumps(doc) + "\n"
