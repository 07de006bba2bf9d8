"""Serialisation of verification records: json, csv and a text table.

Field names and their order are fixed by :data:`oddindex.experiments.FIELDS`.
Real numbers are written with 17 significant digits, which round-trips any
double exactly.  Non-finite reals are written as the strings ``"nan"``,
``"inf"`` and ``"-inf"``.
"""

import csv
import io
import json
import math

from .experiments import FIELDS, as_plain


def _real(x):
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    # keep reals recognisable as reals after parsing
    if not any(c in s for c in ".eE"):
        s += ".0"
    return s


def _dump(value):
    if value is None or isinstance(value, (bool, int, str)):
        return json.dumps(value)
    if isinstance(value, float):
        return _real(value)
    if isinstance(value, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_dump(v)}" for k, v in value.items()) + "}"
    if isinstance(value, list):
        return "[" + ", ".join(_dump(v) for v in value) + "]"
    raise TypeError(f"cannot serialise {type(value).__name__}")


def record_dict(record):
    return {name: as_plain(getattr(record, name)) for name in FIELDS}


def _flatten(d, prefix):
    out = {}
    for k, v in d.items():
        key = f"{prefix}.{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key))
        else:
            out[key] = v
    return out


def _cell(v):
    if isinstance(v, float):
        return _real(v).strip('"')
    if isinstance(v, (list, dict)):
        return _dump(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return "" if v is None else str(v)


def emit_report(records, format="json"):
    """Serialise records to bytes in ``json``, ``csv`` or ``text`` format.

    json
        A top-level array, one object per record with keys in the order
        experiment, anchor, lhs, rhs, match, diagnostics, seed, version.
        An empty list gives ``[]``.
    csv
        One header row, then one row per record.  Diagnostics are flattened
        to ``diag.<key>`` columns (nested keys joined by dots), sorted by
        name after the fixed columns; lists are written as json.
    text
        An aligned table followed by a summary line.
    """
    rows = [record_dict(r) for r in records]
    if format == "json":
        if not rows:
            return b"[]"
        body = ",\n".join("  " + _dump(r) for r in rows)
        return ("[\n" + body + "\n]\n").encode()
    if format == "csv":
        flat = [{**{k: r[k] for k in FIELDS if k != "diagnostics"}, **_flatten(r["diagnostics"], "diag")}
                for r in rows]
        diag_cols = sorted({k for r in flat for k in r if k.startswith("diag.")})
        header = [k for k in FIELDS if k != "diagnostics"] + diag_cols
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in flat:
            w.writerow([_cell(r.get(k)) for k in header])
        return buf.getvalue().encode()
    if format == "text":
        cols = ("experiment", "anchor", "lhs", "rhs", "match")
        table = [list(cols)] + [[_cell(r[c]) for c in cols] for r in rows]
        widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in table]
        lines.insert(1, "  ".join("-" * w for w in widths))
        matched = sum(r["match"] for r in rows)
        lines.append(f"{matched}/{len(rows)} records match")
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown format {format!r}")


def load_json_report(data):
    """Parse a json report back into a list of dicts (inverse of ``emit_report``)."""
    return json.loads(data)
