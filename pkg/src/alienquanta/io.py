"""Tabular output: CSV/JSON writers, readers and the bundled record schemas.

Every command emits a flat table (list of records with a fixed column order).
CSV is UTF-8 with ``,`` delimiters and floats at 17 significant digits, which
round-trips doubles exactly. JSON is an array of records; non-finite floats
are written as ``null``.
"""

from __future__ import annotations

import csv
import io
import json
import math

import jsonschema

_NUM = {"type": ["number", "null"]}
_INT = {"type": "integer"}
_STR = {"type": "string"}
_BOOL = {"type": "boolean"}

COLUMNS = {
    "validate": {"check": _STR, "residual": _NUM, "tol": _NUM, "passed": _BOOL},
    "quantize": {"row": _INT, "col": _INT, "J": _NUM, "mu": _NUM},
    "compare": {
        "mode": _INT,
        "omega1": _NUM,
        "omega2": _NUM,
        "mean": _NUM,
        "variance": _NUM,
        "total_mean": _NUM,
        "total_mean_reverse": _NUM,
        "trace_mu2": _NUM,
        "verdict": {"type": "string", "enum": ["identical", "equivalent_finite", "divergent_family"]},
    },
    "numdist": {"k": _INT, "probability": _NUM, "cumulative": _NUM, "tail_beyond": _NUM},
    "unruh": {
        "mode": _INT,
        "kappa": _NUM,
        "mean_occupation": _NUM,
        "bose_einstein": _NUM,
        "abs_rel_err": _NUM,
    },
}


def schema(command: str) -> dict:
    cols = COLUMNS[command]
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": f"{command} output",
        "type": "array",
        "items": {
            "type": "object",
            "properties": cols,
            "required": list(cols),
            "additionalProperties": False,
        },
    }


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def dumps(records, command: str, fmt: str) -> str:
    cols = list(COLUMNS[command])
    rows = [{c: r[c] for c in cols} for r in records]
    if fmt == "json":
        payload = [{c: _json_value(v) for c, v in r.items()} for r in rows]
        jsonschema.validate(payload, schema(command))
        return json.dumps(payload, indent=1) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for r in rows:
            writer.writerow([_fmt(r[c]) for c in cols])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def _parse_cell(text: str, spec: dict):
    kind = spec["type"]
    if kind == "integer":
        return int(text)
    if kind == "boolean":
        if text not in ("true", "false"):
            raise ValueError(f"bad boolean {text!r}")
        return text == "true"
    if kind == "string":
        return text
    return float(text)


def loads(text: str, command: str, fmt: str) -> list:
    """Parse and schema-check an output table; ``null`` numbers come back as ``inf``."""
    cols = COLUMNS[command]
    if fmt == "json":
        payload = json.loads(text)
        jsonschema.validate(payload, schema(command))
        return [
            {c: (math.inf if r[c] is None else r[c]) for c in cols}
            for r in payload
        ]
    if fmt == "csv":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if header != list(cols):
            raise ValueError(f"unexpected header {header}")
        out = [{c: _parse_cell(v, cols[c]) for c, v in zip(header, row)} for row in reader]
        jsonschema.validate([{c: _json_value(v) for c, v in r.items()} for r in out], schema(command))
        return out
    raise ValueError(f"unknown format {fmt!r}")
