import math

import jsonschema
import pytest
from hypothesis import given, strategies as st

from alienquanta import io as tables

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(st.lists(st.tuples(st.integers(0, 10**6), finite, finite, finite, finite), max_size=8))
def test_unruh_round_trip_exact(rows):
    records = [
        {"mode": m, "kappa": k, "mean_occupation": n, "bose_einstein": b, "abs_rel_err": e}
        for m, k, n, b, e in rows
    ]
    for fmt in ("csv", "json"):
        assert tables.loads(tables.dumps(records, "unruh", fmt), "unruh", fmt) == records


def test_validate_round_trip_booleans():
    records = [{"check": "positivity", "residual": 1.5, "tol": 1e-10, "passed": False}]
    text = tables.dumps(records, "validate", "csv")
    assert text.splitlines()[1] == "positivity,1.5,1e-10,false"
    for fmt in ("csv", "json"):
        assert tables.loads(tables.dumps(records, "validate", fmt), "validate", fmt) == records


def test_infinity_written_as_null_in_json():
    records = [{"mode": 0, "kappa": 9.0, "mean_occupation": 0.0, "bose_einstein": 0.0, "abs_rel_err": math.inf}]
    text = tables.dumps(records, "unruh", "json")
    assert '"abs_rel_err": null' in text
    assert tables.loads(text, "unruh", "json")[0]["abs_rel_err"] == math.inf


def test_bad_header_rejected():
    with pytest.raises(ValueError):
        tables.loads("k,prob\n0,1\n", "numdist", "csv")


def test_schema_violation_rejected():
    with pytest.raises(jsonschema.ValidationError):
        tables.loads('[{"k": 0}]', "numdist", "json")
    with pytest.raises(jsonschema.ValidationError):
        tables.dumps([{"check": 1, "residual": 0.0, "tol": 0.0, "passed": True}], "validate", "json")


def test_unknown_format():
    with pytest.raises(ValueError):
        tables.dumps([], "unruh", "xml")


def test_schemas_cover_every_command():
    for cmd in ("validate", "quantize", "compare", "numdist", "unruh"):
        s = tables.schema(cmd)
        jsonschema.Draft202012Validator.check_schema(s)
        assert s["items"]["required"] == list(tables.COLUMNS[cmd])
