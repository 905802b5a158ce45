import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stepcarnot.io import emit, format_value, parse_value, read_rows, to_csv, to_json

ROWS = [
    {"N": 20, "s_ir": 0.1 + 0.2, "mode": "exact", "note": 'a, "b"'},
    {"N": 40, "s_ir": 1e-300, "mode": "dynamics", "note": ""},
]


def test_csv_shape():
    text = to_csv(ROWS)
    assert text.endswith("\n") and "\r" not in text
    assert len(text.splitlines()) == 3
    assert text.splitlines()[0] == "N,s_ir,mode,note"
    # RFC 4180 quoting of commas and quotes
    assert '"a, ""b"""' in text


def test_json_shape():
    data = json.loads(to_json(ROWS))
    assert isinstance(data, list) and len(data) == 2
    assert list(data[0]) == list(ROWS[0])


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_round_trip(tmp_path, fmt):
    path = tmp_path / f"rows.{fmt}"
    emit(ROWS, fmt, path)
    assert read_rows(path) == ROWS


@given(st.floats(allow_nan=False))
def test_float_round_trip_bit_exact(x):
    y = parse_value(format_value(x))
    assert isinstance(y, float)
    assert y == x and math.copysign(1, y) == math.copysign(1, x)


def test_nan_and_integral_floats():
    assert format_value(2.0) == "2.0"
    assert format_value(3) == "3"
    assert math.isnan(parse_value(format_value(math.nan)))
    assert format_value(0.1) == "0.10000000000000001"


def test_emit_stdout(capsys):
    emit(ROWS[:1], "csv", "-")
    assert capsys.readouterr().out.startswith("N,s_ir")


def test_emit_errors(tmp_path):
    with pytest.raises(ValueError):
        emit([], "csv", tmp_path / "x.csv")
    with pytest.raises(ValueError):
        emit([{"a": 1}, {"b": 2}], "csv", tmp_path / "x.csv")
    with pytest.raises(ValueError):
        emit(ROWS, "xml", tmp_path / "x.xml")
    bad = tmp_path / "missing" / "x.csv"
    with pytest.raises(OSError, match=str(bad)):
        emit(ROWS, "csv", bad)
