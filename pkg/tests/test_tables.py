"""Round-trip and formatting tests for result tables."""

import math

import pytest

from fwmsim.tables import ResultTable, read_csv, read_json


def _sample():
    return ResultTable(
        columns=["T", "alpha_sq", "metric", "value"],
        rows=[
            [0.1, 0.5, "V", 1.0 / 3.0],
            [1.0, 100.0, "K", 1.2345678901234567e-10],
            [0.0, 0.0, "C", 7],
        ],
        metadata={"scenario": "demo", "seed": 3, "config": {"gamma": 0.48}},
    )


def test_csv_round_trip_lossless(tmp_path):
    t = _sample()
    path = tmp_path / "t.csv"
    t.write(path, "csv")
    back = read_csv(path)
    assert back.columns == t.columns
    assert back.metadata == t.metadata
    for a, b in zip(back.rows, t.rows):
        assert a == b  # exact: repr-formatted floats parse back bitwise


def test_json_round_trip_lossless(tmp_path):
    t = _sample()
    path = tmp_path / "t.json"
    t.write(path, "json")
    back = read_json(path)
    assert back.columns == t.columns
    assert back.metadata == t.metadata
    assert back.rows == t.rows


def test_float_cells_emit_full_precision():
    t = ResultTable(["x"], [[math.pi]], {})
    text = t.to_csv_text()
    assert repr(math.pi) in text  # shortest round-trip form, 17 significant digits


def test_serialization_deterministic():
    assert _sample().to_csv_text() == _sample().to_csv_text()
    assert _sample().to_json_text() == _sample().to_json_text()


def test_non_finite_cells_rejected():
    with pytest.raises(ValueError, match="non-finite"):
        ResultTable(["x"], [[float("nan")]], {})
    with pytest.raises(ValueError, match="non-finite"):
        ResultTable(["x"], [[float("inf")]], {})


def test_row_width_checked():
    with pytest.raises(ValueError, match="row length"):
        ResultTable(["a", "b"], [[1.0]], {})


def test_column_accessor():
    t = _sample()
    assert t.column("metric") == ["V", "K", "C"]
    with pytest.raises(ValueError):
        t.column("missing")
