"""Serialization tests: deterministic float/table/JSON rendering, period
detection from samples, and the potential-CSV loader."""

import numpy as np
import pytest

from darboux.errors import DomainError
from darboux.io import (
    detect_periods,
    dumps_json,
    format_float,
    format_table,
    read_potential_csv,
    read_table,
    write_json,
    write_table,
)


# ---------------------------------------------------------------------------
# Floats
# ---------------------------------------------------------------------------


def test_format_float_round_trips_doubles():
    rng = np.random.default_rng(7)
    for v in rng.standard_normal(200) * 10.0 ** rng.integers(-12, 12, 200):
        assert float(format_float(v)) == v


def test_format_float_normalizes_negative_zero():
    assert format_float(-0.0) == "0"
    assert format_float(0.0) == "0"


def test_format_float_rejects_non_finite():
    for bad in (np.inf, -np.inf, np.nan):
        with pytest.raises(DomainError):
            format_float(bad)


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


def test_table_round_trip(tmp_path):
    path = str(tmp_path / "t.csv")
    x = np.linspace(-1.0, 2.0, 57)
    y = np.sin(x) * 1e-7
    write_table(path, ["x", "y"], [x, y])
    header, cols = read_table(path)
    assert header == ["x", "y"]
    assert np.array_equal(cols[0], x)
    assert np.array_equal(cols[1], y)


def test_table_is_deterministic(tmp_path):
    x = np.linspace(0.0, 1.0, 11)
    a = format_table(["x", "v"], [x, x**2])
    b = format_table(["x", "v"], [x, x**2])
    assert a == b
    assert a.endswith("\n")
    assert "\r" not in a


def test_format_table_error_paths():
    with pytest.raises(DomainError):
        format_table(["a", "b"], [np.zeros(3)])  # header/column mismatch
    with pytest.raises(DomainError):
        format_table([], [])  # no columns at all
    with pytest.raises(DomainError):
        format_table(["a", "b"], [np.zeros(3), np.zeros(4)])  # ragged
    with pytest.raises(DomainError):
        format_table(["a"], [np.array([1.0, np.nan])])  # non-finite cell


def test_read_table_error_paths(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("\n\n")
    with pytest.raises(DomainError):
        read_table(str(empty))
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("x,y\n1,2\n3\n")
    with pytest.raises(DomainError):
        read_table(str(ragged))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def test_json_sorted_keys_and_values():
    out = dumps_json({"b": 1, "a": [True, None, 0.5], "c": "x\"y\n"})
    assert out.index('"a"') < out.index('"b"') < out.index('"c"')
    assert "true" in out and "null" in out and "0.5" in out
    assert '\\"y\\n' in out
    assert out.endswith("\n")


def test_json_parses_back():
    import json

    obj = {
        "edges": [{"energy": -0.25, "kind": "lower"}],
        "count": 3,
        "nested": {"empty_list": [], "empty_obj": {}},
    }
    assert json.loads(dumps_json(obj)) == obj


def test_json_rejects_bad_input():
    with pytest.raises(DomainError):
        dumps_json({1: "non-string key"})
    with pytest.raises(DomainError):
        dumps_json({"f": object()})
    with pytest.raises(DomainError):
        dumps_json({"v": np.inf})


def test_write_json(tmp_path):
    path = tmp_path / "out.json"
    write_json(str(path), {"k": 1.5})
    assert path.read_text() == '{\n  "k": 1.5\n}\n'


# ---------------------------------------------------------------------------
# Period detection
# ---------------------------------------------------------------------------


def test_detect_full_period():
    T = 2.0
    dx = T / 100
    x = np.arange(0, 801) * dx
    v = np.cos(2 * np.pi * x / T)
    per, bg = detect_periods(v, dx)
    assert per == pytest.approx(T, abs=1e-12)
    assert bg is None


def test_detect_defect_background():
    T = 2.0
    dx = T / 100
    # Wide domain: the deformation must decay below detection tolerance
    # within the inner edge of the leading/trailing quarters.
    x = np.arange(-2000, 2001) * dx
    v = np.cos(2 * np.pi * x / T) - 0.8 / np.cosh(x) ** 2
    per, bg = detect_periods(v, dx)
    assert per is None
    assert bg == pytest.approx(T, abs=1e-12)


def test_detect_constant_and_aperiodic():
    assert detect_periods(np.full(400, 0.7), 0.01) == (None, None)
    x = np.arange(400) * 0.01
    assert detect_periods(x**2, 0.01) == (None, None)


# ---------------------------------------------------------------------------
# Potential CSV loader
# ---------------------------------------------------------------------------


def _write_csv(tmp_path, name, header, cols):
    path = str(tmp_path / name)
    write_table(path, header, cols)
    return path


def test_read_potential_detects_period(tmp_path):
    T = 2.0
    x = np.arange(0, 801) * (T / 100)
    v = np.cos(2 * np.pi * x / T)
    path = _write_csv(tmp_path, "p.csv", ["x", "V"], [x, v])
    pot = read_potential_csv(path)
    assert pot.period == pytest.approx(T, abs=1e-12)
    assert pot.label == "V"
    assert pot.x0 == 0.0
    assert np.array_equal(pot.values, v)


def test_read_potential_explicit_period_wins(tmp_path):
    T = 2.0
    x = np.arange(0, 801) * (T / 100)
    v = np.cos(2 * np.pi * x / T)
    path = _write_csv(tmp_path, "p.csv", ["x", "V"], [x, v])
    pot = read_potential_csv(path, period=2 * T)
    assert pot.period == 2 * T
    pot2 = read_potential_csv(path, detect=False)
    assert pot2.period is None and pot2.background_period is None


def test_read_potential_column_selection(tmp_path):
    x = np.linspace(0.0, 1.0, 21)
    path = _write_csv(
        tmp_path, "m.csv", ["x", "V", "V_tilde"], [x, x * 0, x * 0 + 1]
    )
    assert read_potential_csv(path).label == "V_tilde"  # default: last column
    assert read_potential_csv(path, column="V").label == "V"
    with pytest.raises(DomainError):
        read_potential_csv(path, column="W")


def test_read_potential_error_paths(tmp_path):
    with pytest.raises(DomainError):
        read_potential_csv(str(tmp_path / "missing.csv"))
    x = np.linspace(0.0, 1.0, 21)
    no_x = _write_csv(tmp_path, "nox.csv", ["t", "V"], [x, x])
    with pytest.raises(DomainError):
        read_potential_csv(no_x)
    only_x = _write_csv(tmp_path, "onlyx.csv", ["x"], [x])
    with pytest.raises(DomainError):
        read_potential_csv(only_x)
    one_row = tmp_path / "one.csv"
    one_row.write_text("x,V\n0,1\n")
    with pytest.raises(DomainError):
        read_potential_csv(str(one_row))
    uneven = tmp_path / "uneven.csv"
    uneven.write_text("x,V\n0,1\n0.1,1\n0.3,1\n")
    with pytest.raises(DomainError):
        read_potential_csv(str(uneven))
