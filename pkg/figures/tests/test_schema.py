"""Column contract validation."""

from __future__ import annotations

import os

import pytest

from mlofigs.schema import (
    METRICS_COLUMNS,
    MIN_MCS_COLUMNS,
    TRACE_COLUMNS,
    SchemaError,
    header_matches,
    read_rows,
)

DATA = os.path.join(os.path.dirname(__file__), "data")


def test_read_rows_accepts_capacity_fixture() -> None:
    rows = read_rows(
        os.path.join(DATA, "capacity-mlo_str-2x80-mcs11.csv"), METRICS_COLUMNS
    )
    assert len(rows) > 10
    assert {r["direction"] for r in rows} == {"DL", "UL"}
    assert all(int(r["n_users"]) >= 1 for r in rows)


def test_read_rows_accepts_min_mcs_fixture() -> None:
    rows = read_rows(os.path.join(DATA, "min-mcs-slo-ul.csv"), MIN_MCS_COLUMNS)
    assert [r["min_mcs"] for r in rows] == ["none", "9"]


def test_missing_column_names_the_gap(tmp_path) -> None:
    path = tmp_path / "capacity-broken.csv"
    path.write_text("scenario_id,mode,links\na,b,c\n", encoding="utf-8")
    with pytest.raises(SchemaError) as err:
        read_rows(str(path), METRICS_COLUMNS)
    message = str(err.value)
    assert "n_users" in message and "p999" in message
    assert "capacity-broken.csv" in message
    assert "found" in message


def test_header_only_csv_is_an_error(tmp_path) -> None:
    path = tmp_path / "trace-empty.csv"
    path.write_text("bin_start_s,kind,bytes\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="no data rows"):
        read_rows(str(path), TRACE_COLUMNS)


def test_header_matches_distinguishes_kinds() -> None:
    trace = os.path.join(DATA, "trace-default.csv")
    capacity = os.path.join(DATA, "capacity-slo-1x80-mcs11.csv")
    assert header_matches(trace, TRACE_COLUMNS)
    assert not header_matches(capacity, TRACE_COLUMNS)
    assert not header_matches(os.path.join(DATA, "absent.csv"), TRACE_COLUMNS)
