"""Rendering behavior: outputs, determinism, and loud failures."""

from __future__ import annotations

import os

import matplotlib.image as mpimg
import numpy as np
import pytest

from mlofigs.plots import render_dir
from mlofigs.schema import SchemaError

DATA = os.path.join(os.path.dirname(__file__), "data")
PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _assert_png(path: str) -> None:
    with open(path, "rb") as fh:
        assert fh.read(8) == PNG_MAGIC
    assert os.path.getsize(path) > 1_000


def test_capacity_renders_both_directions(tmp_path) -> None:
    """Station sweeps produce one DL and one UL plot per input CSV."""
    written = render_dir(DATA, "capacity", str(tmp_path))
    names = sorted(os.path.basename(p) for p in written)
    assert names == [
        "capacity-mlo_str-2x80-mcs11-dl.png",
        "capacity-mlo_str-2x80-mcs11-ul.png",
        "capacity-slo-1x80-mcs11-dl.png",
        "capacity-slo-1x80-mcs11-ul.png",
    ]
    for path in written:
        _assert_png(path)


def test_capacity_render_is_deterministic(tmp_path) -> None:
    a = render_dir(DATA, "capacity", str(tmp_path / "a"))
    b = render_dir(DATA, "capacity", str(tmp_path / "b"))
    first = np.asarray(mpimg.imread(sorted(a)[0]))
    second = np.asarray(mpimg.imread(sorted(b)[0]))
    assert first.shape == second.shape
    assert np.array_equal(first, second)


def test_min_mcs_renders_per_direction(tmp_path) -> None:
    written = render_dir(DATA, "min-mcs", str(tmp_path))
    names = sorted(os.path.basename(p) for p in written)
    assert names == ["min-mcs-dl.png", "min-mcs-ul.png"]
    for path in written:
        _assert_png(path)


def test_link_split_renders_capacity_and_crossover(tmp_path) -> None:
    written = render_dir(DATA, "link-split", str(tmp_path))
    names = sorted(os.path.basename(p) for p in written)
    assert names == ["link-split-160-crossover.png", "link-split-160.png"]
    for path in written:
        _assert_png(path)


def test_trace_renders_only_trace_shaped_csvs(tmp_path) -> None:
    """The trace glob sniffs headers, skipping the other CSVs in the dir."""
    written = render_dir(DATA, "trace", str(tmp_path))
    assert [os.path.basename(p) for p in written] == ["trace-default.png"]
    _assert_png(written[0])


def test_empty_directory_yields_nothing(tmp_path) -> None:
    empty = tmp_path / "empty"
    empty.mkdir()
    assert render_dir(str(empty), "capacity", str(tmp_path / "out")) == []


def test_capacity_without_pooled_rows_fails_loudly(tmp_path) -> None:
    src = tmp_path / "in"
    src.mkdir()
    header = (
        "scenario_id,mode,links,bw_mhz,mcs,n_users,direction,kind,n_samples,"
        "drops,p50,p75,p90,p95,p999,mean,pass_all"
    )
    row = "x,SLO,1x80,80,11,1,DL,video,10,0,1,1,1,1,1,1,true"
    (src / "capacity-x.csv").write_text(f"{header}\n{row}\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="no pooled DL rows"):
        render_dir(str(src), "capacity", str(tmp_path / "out"))
