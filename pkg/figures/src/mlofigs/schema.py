"""Column contracts for the simulator's CSV outputs.

Each reader validates the header before touching any data and fails with
the full column diagnostic, so a schema drift in the producing package is
caught at the first file rather than as a KeyError mid-plot.
"""

from __future__ import annotations

import csv


class SchemaError(Exception):
    """Input CSV does not match the expected column contract."""


METRICS_COLUMNS = (
    "scenario_id", "mode", "links", "bw_mhz", "mcs", "n_users", "direction",
    "kind", "n_samples", "drops", "p50", "p75", "p90", "p95", "p999", "mean",
    "pass_all",
)
MIN_MCS_COLUMNS = ("mode", "direction", "bw_mhz", "min_mcs")
LINK_SPLIT_COLUMNS = ("total_bw_mhz", "split", "capacity_users")
CROSSOVER_COLUMNS = ("n_users", "best_split_by_dl_p999")
TRACE_COLUMNS = ("bin_start_s", "kind", "bytes")


def read_rows(path: str, required: tuple[str, ...]) -> list[dict[str, str]]:
    """All data rows of `path`, after checking every required column exists.

    Raises SchemaError naming the missing columns (and the columns actually
    found) on any mismatch, and on a CSV with a header but no data rows.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        found = tuple(reader.fieldnames or ())
        missing = [c for c in required if c not in found]
        if missing:
            raise SchemaError(
                f"{path}: missing columns {missing}; found {list(found)}"
            )
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def header_matches(path: str, required: tuple[str, ...]) -> bool:
    """True when the file's header contains every required column."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            found = tuple(next(csv.reader(fh), []))
    except OSError:
        return False
    return all(c in found for c in required)
