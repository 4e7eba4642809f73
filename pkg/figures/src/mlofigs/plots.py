"""Figure builders over validated CSV rows.

Rendering is a pure function of the input rows: inputs are globbed and
sorted, series are sorted by their axis value, and matplotlib runs on the
Agg backend, so identical CSVs yield identical plots.
"""

from __future__ import annotations

import math
import os
from collections import defaultdict
from glob import glob

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from mlofigs.schema import (
    CROSSOVER_COLUMNS,
    LINK_SPLIT_COLUMNS,
    METRICS_COLUMNS,
    MIN_MCS_COLUMNS,
    TRACE_COLUMNS,
    SchemaError,
    header_matches,
    read_rows,
)

# Delay bounds (ms) per direction, keyed by the percentile they constrain.
DL_THRESHOLDS_MS = {"p75": 5.0, "p95": 10.0, "p999": 50.0}
UL_THRESHOLDS_MS = {"p90": 2.0, "p999": 10.0}

_DPI = 150
_KIND_ORDER = ("video", "audio", "tracking", "stats")


def _save(fig, out_path: str) -> str:
    fig.savefig(out_path, dpi=_DPI)
    plt.close(fig)
    return out_path


def capacity_figure(rows: list[dict[str, str]], direction: str, out_path: str) -> str:
    """Delay percentiles vs. station count with their dashed bounds."""
    thresholds = DL_THRESHOLDS_MS if direction == "DL" else UL_THRESHOLDS_MS
    pooled = [r for r in rows if r["direction"] == direction and r["kind"] == "all"]
    if not pooled:
        raise SchemaError(f"no pooled {direction} rows to plot")
    pooled.sort(key=lambda r: int(r["n_users"]))
    users = [int(r["n_users"]) for r in pooled]

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for pct, bound in thresholds.items():
        values = [float(r[pct]) for r in pooled]
        points = [(u, v) for u, v in zip(users, values) if not math.isnan(v)]
        if points:
            ax.plot(*zip(*points), marker="o", label=pct)
        ax.axhline(bound, linestyle="--", linewidth=1.0, color="grey")
        ax.annotate(f"{pct} ≤ {bound:g} ms", (users[0], bound),
                    fontsize=7, va="bottom", color="grey")
    first = pooled[0]
    ax.set_title(f"{first['mode']} {first['links']} MCS {first['mcs']} — {direction}")
    ax.set_xlabel("stations")
    ax.set_ylabel("delay (ms)")
    ax.set_yscale("log")
    ax.set_xticks(users)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    return _save(fig, out_path)


def min_mcs_figure(rows: list[dict[str, str]], direction: str, out_path: str) -> str:
    """Bar map of the lowest passing MCS per bandwidth, grouped by mode.

    An unsatisfiable bandwidth ("none") is drawn as a hatched full-height
    bar so it cannot be mistaken for a real index.
    """
    sel = [r for r in rows if r["direction"] == direction]
    if not sel:
        raise SchemaError(f"no {direction} rows to plot")
    modes = sorted({r["mode"] for r in sel})
    bandwidths = sorted({int(r["bw_mhz"]) for r in sel})
    value = {(r["mode"], int(r["bw_mhz"])): r["min_mcs"] for r in sel}
    ceiling = 14  # one past the highest MCS index

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    width = 0.8 / len(modes)
    for i, mode in enumerate(modes):
        xs = [j + i * width for j in range(len(bandwidths))]
        for x, bw in zip(xs, bandwidths):
            raw = value.get((mode, bw))
            if raw is None:
                continue
            if raw == "none":
                ax.bar(x, ceiling, width=width, fill=False, hatch="//",
                       edgecolor=f"C{i}")
                ax.annotate("none", (x, ceiling), ha="center", va="bottom",
                            fontsize=7)
            else:
                ax.bar(x, int(raw) + 1, width=width, color=f"C{i}")
        ax.bar(0, 0, color=f"C{i}", label=mode)  # legend proxy
    ax.set_xticks([j + width * (len(modes) - 1) / 2 for j in range(len(bandwidths))])
    ax.set_xticklabels([f"{bw} MHz" for bw in bandwidths])
    ax.set_yticks(range(0, ceiling + 1, 2))
    ax.set_yticklabels([str(v - 1) if v else "" for v in range(0, ceiling + 1, 2)])
    ax.set_ylabel("minimum passing MCS")
    ax.set_title(f"Minimum MCS per bandwidth — {direction}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, out_path)


def link_split_figure(rows: list[dict[str, str]], out_path: str) -> str:
    """Station capacity for each partition of one total bandwidth."""
    splits = [r["split"] for r in rows]
    caps = [int(r["capacity_users"]) for r in rows]
    total = rows[0]["total_bw_mhz"]

    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.bar(splits, caps, color=[f"C{i}" for i in range(len(splits))])
    for x, cap in enumerate(caps):
        ax.annotate(str(cap), (x, cap), ha="center", va="bottom")
    ax.set_ylabel("station capacity")
    ax.set_title(f"Capacity per link split of {total} MHz")
    fig.tight_layout()
    return _save(fig, out_path)


def crossover_figure(rows: list[dict[str, str]], out_path: str) -> str:
    """Which split gives the lowest DL tail delay at each station count."""
    rows = sorted(rows, key=lambda r: int(r["n_users"]))
    users = [int(r["n_users"]) for r in rows]
    best = [r["best_split_by_dl_p999"] for r in rows]
    order = sorted(set(best), key=lambda s: best.index(s))
    level = {s: i for i, s in enumerate(order)}

    fig, ax = plt.subplots(figsize=(6.0, 2.8))
    ax.step(users, [level[b] for b in best], where="mid", marker="o")
    ax.set_yticks(range(len(order)))
    ax.set_yticklabels(order)
    ax.set_xticks(users)
    ax.set_xlabel("stations")
    ax.set_title("Best split by DL p99.9")
    ax.grid(True, axis="x", alpha=0.3)
    fig.tight_layout()
    return _save(fig, out_path)


def trace_figure(rows: list[dict[str, str]], out_path: str) -> str:
    """Stacked per-kind byte histogram of offered traffic."""
    bins = sorted({float(r["bin_start_s"]) for r in rows})
    kinds = sorted({r["kind"] for r in rows},
                   key=lambda k: (_KIND_ORDER.index(k) if k in _KIND_ORDER else 99, k))
    table: dict[str, dict[float, int]] = defaultdict(dict)
    for r in rows:
        table[r["kind"]][float(r["bin_start_s"])] = int(r["bytes"])
    width = min(b - a for a, b in zip(bins, bins[1:])) if len(bins) > 1 else 1.0

    fig, ax = plt.subplots(figsize=(7.0, 3.6))
    bottom = [0] * len(bins)
    for kind in kinds:
        heights = [table[kind].get(b, 0) for b in bins]
        ax.bar(bins, heights, width=width * 0.95, bottom=bottom,
               align="edge", label=kind)
        bottom = [b + h for b, h in zip(bottom, heights)]
    ax.set_xlabel("time (s)")
    ax.set_ylabel("bytes per bin")
    ax.set_title("Offered traffic by kind")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, out_path)


def _inputs(in_dir: str, pattern: str, exclude: tuple[str, ...] = ()) -> list[str]:
    paths = sorted(glob(os.path.join(in_dir, pattern)))
    return [
        p for p in paths
        if not any(token in os.path.basename(p) for token in exclude)
    ]


def render_dir(in_dir: str, kind: str, out_dir: str) -> list[str]:
    """Render every CSV of `kind` found in `in_dir`; returns written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []

    def out(name: str) -> str:
        return os.path.join(out_dir, name)

    if kind == "capacity":
        for path in _inputs(in_dir, "capacity-*.csv", ("summary", "manifest")):
            rows = read_rows(path, METRICS_COLUMNS)
            stem = os.path.splitext(os.path.basename(path))[0]
            for direction in ("DL", "UL"):
                if any(r["direction"] == direction for r in rows):
                    written.append(capacity_figure(
                        rows, direction, out(f"{stem}-{direction.lower()}.png")))
    elif kind == "min-mcs":
        pooled: list[dict[str, str]] = []
        for path in _inputs(in_dir, "min-mcs-*.csv", ("points", "manifest")):
            pooled.extend(read_rows(path, MIN_MCS_COLUMNS))
        for direction in ("DL", "UL"):
            if any(r["direction"] == direction for r in pooled):
                written.append(min_mcs_figure(
                    pooled, direction, out(f"min-mcs-{direction.lower()}.png")))
    elif kind == "link-split":
        for path in _inputs(in_dir, "link-split-*.csv", ("manifest",)):
            stem = os.path.splitext(os.path.basename(path))[0]
            if stem.endswith("-crossover"):
                rows = read_rows(path, CROSSOVER_COLUMNS)
                written.append(crossover_figure(rows, out(f"{stem}.png")))
            else:
                rows = read_rows(path, LINK_SPLIT_COLUMNS)
                written.append(link_split_figure(rows, out(f"{stem}.png")))
    elif kind == "trace":
        for path in _inputs(in_dir, "*.csv"):
            if not header_matches(path, TRACE_COLUMNS):
                continue
            rows = read_rows(path, TRACE_COLUMNS)
            stem = os.path.splitext(os.path.basename(path))[0]
            written.append(trace_figure(rows, out(f"{stem}.png")))
    else:
        raise SchemaError(f"unknown figure kind {kind!r}")
    return written
