"""Delay percentiles, threshold verdicts, and the summary CSV schema."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from .engine import EnsembleResult
from .errors import ConfigError, EmptyReportError
from .traffic import DL, UL

DL_P75_MAX_S = 5e-3
DL_P95_MAX_S = 10e-3
DL_P999_MAX_S = 50e-3
UL_P90_MAX_S = 2e-3
UL_P999_MAX_S = 10e-3
MAX_DROP_FRACTION = 1e-3

CSV_COLUMNS = (
    "scenario_id", "mode", "links", "bw_mhz", "mcs", "n_users", "direction",
    "kind", "n_samples", "drops", "p50", "p75", "p90", "p95", "p999", "mean",
    "pass_all",
)


def percentile(samples, p: float) -> float:
    """Nearest-rank percentile: the ceil(p/100 * n)-th smallest sample.

    The rank is computed with a small guard so exact products (e.g.
    99.9% of 1000 -> rank 999) do not round up through float error.
    """
    if not 0 < p <= 100:
        raise ConfigError(f"percentile must be in (0, 100], got {p}")
    data = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(data)
    if n == 0:
        raise EmptyReportError("cannot take a percentile of zero samples")
    rank = math.ceil(p * n / 100 - 1e-9)
    return float(data[min(max(rank, 1), n) - 1])


@dataclass(frozen=True, slots=True)
class DelayReport:
    """Summary statistics for one (direction, kind) sample set."""

    direction: str
    kind: str
    n_samples: int
    drop_count: int
    p50: float
    p75: float
    p90: float
    p95: float
    p999: float
    mean: float

    def __post_init__(self) -> None:
        if self.n_samples and not self.p50 <= self.p75 <= self.p90 <= self.p95 <= self.p999:
            raise EmptyReportError("percentiles must be non-decreasing")


def build_report(
    direction: str, kind: str, samples, drop_count: int = 0
) -> DelayReport:
    data = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(data)
    if n == 0:
        nan = float("nan")
        return DelayReport(direction, kind, 0, drop_count, nan, nan, nan, nan, nan, nan)

    def at(p: float) -> float:
        rank = math.ceil(p * n / 100 - 1e-9)
        return float(data[min(max(rank, 1), n) - 1])

    return DelayReport(
        direction, kind, n, drop_count,
        at(50), at(75), at(90), at(95), at(99.9), float(data.mean()),
    )


@dataclass(frozen=True, slots=True)
class WfaVerdict:
    """Pass/fail per recommended-delay row, plus the conjunction."""

    dl_p75_le_5ms: bool
    dl_p95_le_10ms: bool
    dl_p999_le_50ms: bool
    ul_p90_le_2ms: bool
    ul_p999_le_10ms: bool

    @property
    def pass_all(self) -> bool:
        return (
            self.dl_p75_le_5ms
            and self.dl_p95_le_10ms
            and self.dl_p999_le_50ms
            and self.ul_p90_le_2ms
            and self.ul_p999_le_10ms
        )


def wfa_verdict(
    dl_video_samples,
    ul_samples,
    dl_drop_fraction: float = 0.0,
    ul_drop_fraction: float = 0.0,
) -> WfaVerdict:
    """Evaluate the five recommended-delay rows on pooled samples.

    A direction that drops more than 0.1% of its packets fails all of its
    rows regardless of the delays of the packets that did arrive.
    """
    dl = np.sort(np.asarray(dl_video_samples, dtype=np.float64))
    ul = np.sort(np.asarray(ul_samples, dtype=np.float64))
    if len(dl) == 0 or len(ul) == 0:
        raise EmptyReportError("verdict needs non-empty DL and UL sample sets")

    def at(data: np.ndarray, p: float) -> float:
        rank = math.ceil(p * len(data) / 100 - 1e-9)
        return float(data[min(max(rank, 1), len(data)) - 1])

    dl_ok = dl_drop_fraction <= MAX_DROP_FRACTION
    ul_ok = ul_drop_fraction <= MAX_DROP_FRACTION
    return WfaVerdict(
        dl_p75_le_5ms=dl_ok and at(dl, 75) <= DL_P75_MAX_S,
        dl_p95_le_10ms=dl_ok and at(dl, 95) <= DL_P95_MAX_S,
        dl_p999_le_50ms=dl_ok and at(dl, 99.9) <= DL_P999_MAX_S,
        ul_p90_le_2ms=ul_ok and at(ul, 90) <= UL_P90_MAX_S,
        ul_p999_le_10ms=ul_ok and at(ul, 99.9) <= UL_P999_MAX_S,
    )


def drop_fraction(ensemble: EnsembleResult, direction: str) -> float:
    generated = ensemble.direction_count(ensemble.generated, direction)
    if generated == 0:
        return 0.0
    return ensemble.direction_count(ensemble.dropped, direction) / generated


def verdict_for(ensemble: EnsembleResult) -> WfaVerdict | None:
    """Scenario verdict from pooled samples; None if a direction is silent."""
    dl_video = ensemble.delays.get(f"{DL}:video", np.zeros(0))
    ul = ensemble.direction_samples(UL)
    if len(dl_video) == 0 or len(ul) == 0:
        return None
    return wfa_verdict(
        dl_video, ul, drop_fraction(ensemble, DL), drop_fraction(ensemble, UL)
    )


def ensemble_reports(ensemble: EnsembleResult) -> list[DelayReport]:
    """Per-kind reports plus a pooled `all` row per active direction."""
    reports: list[DelayReport] = []
    for direction in (DL, UL):
        any_kind = False
        for key in sorted(ensemble.delays):
            d, kind = key.split(":")
            if d != direction or ensemble.generated.get(key, 0) == 0:
                continue
            any_kind = True
            reports.append(
                build_report(direction, kind, ensemble.delays[key],
                             ensemble.dropped.get(key, 0))
            )
        if any_kind:
            reports.append(
                build_report(
                    direction, "all", ensemble.direction_samples(direction),
                    ensemble.direction_count(ensemble.dropped, direction),
                )
            )
    return reports


def links_label(config) -> str:
    return f"{len(config.links)}x{config.links[0].bandwidth_mhz}"


def _ms(value: float) -> str:
    if math.isnan(value):
        return "nan"
    return f"{value * 1e3:.3f}"


def summary_rows(scenario_id: str, ensemble: EnsembleResult) -> list[dict[str, str]]:
    """Flatten one scenario's ensemble into CSV schema rows."""
    config = ensemble.config
    verdict = verdict_for(ensemble)
    pass_all = "" if verdict is None else str(verdict.pass_all).lower()
    rows = []
    for rep in ensemble_reports(ensemble):
        rows.append(
            {
                "scenario_id": scenario_id,
                "mode": config.mode,
                "links": links_label(config),
                "bw_mhz": str(config.links[0].bandwidth_mhz),
                "mcs": str(config.links[0].mcs),
                "n_users": str(config.n_stations),
                "direction": rep.direction,
                "kind": rep.kind,
                "n_samples": str(rep.n_samples),
                "drops": str(rep.drop_count),
                "p50": _ms(rep.p50),
                "p75": _ms(rep.p75),
                "p90": _ms(rep.p90),
                "p95": _ms(rep.p95),
                "p999": _ms(rep.p999),
                "mean": _ms(rep.mean),
                "pass_all": pass_all,
            }
        )
    return rows


def write_summary_csv(path: str, rows: list[dict[str, str]]) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def read_summary_csv(path: str) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_COLUMNS:
            raise ConfigError(
                f"unexpected summary columns {reader.fieldnames} in {path}"
            )
        return list(reader)
