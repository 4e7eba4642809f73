"""Sweep drivers: minimum-MCS maps, user-capacity curves, link-split compare."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from . import metrics
from .engine import EnsembleResult, ScenarioConfig, run_ensemble, scenario_to_dict
from .errors import ConfigError
from .phy import MCS_TABLE, LinkConfig
from .traffic import DL, UL

MODE_FLAGS = {"slo": "SLO", "mlo": "MLO_STR"}


def parse_links_spec(spec: str) -> tuple[int, int]:
    """'2x80' -> (2 links, 80 MHz each)."""
    parts = spec.lower().split("x")
    if len(parts) != 2:
        raise ConfigError(f"links spec must look like '2x80', got {spec!r}")
    try:
        n, bw = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ConfigError(f"links spec must be numeric: {spec!r}") from exc
    if n < 1:
        raise ConfigError("links spec needs at least one link")
    return n, bw


def make_links(n_links: int, bandwidth_mhz: int, mcs: int) -> tuple[LinkConfig, ...]:
    return tuple(LinkConfig(i, bandwidth_mhz, mcs) for i in range(n_links))


def make_scenario(
    mode: str,
    n_links: int,
    bandwidth_mhz: int,
    mcs: int,
    n_users: int,
    duration_s: float = 10.0,
    seeds: int = 100,
) -> ScenarioConfig:
    return ScenarioConfig(
        mode=mode,
        links=make_links(n_links, bandwidth_mhz, mcs),
        n_stations=n_users,
        duration_s=duration_s,
        seeds=seeds,
    )


def scenario_id(config: ScenarioConfig) -> str:
    return (
        f"{config.mode.lower()}-{metrics.links_label(config)}"
        f"-mcs{config.links[0].mcs}-k{config.n_stations}"
    )


@dataclass(slots=True)
class SweepPoint:
    """One evaluated scenario within a sweep."""

    config: ScenarioConfig
    ensemble: EnsembleResult
    verdict: metrics.WfaVerdict
    rows: list[dict[str, str]]

    def report(self, direction: str, kind: str) -> metrics.DelayReport | None:
        for rep in metrics.ensemble_reports(self.ensemble):
            if rep.direction == direction and rep.kind == kind:
                return rep
        return None


def evaluate_point(
    config: ScenarioConfig,
    seeds: int | None = None,
    max_workers: int | None = None,
) -> SweepPoint:
    ensemble = run_ensemble(config, seeds=seeds, max_workers=max_workers)
    verdict = metrics.verdict_for(ensemble)
    if verdict is None:
        raise ConfigError("sweeps need scenarios with both DL and UL traffic")
    return SweepPoint(config, ensemble, verdict, metrics.summary_rows(scenario_id(config), ensemble))


def direction_passes(point: SweepPoint, direction: str) -> bool:
    """Per-direction pass rule used by the minimum-MCS map.

    DL is judged on its 75th percentile (5 ms), UL on its 90th (2 ms) —
    the binding rows for each direction — plus the drop budget.
    """
    if direction == DL:
        return point.verdict.dl_p75_le_5ms
    if direction == UL:
        return point.verdict.ul_p90_le_2ms
    raise ConfigError(f"direction must be {DL} or {UL}, got {direction!r}")


def min_mcs_map(
    mode: str,
    bandwidths: list[int],
    direction: str,
    *,
    seeds: int = 100,
    duration_s: float = 10.0,
    out_dir: str | None = None,
    cache: dict | None = None,
    max_workers: int | None = None,
) -> dict[int, int | None]:
    """Lowest MCS index passing `direction` per bandwidth (None if none does).

    Single-station scenario; multi-link mode uses two equal-width links.
    MCS candidates are tried in ascending order, so the map is exact even
    if passing were non-monotonic in MCS.
    """
    n_links = 1 if mode == "SLO" else 2
    results: dict[int, int | None] = {}
    rows: list[dict[str, str]] = []
    if cache is None:
        cache = {}
    for bw in bandwidths:
        found: int | None = None
        for mcs in range(len(MCS_TABLE)):
            key = (mode, n_links, bw, mcs)
            point = cache.get(key)
            if point is None:
                config = make_scenario(mode, n_links, bw, mcs, 1, duration_s, seeds)
                point = evaluate_point(config, max_workers=max_workers)
                cache[key] = point
            rows.extend(point.rows)
            if direction_passes(point, direction):
                found = mcs
                break
        results[bw] = found
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        suffix = f"{mode.lower()}-{direction.lower()}"
        metrics.write_summary_csv(os.path.join(out_dir, f"min-mcs-points-{suffix}.csv"), rows)
        _write_csv(
            os.path.join(out_dir, f"min-mcs-{suffix}.csv"),
            ["mode", "direction", "bw_mhz", "min_mcs"],
            [
                [mode, direction, str(bw), "none" if m is None else str(m)]
                for bw, m in results.items()
            ],
        )
        write_manifest(
            os.path.join(out_dir, f"min-mcs-{suffix}.manifest.json"),
            {
                "sweep": "min-mcs",
                "mode": mode,
                "direction": direction,
                "bandwidths": list(bandwidths),
                "seeds": list(range(seeds)),
                "duration_s": duration_s,
            },
        )
    return results


@dataclass(slots=True)
class CapacityResult:
    """Capacity curve for one link layout at fixed MCS."""

    mode: str
    n_links: int
    bandwidth_mhz: int
    mcs: int
    points: dict[int, SweepPoint]
    capacity: int

    def dl_p999_ms(self, n_users: int) -> float:
        rep = self.points[n_users].report(DL, "video")
        return rep.p999 * 1e3 if rep else float("nan")


def capacity_sweep(
    mode: str,
    links_spec: str,
    mcs: int,
    max_users: int,
    *,
    seeds: int = 100,
    duration_s: float = 10.0,
    out_dir: str | None = None,
    max_workers: int | None = None,
    stop_margin: int | None = None,
) -> CapacityResult:
    """Grow the station count from 1; capacity is the last K before the
    first failure (every smaller K passes by construction of the scan).

    `stop_margin` ends the scan that many points after the first failure
    (None scans all the way to max_users, e.g. to plot full curves).
    """
    n_links, bw = parse_links_spec(links_spec)
    if mode == "SLO" and n_links != 1:
        raise ConfigError("single-link mode requires a 1xW links spec")
    if max_users < 1:
        raise ConfigError("max_users must be >= 1")
    points: dict[int, SweepPoint] = {}
    rows: list[dict[str, str]] = []
    capacity = 0
    first_fail: int | None = None
    for k in range(1, max_users + 1):
        config = make_scenario(mode, n_links, bw, mcs, k, duration_s, seeds)
        point = evaluate_point(config, max_workers=max_workers)
        points[k] = point
        rows.extend(point.rows)
        if point.verdict.pass_all and first_fail is None:
            capacity = k
        elif first_fail is None:
            first_fail = k
        if (
            stop_margin is not None
            and first_fail is not None
            and k >= first_fail + stop_margin
        ):
            break
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        tag = f"{mode.lower()}-{n_links}x{bw}-mcs{mcs}"
        metrics.write_summary_csv(os.path.join(out_dir, f"capacity-{tag}.csv"), rows)
        _write_csv(
            os.path.join(out_dir, f"capacity-summary-{tag}.csv"),
            ["mode", "links", "mcs", "capacity_users"],
            [[mode, f"{n_links}x{bw}", str(mcs), str(capacity)]],
        )
        write_manifest(
            os.path.join(out_dir, f"capacity-{tag}.manifest.json"),
            {
                "sweep": "capacity",
                "mode": mode,
                "links": f"{n_links}x{bw}",
                "mcs": mcs,
                "max_users": max_users,
                "seeds": list(range(seeds)),
                "duration_s": duration_s,
            },
        )
    return CapacityResult(mode, n_links, bw, mcs, points, capacity)


@dataclass(slots=True)
class LinkSplitResult:
    """Same total bandwidth, different link counts, compared head-to-head."""

    total_bw_mhz: int
    capacities: dict[str, int]
    best_split_by_users: dict[int, str]
    sweeps: dict[str, CapacityResult]


def link_split_compare(
    total_bw_mhz: int,
    splits: list[str],
    mcs: int,
    max_users: int,
    *,
    seeds: int = 100,
    duration_s: float = 10.0,
    out_dir: str | None = None,
    max_workers: int | None = None,
    stop_margin: int | None = None,
) -> LinkSplitResult:
    """Capacity and best-latency split for several partitions of one band."""
    sweeps: dict[str, CapacityResult] = {}
    for spec in splits:
        n, bw = parse_links_spec(spec)
        if n * bw != total_bw_mhz:
            raise ConfigError(
                f"split {spec!r} totals {n * bw} MHz, expected {total_bw_mhz}"
            )
        sweeps[spec] = capacity_sweep(
            "MLO_STR" if n > 1 else "SLO", spec, mcs, max_users,
            seeds=seeds, duration_s=duration_s, out_dir=out_dir,
            max_workers=max_workers, stop_margin=stop_margin,
        )
    best: dict[int, str] = {}
    for k in range(1, max_users + 1):
        candidates = {
            spec: sweep.dl_p999_ms(k)
            for spec, sweep in sweeps.items()
            if k in sweep.points
        }
        candidates = {s: v for s, v in candidates.items() if v == v}  # drop NaN
        if candidates:
            best[k] = min(sorted(candidates), key=lambda s: candidates[s])
    result = LinkSplitResult(
        total_bw_mhz,
        {spec: sweeps[spec].capacity for spec in splits},
        best,
        sweeps,
    )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        _write_csv(
            os.path.join(out_dir, f"link-split-{total_bw_mhz}.csv"),
            ["total_bw_mhz", "split", "capacity_users"],
            [[str(total_bw_mhz), spec, str(result.capacities[spec])] for spec in splits],
        )
        _write_csv(
            os.path.join(out_dir, f"link-split-{total_bw_mhz}-crossover.csv"),
            ["n_users", "best_split_by_dl_p999"],
            [[str(k), best[k]] for k in sorted(best)],
        )
        write_manifest(
            os.path.join(out_dir, f"link-split-{total_bw_mhz}.manifest.json"),
            {
                "sweep": "link-split",
                "total_bw_mhz": total_bw_mhz,
                "splits": list(splits),
                "mcs": mcs,
                "max_users": max_users,
                "seeds": list(range(seeds)),
                "duration_s": duration_s,
            },
        )
    return result


def two_slo_pair_capacity(slo_sweep: CapacityResult) -> int:
    """Total users two mirrored single-link BSSs on orthogonal channels carry.

    The BSSs cannot interact, so a pair with users split evenly passes
    exactly when one BSS with half the users passes: total = 2x capacity.
    """
    return 2 * slo_sweep.capacity


def write_manifest(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_manifest(config: ScenarioConfig, seeds: int, outputs: list[str]) -> dict:
    return {
        "config": scenario_to_dict(config),
        "seeds": list(range(seeds)),
        "outputs": outputs,
    }


def _write_csv(path: str, header: list[str], rows: list[list[str]]) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
