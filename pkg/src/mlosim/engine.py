"""Deterministic discrete-event core: clock, event queue, RNG streams, runs.

One simulation advances a single BSS (one AP, K stations) over one or more
independently contending links. Contention on each link is resolved on an
integer slot grid anchored at `epoch start + DIFS`, which keeps backoff
arithmetic exact and the whole run bitwise reproducible for a fixed
(config, seed) pair. The clock stops hard at the horizon: exchanges still in
the air count as residual, never as samples.

RNG streams are derived per consumer (per flow for phase offsets, per
device-link for backoff and per-subframe errors), so adding a flow, station,
or link never perturbs the draws of existing streams.
"""

from __future__ import annotations

import heapq
import json
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import mac, mld
from .errors import ConfigError, SimulationError
from .phy import (
    AMPDU_DELIMITER_BYTES,
    FCS_BYTES,
    MAC_HEADER_BYTES,
    PREAMBLE_S,
    SERVICE_BITS,
    SYMBOL_S,
    TAIL_BITS,
    LinkBudget,
    LinkConfig,
    bits_per_symbol_fraction,
    path_loss_db,
    senses_busy,
)
from .traffic import DL, UL, FlowSpec, default_vr_flows, flow_event_arrays

KIND_CODES = {"video": 0, "audio": 1, "tracking": 2, "stats": 3}
KIND_NAMES = {v: k for k, v in KIND_CODES.items()}
AP_DEVICE = 0

_PRIO_EXCHANGE = 1  # arrivals are conceptually priority 0 and bypass the heap
_PRIO_ACCESS = 2

_DOMAIN_OFFSET = 1
_DOMAIN_BACKOFF = 2
_DOMAIN_ERROR = 3

_PHASE_DORMANT = 0
_PHASE_CONTEND = 1
_PHASE_BUSY = 2


@dataclass(frozen=True, slots=True)
class ScenarioConfig:
    """Full description of one simulated BSS."""

    mode: str = mld.MODE_SLO
    links: tuple[LinkConfig, ...] = (LinkConfig(0, 80, 11),)
    n_stations: int = 1
    duration_s: float = 10.0
    seeds: int = 100
    distance_m: float | tuple[float, ...] = 3.0
    video_bitrate_bps: float = 100e6
    frame_rate_fps: float = 90.0
    video_packet_bytes: int = 1448
    flows: tuple[FlowSpec, ...] | None = None
    queue_limit_pkts: int = 5000
    per: float = 0.10
    max_ampdu_mpdus: int = 1024
    max_ppdu_s: float = 5.484e-3
    retry_limit: int = 7
    tx_power_dbm: float = 23.0
    cca_threshold_dbm: float = -82.0

    def __post_init__(self) -> None:
        mld.MldConfig(tuple(self.links), self.mode)  # validates mode/link set
        if self.n_stations < 1:
            raise ConfigError("n_stations must be >= 1")
        if self.duration_s <= 0:
            raise ConfigError("duration_s must be positive")
        if self.seeds < 1:
            raise ConfigError("seeds must be >= 1")
        if not 0.0 <= self.per < 1.0:
            raise ConfigError("per must be in [0, 1)")
        if self.queue_limit_pkts < 1:
            raise ConfigError("queue_limit_pkts must be >= 1")
        if self.max_ampdu_mpdus < 1:
            raise ConfigError("max_ampdu_mpdus must be >= 1")
        if self.max_ppdu_s <= PREAMBLE_S + SYMBOL_S:
            raise ConfigError("max_ppdu_s leaves no room for data symbols")
        if self.retry_limit < 1:
            raise ConfigError("retry_limit must be >= 1")
        for d in self.station_distances():
            if d < 0.1:
                raise ConfigError("distance_m must be >= 0.1 m")
        budget = LinkBudget(self.tx_power_dbm, self.cca_threshold_dbm)
        for lk in self.links:
            for d in self.station_distances():
                if not senses_busy(budget, path_loss_db(d, lk.center_freq_ghz)):
                    raise ConfigError(
                        f"station at {d} m is outside carrier-sense range on "
                        f"link {lk.link_id}; hidden nodes are not modeled"
                    )

    def station_distances(self) -> tuple[float, ...]:
        if isinstance(self.distance_m, tuple):
            if len(self.distance_m) != self.n_stations:
                raise ConfigError("distance_m list length must equal n_stations")
            return self.distance_m
        return (float(self.distance_m),) * self.n_stations

    def station_flows(self) -> tuple[FlowSpec, ...]:
        if self.flows is not None:
            return self.flows
        return tuple(
            default_vr_flows(
                self.video_bitrate_bps, self.frame_rate_fps, self.video_packet_bytes
            )
        )


_LINK_KEYS = {"link_id", "bandwidth_mhz", "mcs", "n_ss", "center_freq_ghz"}
_FLOW_KEYS = {
    "direction", "kind", "packet_bytes", "frame_rate_fps",
    "bitrate_bps", "period_s", "packets_per_event",
}
_SCENARIO_KEYS = {
    "mode", "links", "n_stations", "duration_s", "seeds", "distance_m",
    "video_bitrate_bps", "frame_rate_fps", "video_packet_bytes", "flows",
    "queue_limit_pkts", "per", "max_ampdu_mpdus", "max_ppdu_s", "retry_limit",
    "tx_power_dbm", "cca_threshold_dbm",
}


def scenario_from_dict(data: dict[str, Any]) -> ScenarioConfig:
    """Build a config from a JSON-compatible mapping, rejecting unknown keys."""
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a JSON object")
    unknown = set(data) - _SCENARIO_KEYS
    if unknown:
        raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
    kwargs: dict[str, Any] = dict(data)
    if "links" in kwargs:
        links = []
        for i, entry in enumerate(kwargs["links"]):
            if not isinstance(entry, dict):
                raise ConfigError("each link must be a JSON object")
            bad = set(entry) - _LINK_KEYS
            if bad:
                raise ConfigError(f"unknown link keys: {sorted(bad)}")
            entry = {"link_id": i, **entry}
            try:
                links.append(LinkConfig(**entry))
            except TypeError as exc:
                raise ConfigError(f"bad link entry: {exc}") from exc
        kwargs["links"] = tuple(links)
    if kwargs.get("flows") is not None:
        flows = []
        for entry in kwargs["flows"]:
            if not isinstance(entry, dict):
                raise ConfigError("each flow must be a JSON object")
            bad = set(entry) - _FLOW_KEYS
            if bad:
                raise ConfigError(f"unknown flow keys: {sorted(bad)}")
            try:
                flows.append(FlowSpec(**entry))
            except TypeError as exc:
                raise ConfigError(f"bad flow entry: {exc}") from exc
        kwargs["flows"] = tuple(flows)
    if isinstance(kwargs.get("distance_m"), list):
        kwargs["distance_m"] = tuple(float(d) for d in kwargs["distance_m"])
    try:
        return ScenarioConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad scenario: {exc}") from exc


def scenario_to_dict(config: ScenarioConfig) -> dict[str, Any]:
    """JSON-compatible mirror of the config, suitable for manifests."""
    out: dict[str, Any] = {
        "mode": config.mode,
        "links": [
            {
                "link_id": lk.link_id,
                "bandwidth_mhz": lk.bandwidth_mhz,
                "mcs": lk.mcs,
                "n_ss": lk.n_ss,
                "center_freq_ghz": lk.center_freq_ghz,
            }
            for lk in config.links
        ],
        "n_stations": config.n_stations,
        "duration_s": config.duration_s,
        "seeds": config.seeds,
        "distance_m": list(config.distance_m)
        if isinstance(config.distance_m, tuple)
        else config.distance_m,
        "video_bitrate_bps": config.video_bitrate_bps,
        "frame_rate_fps": config.frame_rate_fps,
        "video_packet_bytes": config.video_packet_bytes,
        "queue_limit_pkts": config.queue_limit_pkts,
        "per": config.per,
        "max_ampdu_mpdus": config.max_ampdu_mpdus,
        "max_ppdu_s": config.max_ppdu_s,
        "retry_limit": config.retry_limit,
        "tx_power_dbm": config.tx_power_dbm,
        "cca_threshold_dbm": config.cca_threshold_dbm,
    }
    if config.flows is not None:
        out["flows"] = [
            {
                "direction": f.direction,
                "kind": f.kind,
                "packet_bytes": f.packet_bytes,
                "frame_rate_fps": f.frame_rate_fps,
                "bitrate_bps": f.bitrate_bps,
                "period_s": f.period_s,
                "packets_per_event": f.packets_per_event,
            }
            for f in config.flows
        ]
    return out


def load_scenario(path: str) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario file is not valid JSON: {exc}") from exc
    return scenario_from_dict(data)


def stream_rng(root_seed: int, domain: int, a: int, b: int) -> random.Random:
    """Independent child stream; identity is (domain, a, b), never ordering."""
    seq = np.random.SeedSequence([root_seed, domain, a, b])
    return random.Random(int.from_bytes(seq.generate_state(4).tobytes(), "little"))


@dataclass(slots=True)
class PacketTable:
    """Column-oriented packet population for one (config, seed) run."""

    gen_t: np.ndarray  # float64 arrival instants, sorted ascending
    size: np.ndarray  # int32 payload bytes
    kind: np.ndarray  # int8 KIND_CODES
    sta: np.ndarray  # int32 station index
    is_dl: np.ndarray  # bool
    mpdu_bits: np.ndarray  # int64 padded subframe size on air
    group_start: np.ndarray  # int64, per distinct arrival instant
    group_t: np.ndarray  # float64 distinct arrival instants

    def __len__(self) -> int:
        return len(self.gen_t)


def build_packet_table(config: ScenarioConfig, seed: int) -> PacketTable:
    """Generate every packet of the run with per-flow randomized phases."""
    flows = config.station_flows()
    times_parts: list[np.ndarray] = []
    size_parts: list[np.ndarray] = []
    kind_parts: list[np.ndarray] = []
    sta_parts: list[np.ndarray] = []
    for sta in range(config.n_stations):
        for flow_idx, spec in enumerate(flows):
            rng = stream_rng(seed, _DOMAIN_OFFSET, sta, flow_idx)
            offset = rng.random() * spec.event_period_s
            times, counts = flow_event_arrays(spec, config.duration_s, offset)
            per_pkt = np.repeat(times, counts)
            n = len(per_pkt)
            if n == 0:
                continue
            times_parts.append(per_pkt)
            size_parts.append(np.full(n, spec.packet_bytes, dtype=np.int32))
            kind_parts.append(np.full(n, KIND_CODES[spec.kind], dtype=np.int8))
            sta_parts.append(np.full(n, sta, dtype=np.int32))
    if not times_parts:
        empty_f = np.zeros(0, dtype=np.float64)
        empty_i = np.zeros(0, dtype=np.int64)
        return PacketTable(empty_f, empty_i.astype(np.int32), empty_i.astype(np.int8),
                           empty_i.astype(np.int32), empty_i.astype(bool), empty_i,
                           np.zeros(1, dtype=np.int64), empty_f)
    gen_t = np.concatenate(times_parts)
    order = np.argsort(gen_t, kind="stable")
    gen_t = gen_t[order]
    size = np.concatenate(size_parts)[order]
    kind = np.concatenate(kind_parts)[order]
    sta = np.concatenate(sta_parts)[order]
    is_dl = kind <= KIND_CODES["audio"]
    overhead = MAC_HEADER_BYTES + FCS_BYTES + AMPDU_DELIMITER_BYTES
    padded = (size.astype(np.int64) + overhead + 3) // 4 * 4
    bits = padded * 8
    group_t, starts = np.unique(gen_t, return_index=True)
    group_start = np.append(starts.astype(np.int64), len(gen_t))
    return PacketTable(gen_t, size, kind, sta, is_dl, bits, group_start, group_t)


def arrival_histogram(table: PacketTable, bin_s: float) -> dict[str, np.ndarray]:
    """Offered bytes per time bin per kind (generation-side, before the MAC)."""
    if bin_s <= 0:
        raise ConfigError("histogram bin must be positive")
    if len(table) == 0:
        return {}
    bins = (table.gen_t / bin_s).astype(np.int64)
    n_bins = int(bins.max()) + 1
    out: dict[str, np.ndarray] = {}
    for code, name in KIND_NAMES.items():
        mask = table.kind == code
        if mask.any():
            out[name] = np.bincount(
                bins[mask], weights=table.size[mask], minlength=n_bins
            ).astype(np.int64)
    return out


@dataclass(slots=True)
class SimResult:
    """Per-run outcome: delay samples plus conservation counters."""

    seed: int
    delays: dict[str, np.ndarray]  # "DL:video" etc. -> seconds, arrival order
    generated: dict[str, int]
    delivered: dict[str, int]
    dropped: dict[str, int]
    residual: int
    counters: dict[str, int]

    def generated_total(self) -> int:
        return sum(self.generated.values())

    def delivered_total(self) -> int:
        return sum(self.delivered.values())

    def dropped_total(self) -> int:
        return sum(self.dropped.values())


def _sample_key(is_dl: bool, kind_code: int) -> str:
    return f"{DL if is_dl else UL}:{KIND_NAMES[kind_code]}"


class _LinkCtx:
    """Per-link medium state: slot grid, contenders, precomputed rate math."""

    __slots__ = (
        "index", "cfg", "phase", "grid_t", "contenders", "rev", "next_k",
        "bps_num", "bps_den", "bit_budget",
    )

    def __init__(self, index: int, cfg: LinkConfig, max_ppdu_s: float) -> None:
        self.index = index
        self.cfg = cfg
        self.phase = _PHASE_DORMANT
        self.grid_t = 0.0
        self.contenders: dict[int, tuple[int, int]] = {}  # dev -> (offset, expiry)
        self.rev = 0
        self.next_k = -1
        bps = bits_per_symbol_fraction(cfg.mcs, cfg.bandwidth_mhz, cfg.n_ss)
        self.bps_num = bps.numerator
        self.bps_den = bps.denominator
        symbols = mac.max_ppdu_symbols(max_ppdu_s)
        self.bit_budget = (symbols * self.bps_num) // self.bps_den - (
            SERVICE_BITS + TAIL_BITS
        )

    def airtime(self, total_mpdu_bits: int) -> float:
        coded = (SERVICE_BITS + TAIL_BITS + total_mpdu_bits) * self.bps_den
        symbols = -(-coded // self.bps_num)
        return PREAMBLE_S + symbols * SYMBOL_S


class _Sim:
    """One run's mutable state; `run()` drives it to the horizon."""

    def __init__(self, config: ScenarioConfig, seed: int) -> None:
        self.cfg = config
        self.seed = seed
        self.table = build_packet_table(config, seed)
        self.n_dev = config.n_stations + 1
        self.links = [
            _LinkCtx(i, lk, config.max_ppdu_s) for i, lk in enumerate(config.links)
        ]
        self.dl_q: dict[int, deque] = {i: deque() for i in range(config.n_stations)}
        self.ul_q = [deque() for _ in range(config.n_stations)]
        self.inflight = mld.InFlightSet()
        n = len(self.table)
        self.delivered_t = np.full(n, np.nan)
        self.dropped = np.zeros(n, dtype=bool)
        self.attempts = np.zeros(n, dtype=np.int32)
        self.stage = [[0] * len(self.links) for _ in range(self.n_dev)]
        self.slots = [[-1] * len(self.links) for _ in range(self.n_dev)]
        self.bo_rng = [
            [stream_rng(seed, _DOMAIN_BACKOFF, dev, li) for li in range(len(self.links))]
            for dev in range(self.n_dev)
        ]
        self.err_rng = [
            [stream_rng(seed, _DOMAIN_ERROR, dev, li) for li in range(len(self.links))]
            for dev in range(self.n_dev)
        ]
        self.heap: list[tuple] = []
        self.seq = 0
        self.exchanges: dict[int, list] = {}
        self.next_ex = 0
        self.counters = {
            "backoff_draws": 0,
            "backoff_slots_total": 0,
            "exchanges": 0,
            "collisions": 0,
            "mpdus_acknowledged": 0,
            "mpdu_failures": 0,
            "drops_queue_full": 0,
            "drops_retry_limit": 0,
            "idle_wins": 0,
        }

    # -- queue/eligibility helpers ------------------------------------------

    def _queue_for(self, pid: int) -> deque:
        if self.table.is_dl[pid]:
            return self.dl_q[int(self.table.sta[pid])]
        return self.ul_q[int(self.table.sta[pid])]

    def _eligible(self, dev: int) -> bool:
        if dev == AP_DEVICE:
            return any(self.dl_q[i] for i in range(self.cfg.n_stations))
        return bool(self.ul_q[dev - 1])

    # -- contention ---------------------------------------------------------

    def _draw(self, dev: int, li: int) -> int:
        value = mac.draw_backoff(self.bo_rng[dev][li], self.stage[dev][li])
        self.counters["backoff_draws"] += 1
        self.counters["backoff_slots_total"] += value
        return value

    def _push(self, time: float, prio: int, link: int, payload: int) -> None:
        self.seq += 1
        heapq.heappush(self.heap, (time, prio, self.seq, link, payload))

    def _join(self, dev: int, li: int, t: float) -> None:
        ctx = self.links[li]
        if dev in ctx.contenders:
            return
        if self.slots[dev][li] < 0:
            self.slots[dev][li] = self._draw(dev, li)
        offset = 0
        if t > ctx.grid_t:
            offset = math.ceil((t - ctx.grid_t) / mac.SLOT_S)
        ctx.contenders[dev] = (offset, offset + self.slots[dev][li])

    def _schedule_access(self, li: int) -> None:
        ctx = self.links[li]
        if not ctx.contenders:
            ctx.phase = _PHASE_DORMANT
            ctx.rev += 1
            return
        k = min(e for _, e in ctx.contenders.values())
        if ctx.phase == _PHASE_CONTEND and k == ctx.next_k:
            return
        ctx.next_k = k
        ctx.rev += 1
        self._push(ctx.grid_t + k * mac.SLOT_S, _PRIO_ACCESS, li, ctx.rev)

    def _start_epoch(self, li: int, t: float) -> None:
        ctx = self.links[li]
        ctx.phase = _PHASE_CONTEND
        ctx.grid_t = t + mac.DIFS_S
        ctx.contenders = {}
        ctx.next_k = -1
        for dev in range(self.n_dev):
            if self._eligible(dev):
                self._join(dev, li, t)
        self._schedule_access(li)

    def _ensure_contending(self, dev: int, t: float) -> None:
        if not self._eligible(dev):
            return
        for li, ctx in enumerate(self.links):
            if ctx.phase == _PHASE_BUSY or dev in ctx.contenders:
                continue
            if ctx.phase == _PHASE_DORMANT:
                self._start_epoch(li, t)
            else:
                self._join(dev, li, t)
                self._schedule_access(li)

    # -- event handlers -----------------------------------------------------

    def _handle_arrivals(self, gi: int) -> None:
        table = self.table
        start = int(table.group_start[gi])
        end = int(table.group_start[gi + 1])
        t = float(table.group_t[gi])
        limit = self.cfg.queue_limit_pkts
        touched: set[int] = set()
        for pid in range(start, end):
            q = self._queue_for(pid)
            if len(q) >= limit:
                self.dropped[pid] = True
                self.counters["drops_queue_full"] += 1
            else:
                q.append(pid)
                touched.add(AP_DEVICE if table.is_dl[pid] else int(table.sta[pid]) + 1)
        for dev in sorted(touched):
            self._ensure_contending(dev, t)

    def _allocate(self, dev: int, li: int) -> tuple[deque, list[int]] | None:
        ctx = self.links[li]
        if dev == AP_DEVICE:
            dest = mld.select_destination(self.dl_q, self.table.gen_t)
            if dest is None:
                return None
            queue = self.dl_q[dest]
        else:
            queue = self.ul_q[dev - 1]
            if not queue:
                return None
        pids = mld.allocate_txop(
            queue, self.table.mpdu_bits, ctx.bit_budget,
            self.cfg.max_ampdu_mpdus, self.inflight,
        )
        return queue, pids

    def _handle_access(self, li: int, rev: int, t: float) -> None:
        ctx = self.links[li]
        if rev != ctx.rev or ctx.phase != _PHASE_CONTEND:
            return
        k = ctx.next_k
        tied = sorted(d for d, (_, e) in ctx.contenders.items() if e == k)
        transmissions: list[tuple[int, deque, list[int], float]] = []
        for dev in tied:
            plan = self._allocate(dev, li)
            del ctx.contenders[dev]
            self.slots[dev][li] = -1
            if plan is None:
                self.counters["idle_wins"] += 1
                continue
            queue, pids = plan
            self.attempts[pids] += 1
            air = ctx.airtime(int(sum(self.table.mpdu_bits[pid] for pid in pids)))
            transmissions.append((dev, queue, pids, air))
        if not transmissions:
            ctx.next_k = -1
            self._schedule_access(li)
            return
        for dev, (offset, expiry) in ctx.contenders.items():
            self.slots[dev][li] = expiry - max(k, offset)
        ctx.contenders = {}
        ctx.phase = _PHASE_BUSY
        ctx.rev += 1
        self.counters["exchanges"] += 1
        if len(transmissions) > 1:
            self.counters["collisions"] += 1
        busy = max(air for *_, air in transmissions) + mac.SIFS_S + mac.BLOCK_ACK_S
        ex_id = self.next_ex
        self.next_ex += 1
        self.exchanges[ex_id] = [t, transmissions]
        self._push(t + busy, _PRIO_EXCHANGE, li, ex_id)

    def _handle_exchange_end(self, li: int, ex_id: int, t: float) -> None:
        t_start, transmissions = self.exchanges.pop(ex_id)
        collided = len(transmissions) > 1
        table = self.table
        for dev, queue, pids, air in transmissions:
            if collided:
                received = [False] * len(pids)
            else:
                rng = self.err_rng[dev][li]
                received = [rng.random() >= self.cfg.per for _ in pids]
                self.counters["mpdus_acknowledged"] += received.count(True)
                self.counters["mpdu_failures"] += received.count(False)
            # exhausted subframes leave the system here instead of requeueing
            keep_out = list(received)
            for i, pid in enumerate(pids):
                if received[i]:
                    self.delivered_t[pid] = t_start + air
                elif self.attempts[pid] >= self.cfg.retry_limit:
                    keep_out[i] = True
                    self.dropped[pid] = True
                    self.counters["drops_retry_limit"] += 1
            mld.release_inflight(queue, pids, keep_out, self.inflight)
            if collided:
                self.stage[dev][li] = min(self.stage[dev][li] + 1, mac.MAX_STAGE)
            else:
                self.stage[dev][li] = 0
            self.slots[dev][li] = self._draw(dev, li)
        self._start_epoch(li, t)
        # a failure requeued here may need service on the other links too
        for dev, _, _, _ in transmissions:
            self._ensure_contending(dev, t)

    # -- main loop ----------------------------------------------------------

    def run(self) -> SimResult:
        horizon = self.cfg.duration_s
        n_groups = len(self.table.group_t)
        gi = 0
        heap = self.heap
        while gi < n_groups or heap:
            t_arr = self.table.group_t[gi] if gi < n_groups else math.inf
            if heap and heap[0][0] < t_arr:
                t, prio, _, li, payload = heapq.heappop(heap)
                if t > horizon:
                    heap.clear()
                    gi = n_groups
                    break
                if prio == _PRIO_EXCHANGE:
                    self._handle_exchange_end(li, payload, t)
                else:
                    self._handle_access(li, payload, t)
            else:
                if gi >= n_groups or t_arr >= horizon:
                    if not heap:
                        break
                    gi = n_groups
                    continue
                self._handle_arrivals(gi)
                gi += 1
        return self._result()

    def _result(self) -> SimResult:
        table = self.table
        delays: dict[str, np.ndarray] = {}
        generated: dict[str, int] = {}
        delivered: dict[str, int] = {}
        dropped: dict[str, int] = {}
        done = ~np.isnan(self.delivered_t)
        for code, name in KIND_NAMES.items():
            for dl in (True, False):
                mask = (table.kind == code) & (table.is_dl == dl)
                n_gen = int(mask.sum())
                if n_gen == 0:
                    continue
                key = _sample_key(dl, code)
                sel = mask & done
                delays[key] = (self.delivered_t[sel] - table.gen_t[sel]).astype(np.float64)
                generated[key] = n_gen
                delivered[key] = int(sel.sum())
                dropped[key] = int((mask & self.dropped).sum())
        residual = len(table) - int(done.sum()) - int(self.dropped.sum())
        queued = sum(len(q) for q in self.dl_q.values()) + sum(len(q) for q in self.ul_q)
        if residual != queued + len(self.inflight):
            raise SimulationError(
                f"conservation violated: residual {residual} != "
                f"{queued} queued + {len(self.inflight)} in flight"
            )
        return SimResult(
            seed=self.seed,
            delays=delays,
            generated=generated,
            delivered=delivered,
            dropped=dropped,
            residual=residual,
            counters=dict(self.counters),
        )


def run_scenario(config: ScenarioConfig, seed: int) -> SimResult:
    """Simulate one seed; bitwise deterministic for a fixed (config, seed)."""
    if seed < 0:
        raise ConfigError("seed must be non-negative")
    return _Sim(config, seed).run()


@dataclass(slots=True)
class EnsembleResult:
    """Seed-pooled samples and counters; independent of execution order."""

    config: ScenarioConfig
    seed_list: tuple[int, ...]
    delays: dict[str, np.ndarray]
    generated: dict[str, int]
    delivered: dict[str, int]
    dropped: dict[str, int]
    residual: int
    counters: dict[str, int]

    def direction_samples(self, direction: str) -> np.ndarray:
        parts = [v for k, v in sorted(self.delays.items()) if k.startswith(direction)]
        if not parts:
            return np.zeros(0, dtype=np.float64)
        return np.concatenate(parts)

    def direction_count(self, table: dict[str, int], direction: str) -> int:
        return sum(v for k, v in table.items() if k.startswith(direction))


def merge_results(config: ScenarioConfig, results: list[SimResult]) -> EnsembleResult:
    """Pool per-seed outputs; results must be ordered by seed."""
    keys: list[str] = sorted({k for r in results for k in r.delays})
    delays = {
        k: np.concatenate([r.delays[k] for r in results if k in r.delays])
        if any(k in r.delays for r in results)
        else np.zeros(0)
        for k in keys
    }
    merged_counts: list[dict[str, int]] = []
    for attr in ("generated", "delivered", "dropped"):
        total: dict[str, int] = {}
        for r in results:
            for k, v in getattr(r, attr).items():
                total[k] = total.get(k, 0) + v
        merged_counts.append(total)
    counters: dict[str, int] = {}
    for r in results:
        for k, v in r.counters.items():
            counters[k] = counters.get(k, 0) + v
    return EnsembleResult(
        config=config,
        seed_list=tuple(r.seed for r in results),
        delays=delays,
        generated=merged_counts[0],
        delivered=merged_counts[1],
        dropped=merged_counts[2],
        residual=sum(r.residual for r in results),
        counters=counters,
    )


def _run_one(args: tuple[ScenarioConfig, int]) -> SimResult:
    return run_scenario(*args)


def run_ensemble(
    config: ScenarioConfig,
    seeds: int | None = None,
    max_workers: int | None = None,
) -> EnsembleResult:
    """Run seeds 0..n-1 and pool. Parallel execution merges in seed order."""
    n_seeds = config.seeds if seeds is None else seeds
    if n_seeds < 1:
        raise ConfigError("seeds must be >= 1")
    seed_list = list(range(n_seeds))
    if max_workers is not None and max_workers > 1 and n_seeds > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(_run_one, [(config, s) for s in seed_list]))
    else:
        results = [run_scenario(config, s) for s in seed_list]
    return merge_results(config, results)
