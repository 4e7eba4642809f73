"""VR traffic generation: periodic video batches, audio, tracking and stats.

Video batches carry a whole rendered frame split into fixed-size packets; the
per-frame packet count comes from a fractional accumulator so the long-run
rate matches the configured bitrate exactly. Uplink flows follow the frame
clock with small fixed packets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

DL = "DL"
UL = "UL"
KINDS = ("video", "audio", "tracking", "stats")

AUDIO_PERIOD_S = 0.025
AUDIO_PACKET_BYTES = 1200  # 16-bit stereo PCM at 48 kHz, 4 packets per 25 ms
TRACKING_PACKET_BYTES = 106
STATS_PACKET_BYTES = 212


@dataclass(frozen=True, slots=True)
class FlowSpec:
    """Generation law for one traffic stream of a station."""

    direction: str
    kind: str
    packet_bytes: int
    frame_rate_fps: float | None = None
    bitrate_bps: float | None = None
    period_s: float | None = None
    packets_per_event: int = 1

    def __post_init__(self) -> None:
        if self.direction not in (DL, UL):
            raise ConfigError(f"flow direction must be DL or UL, got {self.direction!r}")
        if self.kind not in KINDS:
            raise ConfigError(f"unknown flow kind {self.kind!r}")
        if self.packet_bytes <= 0:
            raise ConfigError("packet_bytes must be positive")
        if self.kind == "video":
            if not self.frame_rate_fps or self.frame_rate_fps <= 0:
                raise ConfigError("video flows need a positive frame rate")
            if self.bitrate_bps is None or self.bitrate_bps < 0:
                raise ConfigError("video flows need a non-negative bitrate")
        elif self.period_s is None and (not self.frame_rate_fps or self.frame_rate_fps <= 0):
            raise ConfigError(f"{self.kind} flows need a period or frame rate")
        if self.packets_per_event < 1:
            raise ConfigError("packets_per_event must be >= 1")

    @property
    def event_period_s(self) -> float:
        """Interval between consecutive emission instants."""
        if self.period_s is not None:
            return self.period_s
        return 1.0 / self.frame_rate_fps


def default_vr_flows(
    video_bitrate_bps: float = 100e6,
    frame_rate_fps: float = 90.0,
    video_packet_bytes: int = 1448,
) -> list[FlowSpec]:
    """The standard split-rendering stream set for one station."""
    return [
        FlowSpec(DL, "video", video_packet_bytes,
                 frame_rate_fps=frame_rate_fps, bitrate_bps=video_bitrate_bps),
        FlowSpec(DL, "audio", AUDIO_PACKET_BYTES,
                 period_s=AUDIO_PERIOD_S, packets_per_event=4),
        FlowSpec(UL, "tracking", TRACKING_PACKET_BYTES,
                 frame_rate_fps=frame_rate_fps, packets_per_event=3),
        FlowSpec(UL, "stats", STATS_PACKET_BYTES,
                 frame_rate_fps=frame_rate_fps, packets_per_event=1),
    ]


@dataclass(slots=True)
class Packet:
    """One payload unit from generation through queueing to delivery."""

    flow_id: int
    kind: str
    size_bytes: int
    src_device: int
    dst_device: int
    generated_at: float
    enqueued_at: float
    delivered_at: float | None = None
    dropped: bool = False


def video_batch_sizes(
    bitrate_bps: float, frame_rate_fps: float, packet_bytes: int, n_frames: int
) -> np.ndarray:
    """Packets per frame from the fractional accumulator.

    carry += period * bitrate / (8 * packet_bytes); emit floor(carry);
    carry -= emitted. Equivalent closed form: diff of floor(k * x).
    """
    if bitrate_bps < 0:
        raise ConfigError("bitrate must be non-negative")
    if frame_rate_fps <= 0 or packet_bytes <= 0:
        raise ConfigError("frame rate and packet size must be positive")
    if n_frames <= 0:
        return np.zeros(0, dtype=np.int64)
    x = bitrate_bps / (frame_rate_fps * 8.0 * packet_bytes)
    cum = np.floor(np.arange(1, n_frames + 1, dtype=np.float64) * x)
    return np.diff(cum, prepend=0.0).astype(np.int64)


def _event_times(period: float, duration: float, offset: float) -> np.ndarray:
    n = int(np.ceil((duration - offset) / period)) if offset < duration else 0
    times = offset + period * np.arange(n, dtype=np.float64)
    return times[times < duration]


def flow_event_arrays(
    spec: FlowSpec, duration: float, offset: float = 0.0
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized arrival stream: (times, per-event packet counts).

    Each event instant carries `counts[i]` packets of spec.packet_bytes.
    Tracking packets are spread inside the frame, so they come back as
    single-packet events spaced period/packets_per_event apart.
    """
    if duration < 0:
        raise ConfigError("duration must be non-negative")
    period = spec.event_period_s
    times = _event_times(period, duration, offset)
    if spec.kind == "video":
        counts = video_batch_sizes(
            spec.bitrate_bps, spec.frame_rate_fps, spec.packet_bytes, len(times)
        )
        keep = counts > 0
        return times[keep], counts[keep]
    if spec.kind == "tracking":
        step = period / spec.packets_per_event
        sub = (times[:, None] + step * np.arange(spec.packets_per_event)).ravel()
        sub = sub[sub < duration]
        return sub, np.ones(len(sub), dtype=np.int64)
    counts = np.full(len(times), spec.packets_per_event, dtype=np.int64)
    return times, counts


def generate_flow_events(
    spec: FlowSpec, duration: float, stream_offset: float = 0.0,
    flow_id: int = 0, src_device: int = 0, dst_device: int = 0,
) -> list[Packet]:
    """Time-ordered packet arrivals for one flow."""
    times, counts = flow_event_arrays(spec, duration, stream_offset)
    out: list[Packet] = []
    for t, n in zip(times.tolist(), counts.tolist()):
        for _ in range(n):
            out.append(Packet(flow_id, spec.kind, spec.packet_bytes,
                              src_device, dst_device, t, t))
    return out


def trace_histogram(arrivals: list[Packet], bin_s: float) -> dict[str, np.ndarray]:
    """Per-bin byte totals keyed by packet kind. Total bytes are conserved."""
    if bin_s <= 0:
        raise ConfigError("histogram bin must be positive")
    if not arrivals:
        return {}
    n_bins = int(max(p.generated_at for p in arrivals) / bin_s) + 1
    hist: dict[str, np.ndarray] = {}
    for p in arrivals:
        row = hist.get(p.kind)
        if row is None:
            row = hist[p.kind] = np.zeros(n_bins, dtype=np.int64)
        row[int(p.generated_at / bin_s)] += p.size_bytes
    return hist
