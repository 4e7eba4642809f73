"""Arrival-process oracles: batch sizes, per-flow cadence, and histograms."""

from __future__ import annotations

import numpy as np
import pytest

from mlosim.errors import ConfigError
from mlosim.traffic import (
    AUDIO_PACKET_BYTES,
    DL,
    UL,
    FlowSpec,
    default_vr_flows,
    flow_event_arrays,
    generate_flow_events,
    trace_histogram,
    video_batch_sizes,
)

VIDEO = FlowSpec(DL, "video", 1448, frame_rate_fps=90.0, bitrate_bps=100e6)
TRACKING = FlowSpec(UL, "tracking", 106, frame_rate_fps=90.0, packets_per_event=3)
STATS = FlowSpec(UL, "stats", 212, frame_rate_fps=90.0)
AUDIO = FlowSpec(DL, "audio", 1200, period_s=0.025, packets_per_event=4)


def test_batch_size_long_run_mean() -> None:
    sizes = video_batch_sizes(100e6, 90.0, 1448, 9000)
    # hand arithmetic: 100e6 / (90 * 8 * 1448) = 95.91774
    assert sizes.mean() == pytest.approx(95.91774, abs=1e-3)
    assert set(np.unique(sizes)) <= {95, 96}


def test_batch_size_alternate_rate() -> None:
    sizes = video_batch_sizes(40e6, 72.0, 1448, 7200)
    assert sizes.mean() == pytest.approx(47.95887, abs=1e-3)


def test_batch_size_accumulator_never_drifts() -> None:
    # the emitted total tracks k * mean within one packet at every prefix
    sizes = video_batch_sizes(100e6, 90.0, 1448, 2000)
    mean = 100e6 / (90.0 * 8 * 1448)
    running = np.cumsum(sizes)
    ideal = mean * np.arange(1, 2001)
    assert np.all(np.abs(running - ideal) < 1.0)


def test_batch_size_edge_cases() -> None:
    assert not video_batch_sizes(0.0, 90.0, 1448, 100).any()
    assert len(video_batch_sizes(100e6, 90.0, 1448, 0)) == 0
    with pytest.raises(ConfigError):
        video_batch_sizes(-1.0, 90.0, 1448, 10)
    with pytest.raises(ConfigError):
        video_batch_sizes(100e6, 0.0, 1448, 10)
    with pytest.raises(ConfigError):
        video_batch_sizes(100e6, 90.0, 0, 10)


def test_video_events_ten_seconds() -> None:
    packets = generate_flow_events(VIDEO, 10.0)
    # 10 s * 100 Mbps / (8 * 1448 B) = 86 326 packets, within one batch
    assert abs(len(packets) - 86_326) <= 96
    load = sum(p.size_bytes for p in packets) * 8 / 10.0
    assert load == pytest.approx(100e6, rel=1e-3)
    times = [p.generated_at for p in packets]
    assert times == sorted(times)
    # all packets of one batch share the batch instant
    assert len(set(times)) <= 901


def test_tracking_events_cadence() -> None:
    packets = generate_flow_events(TRACKING, 1.0)
    assert len(packets) == 270
    assert all(p.size_bytes == 106 for p in packets)
    # three per frame, spaced a third of the frame interval apart
    t = np.array([p.generated_at for p in packets])
    assert np.allclose(np.diff(t), 1.0 / 270.0, atol=1e-12)


def test_stats_events_cadence() -> None:
    packets = generate_flow_events(STATS, 1.0)
    assert len(packets) == 90
    assert all(p.size_bytes == 212 for p in packets)


def test_audio_events_cadence() -> None:
    packets = generate_flow_events(AUDIO, 1.0)
    assert len(packets) == 4 * 40
    assert all(p.size_bytes == AUDIO_PACKET_BYTES for p in packets)


def test_uplink_bytes_per_frame() -> None:
    tracking = generate_flow_events(TRACKING, 1.0)
    stats = generate_flow_events(STATS, 1.0)
    per_frame = (
        sum(p.size_bytes for p in tracking) + sum(p.size_bytes for p in stats)
    ) / 90
    assert per_frame == 530.0


def test_zero_duration_is_empty() -> None:
    assert generate_flow_events(VIDEO, 0.0) == []


def test_offset_shifts_events() -> None:
    times, counts = flow_event_arrays(STATS, 1.0, offset=0.004)
    assert times[0] == pytest.approx(0.004, abs=1e-12)
    assert counts.sum() == len(times)
    # events never spill past the horizon
    times_late, _ = flow_event_arrays(STATS, 1.0, offset=0.9999)
    assert (times_late < 1.0).all()


def test_flow_spec_validation() -> None:
    with pytest.raises(ConfigError):
        FlowSpec("sideways", "video", 1448, frame_rate_fps=90.0, bitrate_bps=1e6)
    with pytest.raises(ConfigError):
        FlowSpec(DL, "holograms", 1448, frame_rate_fps=90.0)
    with pytest.raises(ConfigError):
        FlowSpec(DL, "video", 1448, frame_rate_fps=0.0, bitrate_bps=1e6)
    with pytest.raises(ConfigError):
        FlowSpec(DL, "video", 0, frame_rate_fps=90.0, bitrate_bps=1e6)
    with pytest.raises(ConfigError):
        FlowSpec(UL, "stats", 212)  # no cadence given


def test_default_flow_set() -> None:
    flows = default_vr_flows()
    assert [(f.direction, f.kind) for f in flows] == [
        (DL, "video"), (DL, "audio"), (UL, "tracking"), (UL, "stats"),
    ]


def test_histogram_conserves_bytes() -> None:
    packets = generate_flow_events(VIDEO, 10.0)
    hist = trace_histogram(packets, 1e-3)
    total = sum(p.size_bytes for p in packets)
    assert int(hist["video"].sum()) == total


def test_histogram_trivial_cases() -> None:
    assert trace_histogram([], 1e-3) == {}
    one = generate_flow_events(STATS, 1.0 / 95.0)  # single packet at t = 0
    hist = trace_histogram(one, 1e-3)
    assert hist["stats"][0] == 212


def test_histogram_video_is_bursty() -> None:
    packets = generate_flow_events(VIDEO, 10.0)
    hist = trace_histogram(packets, 1e-3)["video"]
    # batches land in ~90 of every 1000 one-millisecond bins
    occupied = int((hist > 0).sum())
    assert 850 <= occupied <= 1000
    assert hist.max() >= 95 * 1448
