"""Contention-based channel access and frame aggregation.

Pure timing/state helpers: binary exponential backoff, A-MPDU size limits,
and the duration of a full data + block-acknowledgement exchange. The event
engine drives these; everything here is deterministic given an RNG.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import SimulationError
from .phy import (
    PREAMBLE_S,
    SERVICE_BITS,
    SYMBOL_S,
    TAIL_BITS,
    bits_per_symbol_fraction,
    mpdu_bits,
    ppdu_airtime,
)

SLOT_S = 9e-6
SIFS_S = 16e-6
DIFS_S = 34e-6  # SIFS + 2 slots
CW_MIN = 15
CW_MAX = 1023
MAX_STAGE = 6  # (CW_MIN + 1) << 6 - 1 == CW_MAX
RETRY_LIMIT = 7
BLOCK_ACK_S = 32e-6
MAX_AMPDU_MPDUS = 1024
MAX_PPDU_S = 5.484e-3

IDLE_SLOT = "idle_slot"
BUSY = "busy"
TX_SUCCESS = "tx_success"
TX_FAILURE = "tx_failure"


def contention_window(stage: int) -> int:
    """CW for a backoff stage, doubling from CW_MIN up to CW_MAX."""
    if stage < 0:
        raise SimulationError(f"negative backoff stage {stage}")
    return min((CW_MIN + 1) << min(stage, MAX_STAGE), CW_MAX + 1) - 1


def draw_backoff(rng: random.Random, stage: int) -> int:
    """Uniform slot count in [0, CW(stage)]."""
    return rng.randint(0, contention_window(stage))


@dataclass(slots=True)
class DcfState:
    """Per-transmitter, per-link backoff bookkeeping."""

    stage: int = 0
    backoff_slots: int = 0

    def reset(self, rng: random.Random) -> None:
        self.stage = 0
        self.backoff_slots = draw_backoff(rng, 0)


def dcf_advance(state: DcfState, event: str, rng: random.Random) -> None:
    """Reference per-event state machine for one contender.

    idle_slot decrements the counter; busy freezes it; a successful exchange
    resets the stage and redraws; a failed one doubles the window and redraws.
    """
    if event == IDLE_SLOT:
        if state.backoff_slots > 0:
            state.backoff_slots -= 1
    elif event == BUSY:
        pass
    elif event == TX_SUCCESS:
        state.reset(rng)
    elif event == TX_FAILURE:
        state.stage = min(state.stage + 1, MAX_STAGE)
        state.backoff_slots = draw_backoff(rng, state.stage)
    else:
        raise SimulationError(f"unknown DCF event {event!r}")


def max_ppdu_symbols(max_ppdu_s: float = MAX_PPDU_S) -> int:
    """Data symbols that fit inside the PPDU duration cap."""
    return int((max_ppdu_s - PREAMBLE_S) / SYMBOL_S + 1e-9)


def ampdu_limit(payload_bytes: int, mcs_index: int, bandwidth_mhz: int, n_ss: int) -> int:
    """Max MPDUs per PPDU: the 1024-subframe cap or the airtime cap, whichever binds."""
    bps = bits_per_symbol_fraction(mcs_index, bandwidth_mhz, n_ss)
    bit_budget = max_ppdu_symbols() * bps - (SERVICE_BITS + TAIL_BITS)
    by_air = int(bit_budget / mpdu_bits(payload_bytes))
    return max(1, min(MAX_AMPDU_MPDUS, by_air))


def exchange_duration(
    n_mpdus: int, payload_bytes: int, mcs_index: int, bandwidth_mhz: int, n_ss: int
) -> float:
    """Data PPDU plus SIFS plus the block acknowledgement."""
    return ppdu_airtime(n_mpdus, payload_bytes, mcs_index, bandwidth_mhz, n_ss) + SIFS_S + BLOCK_ACK_S


def heterogeneous_ppdu_airtime(
    mpdu_bit_sizes: list[int], mcs_index: int, bandwidth_mhz: int, n_ss: int
) -> float:
    """Airtime for an aggregate of unequal subframes (already padded sizes)."""
    if not mpdu_bit_sizes:
        raise SimulationError("empty aggregate")
    bps = bits_per_symbol_fraction(mcs_index, bandwidth_mhz, n_ss)
    total = SERVICE_BITS + TAIL_BITS + sum(mpdu_bit_sizes)
    return PREAMBLE_S + math.ceil(total / bps) * SYMBOL_S


def apply_per(rng: random.Random, n_mpdus: int, per: float) -> list[bool]:
    """Independent success flag per subframe (True = received)."""
    return [rng.random() >= per for _ in range(n_mpdus)]
