"""Static PHY math: MCS table, data rates, PPDU airtime and link budget.

All functions are pure. Rates follow the 802.11be OFDMA numerology with a
13.6 us symbol (12.8 us + 0.8 us GI) and a fixed 44 us preamble; airtime is
therefore bit-exact and reproducible across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError

# OFDM timing (5/6 GHz OFDM PHY).
SYMBOL_S = 13.6e-6
PREAMBLE_S = 44e-6
SERVICE_BITS = 16
TAIL_BITS = 6

# Data subcarriers per channel width (MHz -> N_sd).
DATA_SUBCARRIERS = {20: 234, 40: 468, 80: 980, 160: 1960, 320: 3920}

# Per-MPDU framing: MAC header + FCS + A-MPDU delimiter, padded to 4 bytes.
MAC_HEADER_BYTES = 30
FCS_BYTES = 4
AMPDU_DELIMITER_BYTES = 4
AMPDU_PAD_BYTES = 4

_MODULATION_BITS = (1, 2, 2, 4, 4, 6, 6, 6, 8, 8, 10, 10, 12, 12)
_CODING_RATES = (
    Fraction(1, 2), Fraction(1, 2), Fraction(3, 4), Fraction(1, 2),
    Fraction(3, 4), Fraction(2, 3), Fraction(3, 4), Fraction(5, 6),
    Fraction(3, 4), Fraction(5, 6), Fraction(3, 4), Fraction(5, 6),
    Fraction(3, 4), Fraction(5, 6),
)


@dataclass(frozen=True, slots=True)
class McsEntry:
    """One modulation-and-coding scheme: bits per subcarrier and coding rate."""

    index: int
    modulation_bits: int
    coding_rate: Fraction


MCS_TABLE: tuple[McsEntry, ...] = tuple(
    McsEntry(i, _MODULATION_BITS[i], _CODING_RATES[i]) for i in range(14)
)


def mcs(index: int) -> McsEntry:
    if not 0 <= index < len(MCS_TABLE):
        raise ConfigError(f"MCS index must be in 0..13, got {index}")
    return MCS_TABLE[index]


@dataclass(frozen=True, slots=True)
class LinkConfig:
    """Per-link channel configuration (static for a whole scenario)."""

    link_id: int
    bandwidth_mhz: int
    mcs: int
    n_ss: int = 2
    center_freq_ghz: float = 5.0

    def __post_init__(self) -> None:
        mcs(self.mcs)  # validates the index
        if self.bandwidth_mhz not in DATA_SUBCARRIERS:
            raise ConfigError(
                f"unsupported bandwidth {self.bandwidth_mhz} MHz "
                f"(supported: {sorted(DATA_SUBCARRIERS)})"
            )
        if self.n_ss < 1:
            raise ConfigError(f"spatial streams must be >= 1, got {self.n_ss}")


@dataclass(frozen=True, slots=True)
class LinkBudget:
    """Transmit power and carrier-sense threshold for a device pair."""

    tx_power_dbm: float = 23.0
    cca_threshold_dbm: float = -82.0
    distance_m: float = 0.0


def bits_per_symbol_fraction(mcs_index: int, bandwidth_mhz: int, n_ss: int) -> Fraction:
    """Exact data bits carried by one OFDM symbol."""
    entry = mcs(mcs_index)
    if bandwidth_mhz not in DATA_SUBCARRIERS:
        raise ConfigError(
            f"unsupported bandwidth {bandwidth_mhz} MHz "
            f"(supported: {sorted(DATA_SUBCARRIERS)})"
        )
    if n_ss < 1:
        raise ConfigError(f"spatial streams must be >= 1, got {n_ss}")
    n_sd = DATA_SUBCARRIERS[bandwidth_mhz]
    return n_sd * entry.modulation_bits * entry.coding_rate * n_ss


def phy_rate(mcs_index: int, bandwidth_mhz: int, n_ss: int) -> float:
    """PHY data rate in bits per second."""
    return float(bits_per_symbol_fraction(mcs_index, bandwidth_mhz, n_ss)) / SYMBOL_S


def mpdu_bits(payload_bytes: int) -> int:
    """On-air bits one MPDU contributes inside an A-MPDU (framing included)."""
    raw = payload_bytes + MAC_HEADER_BYTES + FCS_BYTES + AMPDU_DELIMITER_BYTES
    padded = -(-raw // AMPDU_PAD_BYTES) * AMPDU_PAD_BYTES
    return 8 * padded


def symbols_for_bits(total_mpdu_bits: int, mcs_index: int, bandwidth_mhz: int, n_ss: int) -> int:
    """OFDM symbols needed for a PPDU carrying the given MPDU payload bits."""
    bps = bits_per_symbol_fraction(mcs_index, bandwidth_mhz, n_ss)
    total = SERVICE_BITS + TAIL_BITS + total_mpdu_bits
    return math.ceil(Fraction(total) / bps)


def ppdu_airtime(
    n_mpdus: int,
    payload_bytes_per_mpdu: int,
    mcs_index: int,
    bandwidth_mhz: int,
    n_ss: int,
) -> float:
    """Airtime in seconds of an A-MPDU of equal-size MPDUs."""
    if n_mpdus < 1:
        raise ConfigError(f"a PPDU needs at least one MPDU, got {n_mpdus}")
    total = n_mpdus * mpdu_bits(payload_bytes_per_mpdu)
    return PREAMBLE_S + symbols_for_bits(total, mcs_index, bandwidth_mhz, n_ss) * SYMBOL_S


def path_loss_db(distance_m: float, freq_ghz: float, n_floors: int = 0, n_walls: int = 0) -> float:
    """Residential indoor path loss in dB (breakpoint at 5 m, slope 35 beyond)."""
    if distance_m < 0.1:
        raise ConfigError(f"path loss undefined below 0.1 m, got {distance_m} m")
    pl = 40.05 + 20.0 * math.log10(freq_ghz / 2.4) + 20.0 * math.log10(min(distance_m, 5.0))
    if distance_m > 5.0:
        pl += 35.0 * math.log10(distance_m / 5.0)
    if n_floors > 0:
        f = float(n_floors)
        pl += 18.3 * f ** ((f + 2.0) / (f + 1.0) - 0.46)
    pl += 5.0 * n_walls
    return pl


def rx_power_dbm(budget: LinkBudget, pl_db: float) -> float:
    """Received power after the given path loss."""
    return budget.tx_power_dbm - pl_db


def senses_busy(budget: LinkBudget, pl_db: float) -> bool:
    """Whether a transmission behind pl_db trips the receiver's CCA."""
    return rx_power_dbm(budget, pl_db) >= budget.cca_threshold_dbm
