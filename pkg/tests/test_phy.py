"""Rate, airtime, and link-budget oracles for the PHY layer."""

from __future__ import annotations

import math

import pytest

from mlosim.errors import ConfigError
from mlosim.phy import (
    DATA_SUBCARRIERS,
    MCS_TABLE,
    PREAMBLE_S,
    SYMBOL_S,
    LinkBudget,
    LinkConfig,
    bits_per_symbol_fraction,
    mcs,
    mpdu_bits,
    path_loss_db,
    phy_rate,
    ppdu_airtime,
    rx_power_dbm,
    senses_busy,
    symbols_for_bits,
)


def test_mcs_table_shape() -> None:
    assert len(MCS_TABLE) == 14
    assert sorted(DATA_SUBCARRIERS) == [20, 40, 80, 160, 320]
    # modulation order and coding rate never decrease with the index
    for lo, hi in zip(MCS_TABLE, MCS_TABLE[1:]):
        assert lo.modulation_bits * lo.coding_rate <= hi.modulation_bits * hi.coding_rate


def test_mcs_index_bounds() -> None:
    assert mcs(0).modulation_bits == 1
    assert mcs(13).modulation_bits == 12
    with pytest.raises(ConfigError):
        mcs(14)
    with pytest.raises(ConfigError):
        mcs(-1)


def test_phy_rate_oracles() -> None:
    # hand arithmetic: 980 sc * 10 bits * 5/6 * 2 ss / 13.6 us
    assert phy_rate(11, 80, 2) == pytest.approx(1_200_980_392.1568627, rel=1e-12)
    # 234 sc * 1 bit * 1/2 / 13.6 us
    assert phy_rate(0, 20, 1) == pytest.approx(8_602_941.176470589, rel=1e-12)


def test_phy_rate_scaling() -> None:
    # subcarrier counts double exactly from 20 to 40 MHz
    assert phy_rate(7, 40, 1) == pytest.approx(2 * phy_rate(7, 20, 1), rel=1e-12)
    # spatial streams multiply linearly
    assert phy_rate(7, 80, 2) == pytest.approx(2 * phy_rate(7, 80, 1), rel=1e-12)
    with pytest.raises(ConfigError):
        phy_rate(7, 30, 1)
    with pytest.raises(ConfigError):
        phy_rate(7, 80, 0)


def test_mpdu_bits_padding() -> None:
    # 212 B payload + 38 B framing = 250 B, padded to 252 B on air
    assert mpdu_bits(212) == 2016
    # already 4-byte aligned after framing: no padding added
    assert mpdu_bits(214) == 2016
    assert mpdu_bits(1448) == 11904
    # framing alone still occupies whole padded words
    assert mpdu_bits(1) == 8 * 40


def test_single_mpdu_airtime_oracle() -> None:
    # ceil((16 + 6 + 2016) / 117) = 18 symbols; 44 us + 18 * 13.6 us
    assert ppdu_airtime(1, 212, 0, 20, 1) == pytest.approx(288.8e-6, rel=1e-12)


def test_airtime_monotone_in_aggregation() -> None:
    prev = 0.0
    for n in (1, 2, 10, 50, 96):
        air = ppdu_airtime(n, 1448, 11, 80, 2)
        assert air > prev
        prev = air
    # preamble paid once: 96 subframes cost far less than 96 single PPDUs
    assert ppdu_airtime(96, 1448, 11, 80, 2) < 96 * ppdu_airtime(1, 1448, 11, 80, 2)


def test_symbols_for_bits_matches_airtime() -> None:
    for n_mpdus, payload in ((1, 212), (96, 1448), (1024, 1448)):
        total = n_mpdus * mpdu_bits(payload)
        n_sym = symbols_for_bits(total, 11, 80, 2)
        assert ppdu_airtime(n_mpdus, payload, 11, 80, 2) == pytest.approx(
            PREAMBLE_S + n_sym * SYMBOL_S, rel=1e-12
        )


def test_bits_per_symbol_fraction_exact() -> None:
    # exact rational arithmetic so airtime ceilings never drift across platforms
    assert bits_per_symbol_fraction(0, 20, 1) * 2 == 234
    assert bits_per_symbol_fraction(11, 80, 2) * 3 == 49_000


def test_path_loss_oracles() -> None:
    # breakpoint model: 40.05 + 20 log10(f/2.4) + 20 log10(min(d,5)) [+ 35 log10(d/5)]
    assert path_loss_db(5.0, 5.0) == pytest.approx(60.404575, abs=1e-4)
    assert path_loss_db(10.0, 5.0) == pytest.approx(70.940625, abs=1e-4)
    assert path_loss_db(5.0, 2.4) == pytest.approx(54.029400, abs=1e-4)


def test_path_loss_monotone_in_distance() -> None:
    samples = [path_loss_db(d, 5.0) for d in (0.5, 1, 3, 5, 7, 20, 100)]
    assert samples == sorted(samples)
    with pytest.raises(ConfigError):
        path_loss_db(0.0, 5.0)


def test_path_loss_floor_and_wall_penalties() -> None:
    base = path_loss_db(3.0, 5.0)
    assert path_loss_db(3.0, 5.0, n_walls=2) == pytest.approx(base + 10.0, abs=1e-9)
    assert path_loss_db(3.0, 5.0, n_floors=1) > base


def test_link_budget_sensing() -> None:
    budget = LinkBudget(23.0, -82.0)
    near = path_loss_db(3.0, 5.0)
    assert rx_power_dbm(budget, near) == pytest.approx(23.0 - 55.9676, abs=1e-3)
    assert senses_busy(budget, near)
    # ~3 km: far beyond the clear-channel threshold
    assert not senses_busy(budget, path_loss_db(3000.0, 5.0))


def test_link_config_validation() -> None:
    cfg = LinkConfig(0, 80, 11)
    assert cfg.n_ss == 2
    with pytest.raises(ConfigError):
        LinkConfig(0, 80, 14)
    with pytest.raises(ConfigError):
        LinkConfig(0, 25, 7)
