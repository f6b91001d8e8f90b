import datetime

import numpy as np
import pytest

from fundcast.errors import NoTradingDays, SeriesGapTooLarge
from fundcast.features.macro import compute_macro_features
from fundcast.features.trading import compute_trading_features
from fundcast.marketdata import MacroBundle

from conftest import make_history, make_series

D = datetime.date


def history_with(n=25, start=D(2021, 1, 1), **overrides):
    closes = overrides.pop("closes", np.full(n, 100.0))
    return make_history("TRD", start, closes, **overrides)


def test_avg_price_volatility_is_mean_high_over_low():
    n = 2
    h = history_with(
        n=2,
        start=D(2021, 3, 1),
        high=np.array([102.0, 104.0]),
        low=np.array([100.0, 100.0]),
    )
    f = compute_trading_features(h, D(2021, 3, 15))
    assert f.avg_price_volatility == pytest.approx((1.02 + 1.04) / 2.0, rel=1e-12)


def test_bs_power_ratio_single_day():
    h = history_with(
        n=1,
        start=D(2021, 3, 1),
        ind_buy_value=np.array([100.0]),
        ind_sell_value=np.array([100.0]),
        ind_buy_count=np.array([10.0]),
        ind_sell_count=np.array([20.0]),
    )
    f = compute_trading_features(h, D(2021, 3, 15))
    assert f.bs_power_ratio == pytest.approx(2.0, rel=1e-12)  # (100/10)/(100/20)


def test_ownership_change_zero_when_balanced():
    h = history_with(n=10, start=D(2021, 3, 1))
    f = compute_trading_features(h, D(2021, 3, 15))
    assert f.ownership_change == 0.0


def test_no_trading_days_raises():
    h = history_with(n=5, start=D(2020, 1, 1))
    with pytest.raises(NoTradingDays):
        compute_trading_features(h, D(2021, 6, 1))


def test_window_excludes_days_after_as_of():
    closes = np.full(40, 100.0)
    closes[30:] = 500.0  # after as_of
    h = history_with(n=40, start=D(2021, 3, 1), closes=closes,
                     high=closes * 1.01, low=closes * 0.99)
    as_of = D(2021, 3, 30)
    f = compute_trading_features(h, as_of)
    assert f.avg_daily_return == pytest.approx(0.0, abs=1e-15)


def test_avg_daily_return_uses_prior_close_for_first_window_day():
    # two bars: day before window and one inside; return = 110/100 - 1
    h = history_with(n=2, start=D(2021, 3, 1), closes=np.array([100.0, 110.0]))
    f = compute_trading_features(h, D(2021, 3, 2))
    # window (2021-02-02, 2021-03-02] contains both bars; first has no prior
    assert f.avg_daily_return == pytest.approx(0.1 / 1, rel=1e-12)


# --- macro ---------------------------------------------------------------------


def macro_bundle(n=400, start=D(2020, 1, 1)):
    bundle = MacroBundle()
    bundle.series["usd_irr"] = make_series("usd_irr", start, np.linspace(500_000, 550_000, n))
    bundle.series["gold_usd"] = make_series("gold_usd", start, np.full(n, 1800.0))
    bundle.series["bond_daily_return"] = make_series("bond_daily_return", start, np.full(n, 0.0005))
    bundle.series["market_index"] = make_series("market_index", start, np.linspace(2.0e6, 2.4e6, n))
    bundle.series["equal_weight_index"] = make_series("equal_weight_index", start, np.full(n, 1e6))
    return bundle


def test_usd_return_one_month():
    bundle = macro_bundle(n=200, start=D(2020, 8, 1))
    usd = bundle.series["usd_irr"]
    as_of = D(2021, 1, 15)
    usd.values[usd.idx_at_or_before(as_of)] = 550_000.0
    usd.values[usd.idx_at_or_before(D(2020, 12, 15))] = 500_000.0
    f = compute_macro_features(bundle, as_of)
    assert f.usd_irr_return_1m == pytest.approx(0.10, rel=1e-12)


def test_flat_gold_returns_zero():
    f = compute_macro_features(macro_bundle(), D(2020, 12, 1))
    assert f.gold_usd_return_1m == 0.0


def test_market_index_three_month_return():
    # linear 2.0M -> 2.4M over 400 days; check the exact ratio arithmetic
    bundle = macro_bundle()
    as_of = D(2020, 12, 1)
    now = bundle.series["market_index"].value_at(as_of)
    then = bundle.series["market_index"].value_at(D(2020, 9, 1))
    f = compute_macro_features(bundle, as_of)
    assert f.market_index_return_3m == pytest.approx(now / then - 1.0, rel=1e-12)
    assert f.market_index_value == pytest.approx(now, rel=1e-12)


def test_direct_three_month_ratio():
    bundle = macro_bundle()
    idx = bundle.series["market_index"]
    # plant exact values at the two lookup dates
    as_of = D(2020, 12, 1)
    i_now = idx.idx_at_or_before(as_of)
    i_then = idx.idx_at_or_before(D(2020, 9, 1))
    idx.values[i_now] = 2.4e6
    idx.values[i_then] = 2.0e6
    f = compute_macro_features(bundle, as_of)
    assert f.market_index_return_3m == pytest.approx(0.20, rel=1e-12)


def test_gov_bond_return_is_trailing_month_average():
    f = compute_macro_features(macro_bundle(), D(2020, 12, 1))
    assert f.gov_bond_return_1m == pytest.approx(0.0005, rel=1e-12)


def test_series_gap_raises():
    bundle = macro_bundle(n=30)  # ends 2020-01-30
    with pytest.raises(SeriesGapTooLarge):
        compute_macro_features(bundle, D(2020, 6, 1), staleness_days=14)
