import datetime

import numpy as np
import pytest

from fundcast.dates import add_months
from fundcast.errors import DegenerateVariance, InsufficientHistory
from fundcast.features.ratios import (
    RATIO_NAMES,
    StockSnapshot,
    compute_beta,
    compute_ratios,
    ttm_aggregate,
)
from fundcast.store import StatementType

from conftest import make_history, series_from_quarters
from oracle_ratios import ORACLES, RatioFixture, relative_error

D = datetime.date


def minimal_series(income_overrides=None, balance_overrides=None, quarters=6):
    income = []
    balance = []
    cash = []
    for q in range(quarters):
        income.append(
            {
                "revenue": 100.0,
                "cogs": 60.0,
                "gross_profit": 40.0,
                "operating_profit": 30.0,
                "ebit": 30.0,
                "interest_expense": 5.0,
                "net_income": 20.0,
            }
        )
        balance.append(
            {
                "cash": 30.0,
                "cash_equivalents": 10.0,
                "inventory": 50.0,
                "current_assets": 200.0,
                "fixed_assets": 300.0,
                "total_assets": 500.0,
                "current_liabilities": 100.0,
                "long_term_debt": 50.0,
                "total_debt": 50.0,
                "total_equity": 100.0,
                "retained_earnings": 80.0,
                "shares_outstanding": 10.0,
            }
        )
        cash.append({"operating_cash_flow": 25.0})
    for q, items in (income_overrides or {}).items():
        income[q].update(items)
    for q, items in (balance_overrides or {}).items():
        balance[q].update(items)
    return series_from_quarters("RAT", income, balance, cash)


def snapshot_for(series, price=100.0, as_of=None):
    last = series.of_type(StatementType.INCOME_STATEMENT)[-1]
    as_of = as_of or add_months(last.publish_date, 1)
    n = 200
    start = as_of - datetime.timedelta(days=2 * (n - 1))
    history = make_history("RAT", start, np.full(n, price), step_days=2)
    return StockSnapshot.at(history, 10.0, as_of), as_of


def test_debt_to_equity_simple():
    series = minimal_series()
    snapshot, as_of = snapshot_for(series)
    r = compute_ratios(series, snapshot, as_of)
    assert r.debt_to_equity == pytest.approx(0.5, rel=1e-12)


def test_gross_profit_growth_year_over_year():
    series = minimal_series(income_overrides={1: {"gross_profit": 100.0, "revenue": 160.0, "cogs": 60.0},
                                              5: {"gross_profit": 120.0, "revenue": 180.0, "cogs": 60.0}})
    snapshot, as_of = snapshot_for(series)
    r = compute_ratios(series, snapshot, as_of)
    assert r.gross_profit_growth == pytest.approx(0.2, rel=1e-12)


def test_quick_ratio_oracle_value():
    series = minimal_series()
    snapshot, as_of = snapshot_for(series)
    r = compute_ratios(series, snapshot, as_of)
    assert r.quick_ratio == pytest.approx((200.0 - 50.0) / 100.0, rel=1e-12)


def test_zero_denominator_is_missing_not_zero_or_inf():
    series = minimal_series(balance_overrides={5: {"total_equity": 0.0}})
    snapshot, as_of = snapshot_for(series)
    r = compute_ratios(series, snapshot, as_of)
    assert r.debt_to_equity is None


def test_missing_input_marks_ratio_missing():
    series = minimal_series()
    for rep in series.of_type(StatementType.BALANCE_SHEET):
        rep.items.pop("inventory", None)
    snapshot, as_of = snapshot_for(series)
    r = compute_ratios(series, snapshot, as_of)
    assert r.quick_ratio is None
    assert r.inventory_turnover is None
    assert r.current_ratio is not None


def test_averages_use_current_and_year_ago():
    series = minimal_series(balance_overrides={1: {"total_assets": 300.0}, 5: {"total_assets": 500.0}})
    snapshot, as_of = snapshot_for(series)
    r = compute_ratios(series, snapshot, as_of)
    assert r.roa == pytest.approx(20.0 / 400.0, rel=1e-12)


def test_visibility_respects_publication_lag():
    series = minimal_series(income_overrides={5: {"revenue": 999.0, "net_income": 999.0,
                                                  "cogs": 0.0, "gross_profit": 999.0}})
    last = series.of_type(StatementType.INCOME_STATEMENT)[-1]
    # at one day before the last report's usable date, the previous quarter rules
    early = add_months(last.publish_date, 1) - datetime.timedelta(days=1)
    snapshot, _ = snapshot_for(series, as_of=early)
    r = compute_ratios(series, snapshot, early)
    assert r.net_income_margin == pytest.approx(20.0 / 100.0, rel=1e-12)


def test_no_visible_reports_raises():
    series = minimal_series()
    # before anything was published plus lag
    early = D(2019, 1, 15)
    n = 50
    history = make_history("RAT", D(2018, 10, 1), np.full(n, 100.0), step_days=2)
    snapshot = StockSnapshot.at(history, 10.0, early)
    from fundcast.errors import NoVisibleReports

    with pytest.raises(NoVisibleReports):
        compute_ratios(series, snapshot, early)


def test_quick_le_current_invariant_and_margin_bound():
    rng = np.random.default_rng(0)
    for _ in range(100):
        f = RatioFixture(rng)
        r = compute_ratios(f.series, f.snapshot, f.as_of, f.market_index, f.config)
        if r.quick_ratio is not None and r.current_ratio is not None:
            assert r.quick_ratio <= r.current_ratio
        if r.gross_profit_margin is not None:
            assert r.gross_profit_margin <= 1.0


# --- ttm -----------------------------------------------------------------------


def test_pe_ttm_simple():
    # four visible quarters of 50 each -> ttm earnings 200, shares 10 -> eps 20
    series = minimal_series(income_overrides={q: {"net_income": 50.0} for q in range(6)})
    snapshot, as_of = snapshot_for(series, price=100.0)
    agg = ttm_aggregate(series, snapshot, as_of)
    assert agg.eps_ttm == pytest.approx(20.0, rel=1e-12)
    assert agg.pe_ttm == pytest.approx(5.0, rel=1e-12)


def test_constant_daily_pe_median_is_that_constant():
    series = minimal_series(income_overrides={q: {"net_income": 50.0} for q in range(6)})
    snapshot, as_of = snapshot_for(series, price=140.0)
    agg = ttm_aggregate(series, snapshot, as_of)
    assert agg.pe_ttm_median == pytest.approx(7.0, rel=1e-12)


def test_insufficient_history_raises():
    series = minimal_series(quarters=3)
    snapshot, as_of = snapshot_for(series)
    with pytest.raises(InsufficientHistory):
        ttm_aggregate(series, snapshot, as_of)
    r = compute_ratios(series, snapshot, as_of)
    assert r.pe_ttm is None and r.ps_ttm is None and r.pe_ttm_median is None


# --- beta ----------------------------------------------------------------------


def test_beta_identical_series_is_one_under_both_modes():
    rng = np.random.default_rng(1)
    r = rng.normal(0, 0.01, size=100)
    assert compute_beta(r, r, mode="printed") == pytest.approx(1.0, rel=1e-12)
    assert compute_beta(r, r, mode="conventional") == pytest.approx(1.0, rel=1e-12)


def test_beta_doubled_returns_printed_vs_conventional():
    rng = np.random.default_rng(2)
    rm = rng.normal(0, 0.01, size=100)
    rs = 2.0 * rm
    # Cov(Rm, 2Rm)/Var(2Rm) = 2/4 = 0.5; Cov(2Rm, Rm)/Var(Rm) = 2
    assert compute_beta(rs, rm, mode="printed") == pytest.approx(0.5, rel=1e-12)
    assert compute_beta(rs, rm, mode="conventional") == pytest.approx(2.0, rel=1e-12)


def test_beta_constant_stock_degenerate_variance():
    rng = np.random.default_rng(3)
    rm = rng.normal(0, 0.01, size=100)
    rs = np.zeros(100)
    with pytest.raises(DegenerateVariance):
        compute_beta(rs, rm, mode="printed")
    # conventional mode divides by market variance, which is fine here
    assert np.isfinite(compute_beta(rs, rm, mode="conventional"))


def test_beta_min_observations():
    rng = np.random.default_rng(4)
    rm = rng.normal(0, 0.01, size=30)
    with pytest.raises(InsufficientHistory):
        compute_beta(rm, rm, min_obs=60)


# --- the oracle suite ------------------------------------------------------------


def test_every_ratio_matches_its_oracle():
    rng = np.random.default_rng(42)
    checked = {name: 0 for name in RATIO_NAMES}
    for _ in range(300):
        f = RatioFixture(rng)
        r = compute_ratios(f.series, f.snapshot, f.as_of, f.market_index, f.config).as_dict()
        for name in RATIO_NAMES:
            expected = ORACLES[name](f)
            got = r[name]
            assert got is not None, name
            assert relative_error(got, expected) < 1e-12, (name, got, expected)
            checked[name] += 1
    assert all(v == 300 for v in checked.values())
