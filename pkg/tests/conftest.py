import datetime

import numpy as np
import pytest

from fundcast.cleaning import CleanReport, StatementSeries, merge_quarterlies
from fundcast.dates import quarter_end
from fundcast.marketdata import DatedSeries, PriceHistory
from fundcast.store import StatementType


def make_clean_report(
    symbol: str,
    statement_type: StatementType,
    period_end: datetime.date,
    items: dict[str, float],
    publish_days: int = 30,
    revision: int = 0,
) -> CleanReport:
    return CleanReport(
        symbol=symbol,
        statement_type=statement_type,
        period_end=period_end,
        publish_date=period_end + datetime.timedelta(days=publish_days),
        revision=revision,
        items=dict(items),
    )


def quarterly_period_ends(n: int, start_year: int = 2019) -> list[datetime.date]:
    return [quarter_end(start_year + i // 4, i % 4 + 1) for i in range(n)]


def series_from_quarters(
    symbol: str,
    income: list[dict[str, float]],
    balance: list[dict[str, float]],
    cash_flow: list[dict[str, float]] | None = None,
    start_year: int = 2019,
    publish_days: int = 30,
) -> StatementSeries:
    """Build a merged series from per-quarter item dicts (aligned lists)."""
    ends = quarterly_period_ends(max(len(income), len(balance)), start_year)
    reports = []
    for i, items in enumerate(income):
        reports.append(make_clean_report(symbol, StatementType.INCOME_STATEMENT, ends[i], items, publish_days))
    for i, items in enumerate(balance):
        reports.append(make_clean_report(symbol, StatementType.BALANCE_SHEET, ends[i], items, publish_days))
    for i, items in enumerate(cash_flow or []):
        reports.append(make_clean_report(symbol, StatementType.CASH_FLOW, ends[i], items, publish_days))
    return merge_quarterlies(reports)


def make_history(
    symbol: str,
    start: datetime.date,
    closes: np.ndarray,
    step_days: int = 1,
    **overrides,
) -> PriceHistory:
    n = len(closes)
    dates = start.toordinal() + np.arange(n, dtype=np.int64) * step_days
    closes = np.asarray(closes, dtype=np.float64)
    cols = {
        "close": closes,
        "adj_close": closes.copy(),
        "high": closes * 1.01,
        "low": closes * 0.99,
        "value_traded": np.full(n, 1e6),
        "ind_buy_value": np.full(n, 4e5),
        "ind_sell_value": np.full(n, 4e5),
        "ind_buy_count": np.full(n, 100.0),
        "ind_sell_count": np.full(n, 100.0),
    }
    cols.update({k: np.asarray(v, dtype=np.float64) for k, v in overrides.items()})
    return PriceHistory(symbol=symbol, dates=dates, **cols)


def make_series(name: str, start: datetime.date, values, step_days: int = 1) -> DatedSeries:
    values = np.asarray(values, dtype=np.float64)
    dates = start.toordinal() + np.arange(len(values), dtype=np.int64) * step_days
    return DatedSeries(name=name, dates=dates, values=values)


@pytest.fixture(scope="session")
def small_bundle():
    """Shared small synthetic market for feature/point-in-time tests."""
    from fundcast.synth import SynthConfig, generate_market

    return generate_market(SynthConfig(n_stocks=12, n_quarters=12, rng_seed=11, signal_strength=0.6))
