"""Financial ratio features over point-in-time statement series.

Every ratio follows the same missing policy: if any input is absent or the
denominator is zero, the ratio is missing (None), never 0 and never inf.
Balance-sheet averages are the mean of the current and year-ago values;
growth ratios compare against the same quarter one year earlier.

Visibility: a statement is usable at as_of only when its publish date,
shifted by the publication lag, is at or before as_of.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass, fields

import numpy as np

from ..cleaning import CleanReport, StatementSeries
from ..dates import add_months, quarter_index, to_ordinal
from ..errors import DegenerateVariance, InsufficientHistory, NoVisibleReports
from ..marketdata import DatedSeries, PriceHistory
from ..store import StatementType

RATIO_NAMES = (
    "debt_to_equity",
    "return_on_fixed_assets",
    "debt_ratio",
    "gross_profit_margin",
    "current_ratio",
    "net_income_margin",
    "operating_profit_margin",
    "interest_coverage",
    "roe",
    "cash_flow_to_income",
    "quick_ratio",
    "long_term_debt_ratio",
    "roa",
    "inventory_turnover",
    "asset_turnover",
    "cash_ratio",
    "gross_profit_growth",
    "revenue_growth",
    "re_ta",
    "pe_ttm",
    "pe_ttm_median",
    "ps_ttm",
    "ps_ttm_median",
    "beta_1y",
)


@dataclass
class RatioSet:
    debt_to_equity: float | None = None
    return_on_fixed_assets: float | None = None
    debt_ratio: float | None = None
    gross_profit_margin: float | None = None
    current_ratio: float | None = None
    net_income_margin: float | None = None
    operating_profit_margin: float | None = None
    interest_coverage: float | None = None
    roe: float | None = None
    cash_flow_to_income: float | None = None
    quick_ratio: float | None = None
    long_term_debt_ratio: float | None = None
    roa: float | None = None
    inventory_turnover: float | None = None
    asset_turnover: float | None = None
    cash_ratio: float | None = None
    gross_profit_growth: float | None = None
    revenue_growth: float | None = None
    re_ta: float | None = None
    pe_ttm: float | None = None
    pe_ttm_median: float | None = None
    ps_ttm: float | None = None
    ps_ttm_median: float | None = None
    beta_1y: float | None = None

    def as_dict(self) -> dict[str, float | None]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class FeatureConfig:
    """Knobs for feature computation, fixed per pipeline run."""

    lag_months: int = 1
    # "printed" divides Cov(Rm,Rs) by Var(Rs); "conventional" by Var(Rm).
    beta_mode: str = "printed"
    beta_window_days: int = 365
    beta_min_obs: int = 60
    macro_staleness_days: int = 14
    ttm_quarters: int = 4


@dataclass
class StockSnapshot:
    """Market view of one stock at as_of (point-in-time)."""

    symbol: str
    as_of: datetime.date
    adjusted_close: float
    market_cap: float
    history: PriceHistory

    @classmethod
    def at(cls, history: PriceHistory, shares_outstanding: float, as_of: datetime.date) -> "StockSnapshot | None":
        price = history.adj_close_at(as_of)
        if price is None or price <= 0 or shares_outstanding <= 0:
            return None
        return cls(
            symbol=history.symbol,
            as_of=as_of,
            adjusted_close=price,
            market_cap=price * shares_outstanding,
            history=history,
        )


def _div(num: float | None, den: float | None) -> float | None:
    if num is None or den is None or den == 0:
        return None
    return num / den


def _avg(cur: float | None, prior: float | None) -> float | None:
    if cur is None or prior is None:
        return None
    return (cur + prior) / 2.0


def _find_quarter(reports: list[CleanReport], qi: int) -> CleanReport | None:
    for r in reports:
        if quarter_index(r.period_end) == qi:
            return r
    return None


@dataclass
class TtmAggregate:
    eps_ttm: float | None = None
    revenue_per_share_ttm: float | None = None
    pe_ttm: float | None = None
    ps_ttm: float | None = None
    pe_ttm_median: float | None = None
    ps_ttm_median: float | None = None


def ttm_aggregate(
    series: StatementSeries,
    snapshot: StockSnapshot,
    as_of: datetime.date,
    config: FeatureConfig = FeatureConfig(),
) -> TtmAggregate:
    """Trailing-twelve-month earnings/revenue aggregates and valuation ratios.

    TTM figures sum the four most recent visible quarters. The median ratios
    take each trading day in the trailing year, price it with that day's
    adjusted close against the TTM denominator visible on that day, and
    report the median of the resulting daily series.

    Raises InsufficientHistory when fewer than four visible income
    statements end within the trailing twelve months.
    """
    lag = config.lag_months
    incs = series.visible(StatementType.INCOME_STATEMENT, as_of, lag)
    window_start = add_months(as_of, -12)
    in_window = [r for r in incs if window_start < r.period_end <= as_of]
    if len(in_window) < config.ttm_quarters:
        raise InsufficientHistory(
            f"{series.symbol}: {len(in_window)} visible quarters in the trailing year at {as_of}"
        )
    last4 = sorted(in_window, key=lambda r: r.period_end)[-config.ttm_quarters:]

    def ttm_sum(reports: list[CleanReport], code: str) -> float | None:
        vals = [r.get(code) for r in reports]
        if any(v is None for v in vals):
            return None
        return float(sum(vals))

    bss = series.visible(StatementType.BALANCE_SHEET, as_of, lag)
    shares = bss[-1].get("shares_outstanding") if bss else None
    if shares is not None and shares <= 0:
        shares = None

    ttm_earn = ttm_sum(last4, "net_income")
    ttm_rev = ttm_sum(last4, "revenue")
    agg = TtmAggregate()
    agg.eps_ttm = _div(ttm_earn, shares)
    agg.revenue_per_share_ttm = _div(ttm_rev, shares)
    agg.pe_ttm = _div(snapshot.adjusted_close, agg.eps_ttm)
    agg.ps_ttm = _div(snapshot.adjusted_close, agg.revenue_per_share_ttm)

    # Daily step functions of the then-current TTM denominators. Values only
    # change when a statement becomes usable, so precompute per-event levels.
    inc_events = sorted(incs, key=lambda r: (add_months(r.publish_date, lag), r.period_end))
    bs_events = sorted(bss, key=lambda r: (add_months(r.publish_date, lag), r.period_end))
    event_dates = sorted(
        {to_ordinal(add_months(r.publish_date, lag)) for r in inc_events + bs_events}
    )
    if not event_dates:
        return agg
    n_ev = len(event_dates)
    ev_eps = np.full(n_ev, np.nan)
    ev_rps = np.full(n_ev, np.nan)
    ev_arr = np.asarray(event_dates, dtype=np.int64)
    inc_usable = np.asarray([to_ordinal(add_months(r.publish_date, lag)) for r in inc_events], dtype=np.int64)
    bs_usable = np.asarray([to_ordinal(add_months(r.publish_date, lag)) for r in bs_events], dtype=np.int64)
    for i, ev in enumerate(event_dates):
        vis_inc = [inc_events[j] for j in range(len(inc_events)) if inc_usable[j] <= ev]
        vis_bs = [bs_events[j] for j in range(len(bs_events)) if bs_usable[j] <= ev]
        if len(vis_inc) < config.ttm_quarters or not vis_bs:
            continue
        recent = sorted(vis_inc, key=lambda r: r.period_end)[-config.ttm_quarters:]
        earn = ttm_sum(recent, "net_income")
        rev = ttm_sum(recent, "revenue")
        sh = vis_bs[-1].get("shares_outstanding")
        if sh is None or sh <= 0:
            continue
        if earn is not None:
            ev_eps[i] = earn / sh
        if rev is not None:
            ev_rps[i] = rev / sh

    h = snapshot.history
    sl = h.window(window_start, as_of)
    day_dates = h.dates[sl]
    day_close = h.adj_close[sl]
    if len(day_dates) == 0:
        return agg
    step = np.searchsorted(ev_arr, day_dates, side="right") - 1
    valid = step >= 0
    eps_day = np.where(valid, ev_eps[np.clip(step, 0, n_ev - 1)], np.nan)
    rps_day = np.where(valid, ev_rps[np.clip(step, 0, n_ev - 1)], np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        pe_day = day_close / eps_day
        ps_day = day_close / rps_day
    pe_ok = np.isfinite(pe_day)
    ps_ok = np.isfinite(ps_day)
    agg.pe_ttm_median = float(np.median(pe_day[pe_ok])) if pe_ok.any() else None
    agg.ps_ttm_median = float(np.median(ps_day[ps_ok])) if ps_ok.any() else None
    return agg


def compute_beta(
    stock_returns: np.ndarray,
    market_returns: np.ndarray,
    mode: str = "printed",
    min_obs: int = 60,
) -> float:
    """Beta from paired daily return series.

    mode "printed" uses Cov(Rm,Rs)/Var(Rs); mode "conventional" uses
    Cov(Rs,Rm)/Var(Rm). Population (1/n) moments throughout; the n factor
    cancels, so only the denominator series choice matters.
    """
    rs = np.asarray(stock_returns, dtype=np.float64)
    rm = np.asarray(market_returns, dtype=np.float64)
    if rs.shape != rm.shape:
        raise ValueError("return series must be aligned")
    n = len(rs)
    if n < min_obs:
        raise InsufficientHistory(f"{n} paired observations < {min_obs}")
    ds = rs - rs.mean()
    dm = rm - rm.mean()
    cov = float(np.dot(dm, ds)) / n
    if mode == "printed":
        var = float(np.dot(ds, ds)) / n
    elif mode == "conventional":
        var = float(np.dot(dm, dm)) / n
    else:
        raise ValueError(f"unknown beta mode {mode!r}")
    if var == 0.0:
        raise DegenerateVariance("denominator series has zero variance")
    return cov / var


def aligned_returns(
    history: PriceHistory,
    market_index: DatedSeries,
    as_of: datetime.date,
    window_days: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Daily returns of stock and market on their common dates in the window."""
    start = to_ordinal(as_of) - window_days
    end = to_ordinal(as_of)
    s_sl = slice(
        int(np.searchsorted(history.dates, start, side="right")),
        int(np.searchsorted(history.dates, end, side="right")),
    )
    m_sl = slice(
        int(np.searchsorted(market_index.dates, start, side="right")),
        int(np.searchsorted(market_index.dates, end, side="right")),
    )
    common, si, mi = np.intersect1d(
        history.dates[s_sl], market_index.dates[m_sl], return_indices=True
    )
    if len(common) < 2:
        return np.empty(0), np.empty(0)
    s_vals = history.adj_close[s_sl][si]
    m_vals = market_index.values[m_sl][mi]
    return s_vals[1:] / s_vals[:-1] - 1.0, m_vals[1:] / m_vals[:-1] - 1.0


def compute_ratios(
    series: StatementSeries,
    snapshot: StockSnapshot,
    as_of: datetime.date,
    market_index: DatedSeries | None = None,
    config: FeatureConfig = FeatureConfig(),
) -> RatioSet:
    """All financial ratio features for one (stock, as_of)."""
    lag = config.lag_months
    incs = series.visible(StatementType.INCOME_STATEMENT, as_of, lag)
    bss = series.visible(StatementType.BALANCE_SHEET, as_of, lag)
    cfs = series.visible(StatementType.CASH_FLOW, as_of, lag)
    if not incs and not bss and not cfs:
        raise NoVisibleReports(f"{series.symbol}: nothing visible at {as_of}")

    inc = incs[-1] if incs else None
    bs = bss[-1] if bss else None
    inc_prev = _find_quarter(incs, quarter_index(inc.period_end) - 4) if inc else None
    bs_prev = _find_quarter(bss, quarter_index(bs.period_end) - 4) if bs else None
    cf = _find_quarter(cfs, quarter_index(inc.period_end)) if inc else None

    def gi(code: str) -> float | None:
        return inc.get(code) if inc else None

    def gb(code: str) -> float | None:
        return bs.get(code) if bs else None

    rev = gi("revenue")
    ni = gi("net_income")
    gp = gi("gross_profit")
    ta = gb("total_assets")
    cl = gb("current_liabilities")
    ca = gb("current_assets")

    avg_ta = _avg(ta, bs_prev.get("total_assets") if bs_prev else None)
    avg_fixed = _avg(gb("fixed_assets"), bs_prev.get("fixed_assets") if bs_prev else None)
    avg_equity = _avg(gb("total_equity"), bs_prev.get("total_equity") if bs_prev else None)
    avg_inv = _avg(gb("inventory"), bs_prev.get("inventory") if bs_prev else None)

    r = RatioSet()
    r.debt_to_equity = _div(gb("total_debt"), gb("total_equity"))
    r.return_on_fixed_assets = _div(ni, avg_fixed)
    r.debt_ratio = _div(gb("total_debt"), ta)
    r.gross_profit_margin = _div(gp, rev)
    r.current_ratio = _div(ca, cl)
    r.net_income_margin = _div(ni, rev)
    r.operating_profit_margin = _div(gi("operating_profit"), rev)
    r.interest_coverage = _div(gi("ebit"), gi("interest_expense"))
    r.roe = _div(ni, avg_equity)
    r.cash_flow_to_income = _div(cf.get("operating_cash_flow") if cf else None, ni)
    quick_num = None if ca is None or gb("inventory") is None else ca - gb("inventory")
    r.quick_ratio = _div(quick_num, cl)
    r.long_term_debt_ratio = _div(gb("long_term_debt"), ta)
    r.roa = _div(ni, avg_ta)
    r.inventory_turnover = _div(gi("cogs"), avg_inv)
    r.asset_turnover = _div(rev, avg_ta)
    cash_num = (
        None
        if gb("cash") is None or gb("cash_equivalents") is None
        else gb("cash") + gb("cash_equivalents")
    )
    r.cash_ratio = _div(cash_num, cl)
    gp_ratio = _div(gp, inc_prev.get("gross_profit") if inc_prev else None)
    r.gross_profit_growth = None if gp_ratio is None else gp_ratio - 1.0
    rev_ratio = _div(rev, inc_prev.get("revenue") if inc_prev else None)
    r.revenue_growth = None if rev_ratio is None else rev_ratio - 1.0
    r.re_ta = _div(gb("retained_earnings"), ta)

    try:
        agg = ttm_aggregate(series, snapshot, as_of, config)
        r.pe_ttm = agg.pe_ttm
        r.ps_ttm = agg.ps_ttm
        r.pe_ttm_median = agg.pe_ttm_median
        r.ps_ttm_median = agg.ps_ttm_median
    except InsufficientHistory:
        pass

    if market_index is not None:
        rs, rm = aligned_returns(snapshot.history, market_index, as_of, config.beta_window_days)
        try:
            r.beta_1y = compute_beta(rs, rm, mode=config.beta_mode, min_obs=config.beta_min_obs)
        except (InsufficientHistory, DegenerateVariance):
            pass
    return r
