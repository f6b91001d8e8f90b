"""Independent oracles for the financial ratio features.

Each oracle is coded straight off the ratio definitions, one expression
each, against a flat fixture view. None of them call the production ratio
code, so agreement is a genuine cross-check.
"""

import datetime

import numpy as np

from fundcast.dates import add_months
from fundcast.features.ratios import FeatureConfig, StockSnapshot
from fundcast.store import StatementType

from conftest import make_history, make_series, series_from_quarters


class RatioFixture:
    """One random statement fixture: 6 quarters, price history, market index."""

    def __init__(self, rng: np.random.Generator, start_year: int = 2019):
        def money(lo=1e3, hi=1e6):
            return float(rng.integers(int(lo), int(hi)))

        self.inc_q = []
        self.bs_q = []
        self.cf_q = []
        for _ in range(6):
            revenue = money(5e4, 1e6)
            cogs = float(rng.integers(1, int(revenue)))
            inc = {
                "revenue": revenue,
                "cogs": cogs,
                "gross_profit": revenue - cogs,
                "operating_profit": money(1e3, 2e5),
                "ebit": money(1e3, 2e5),
                "interest_expense": money(1e2, 5e4),
                "net_income": money(1e3, 3e5),
            }
            total_assets = money(5e5, 5e6)
            bs = {
                "cash": money(1e3, 1e5),
                "cash_equivalents": money(1e2, 5e4),
                "inventory": money(1e3, 2e5),
                "current_assets": money(1e5, 2e6),
                "fixed_assets": money(1e5, 2e6),
                "total_assets": total_assets,
                "current_liabilities": money(1e4, 1e6),
                "long_term_debt": money(1e4, 1e6),
                "total_debt": money(1e5, 3e6),
                "total_equity": money(1e5, 3e6),
                "retained_earnings": money(1e3, 1e6),
                "shares_outstanding": float(rng.integers(1_000, 1_000_000)),
            }
            cf = {"operating_cash_flow": money(1e3, 3e5)}
            self.inc_q.append(inc)
            self.bs_q.append(bs)
            self.cf_q.append(cf)

        self.series = series_from_quarters("ORC", self.inc_q, self.bs_q, self.cf_q, start_year=start_year)
        last_inc = self.series.of_type(StatementType.INCOME_STATEMENT)[-1]
        self.config = FeatureConfig()
        self.as_of = add_months(last_inc.publish_date, self.config.lag_months) + datetime.timedelta(
            days=int(rng.integers(0, 10))
        )

        # price history on a 3-day grid covering 15 months before as_of
        n_bars = 160
        start = self.as_of - datetime.timedelta(days=3 * (n_bars - 1))
        closes = 100.0 * np.exp(np.cumsum(rng.normal(0.0005, 0.02, size=n_bars)))
        self.history = make_history("ORC", start, closes, step_days=3)
        market = 1e6 * np.exp(np.cumsum(rng.normal(0.0004, 0.01, size=n_bars)))
        self.market_index = make_series("market_index", start, market, step_days=3)
        self.shares = self.bs_q[-1]["shares_outstanding"]
        self.snapshot = StockSnapshot.at(self.history, self.shares, self.as_of)

        # flat views used by the oracles
        self.inc = self.inc_q[-1]
        self.inc_prev = self.inc_q[1]  # same quarter one year earlier
        self.bs = self.bs_q[-1]
        self.bs_prev = self.bs_q[1]
        self.cf = self.cf_q[-1]
        self.price = self.snapshot.adjusted_close

    # --- oracle building blocks ---

    def ttm_earnings(self):
        return sum(q["net_income"] for q in self.inc_q[2:6])

    def ttm_revenue(self):
        return sum(q["revenue"] for q in self.inc_q[2:6])

    def daily_valuation_series(self, field):
        """Brute-force daily P/E or P/S over the trailing year with
        then-current visibility (usable dates precomputed once)."""
        lag = self.config.lag_months
        # merged series is period-ordered; usable ordinals precomputed once
        incs = [
            (add_months(r.publish_date, lag).toordinal(), r.items[field])
            for r in self.series.of_type(StatementType.INCOME_STATEMENT)
        ]
        bss = [
            (add_months(r.publish_date, lag).toordinal(), r.items["shares_outstanding"])
            for r in self.series.of_type(StatementType.BALANCE_SHEET)
        ]
        lo = add_months(self.as_of, -12).toordinal()
        hi = self.as_of.toordinal()
        out = []
        for d, close in zip(self.history.dates.tolist(), self.history.adj_close.tolist()):
            if not (lo < d <= hi):
                continue
            vis = [v for u, v in incs if u <= d]
            vis_sh = [s for u, s in bss if u <= d]
            if len(vis) < 4 or not vis_sh:
                continue
            total = sum(vis[-4:])
            shares = vis_sh[-1]
            if shares <= 0 or total == 0:
                continue
            out.append(close / (total / shares))
        return out

    def beta_window_returns(self):
        start = self.as_of.toordinal() - self.config.beta_window_days
        end = self.as_of.toordinal()
        s_dates = self.history.dates
        s_mask = (s_dates > start) & (s_dates <= end)
        m_mask = (self.market_index.dates > start) & (self.market_index.dates <= end)
        common = np.intersect1d(s_dates[s_mask], self.market_index.dates[m_mask])
        sv = self.history.adj_close[np.searchsorted(s_dates, common)]
        mv = self.market_index.values[np.searchsorted(self.market_index.dates, common)]
        return sv[1:] / sv[:-1] - 1.0, mv[1:] / mv[:-1] - 1.0


def _avg(cur, prev):
    return (cur + prev) / 2.0


ORACLES = {
    "debt_to_equity": lambda f: f.bs["total_debt"] / f.bs["total_equity"],
    "return_on_fixed_assets": lambda f: f.inc["net_income"] / _avg(f.bs["fixed_assets"], f.bs_prev["fixed_assets"]),
    "debt_ratio": lambda f: f.bs["total_debt"] / f.bs["total_assets"],
    "gross_profit_margin": lambda f: f.inc["gross_profit"] / f.inc["revenue"],
    "current_ratio": lambda f: f.bs["current_assets"] / f.bs["current_liabilities"],
    "net_income_margin": lambda f: f.inc["net_income"] / f.inc["revenue"],
    "operating_profit_margin": lambda f: f.inc["operating_profit"] / f.inc["revenue"],
    "interest_coverage": lambda f: f.inc["ebit"] / f.inc["interest_expense"],
    "roe": lambda f: f.inc["net_income"] / _avg(f.bs["total_equity"], f.bs_prev["total_equity"]),
    "cash_flow_to_income": lambda f: f.cf["operating_cash_flow"] / f.inc["net_income"],
    "quick_ratio": lambda f: (f.bs["current_assets"] - f.bs["inventory"]) / f.bs["current_liabilities"],
    "long_term_debt_ratio": lambda f: f.bs["long_term_debt"] / f.bs["total_assets"],
    "roa": lambda f: f.inc["net_income"] / _avg(f.bs["total_assets"], f.bs_prev["total_assets"]),
    "inventory_turnover": lambda f: f.inc["cogs"] / _avg(f.bs["inventory"], f.bs_prev["inventory"]),
    "asset_turnover": lambda f: f.inc["revenue"] / _avg(f.bs["total_assets"], f.bs_prev["total_assets"]),
    "cash_ratio": lambda f: (f.bs["cash"] + f.bs["cash_equivalents"]) / f.bs["current_liabilities"],
    "gross_profit_growth": lambda f: f.inc["gross_profit"] / f.inc_prev["gross_profit"] - 1.0,
    "revenue_growth": lambda f: f.inc["revenue"] / f.inc_prev["revenue"] - 1.0,
    "re_ta": lambda f: f.bs["retained_earnings"] / f.bs["total_assets"],
    "pe_ttm": lambda f: f.price / (f.ttm_earnings() / f.shares),
    "pe_ttm_median": lambda f: float(np.median(f.daily_valuation_series("net_income"))),
    "ps_ttm": lambda f: f.price / (f.ttm_revenue() / f.shares),
    "ps_ttm_median": lambda f: float(np.median(f.daily_valuation_series("revenue"))),
    "beta_1y": lambda f: (lambda rs, rm: float(np.cov(rm, rs, bias=True)[0, 1] / np.var(rs)))(
        *f.beta_window_returns()
    ),
}


def relative_error(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))
