"""Trading-behavior features over the trailing calendar month.

Each feature is the arithmetic mean of a per-day quantity over days in
(as_of - 1 month, as_of]. Days after as_of never contribute.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass

import numpy as np

from ..dates import add_months
from ..errors import NoTradingDays
from ..marketdata import PriceHistory


@dataclass
class TradingFeatures:
    avg_price_volatility: float | None = None  # mean of daily high/low
    avg_daily_return: float | None = None
    avg_trades_value: float | None = None
    bs_power_ratio: float | None = None  # buyer power / seller power
    ownership_change: float | None = None  # net individual flow per day

    def as_dict(self) -> dict[str, float | None]:
        return {
            "avg_price_volatility": self.avg_price_volatility,
            "avg_daily_return": self.avg_daily_return,
            "avg_trades_value": self.avg_trades_value,
            "bs_power_ratio": self.bs_power_ratio,
            "ownership_change": self.ownership_change,
        }


def compute_trading_features(
    history: PriceHistory, as_of: datetime.date, months: int = 1
) -> TradingFeatures:
    """Trailing-month trading features; raises NoTradingDays on an empty window.

    Daily power = individual trade value / individual trade count per side;
    the B/S power ratio is buyer power over seller power, averaged across
    days where both sides traded. Ownership change is the signed net of
    individual buy minus sell value.
    """
    start = add_months(as_of, -months)
    sl = history.window(start, as_of)
    n = sl.stop - sl.start
    if n == 0:
        raise NoTradingDays(f"{history.symbol}: no bars in ({start}, {as_of}]")

    f = TradingFeatures()
    high = history.high[sl]
    low = history.low[sl]
    vol_ok = low > 0
    if vol_ok.any():
        f.avg_price_volatility = float(np.mean(high[vol_ok] / low[vol_ok]))

    # Daily return of day t uses the prior trading day's close, which may
    # fall before the window start.
    lo = sl.start
    if lo == 0:
        closes = history.adj_close[:sl.stop]
        rets = closes[1:] / closes[:-1] - 1.0
    else:
        closes = history.adj_close[lo - 1:sl.stop]
        rets = closes[1:] / closes[:-1] - 1.0
    if len(rets) >= 1:
        take = min(n, len(rets))
        f.avg_daily_return = float(np.mean(rets[-take:]))

    f.avg_trades_value = float(np.mean(history.value_traded[sl]))

    bv = history.ind_buy_value[sl]
    sv = history.ind_sell_value[sl]
    bc = history.ind_buy_count[sl]
    sc = history.ind_sell_count[sl]
    defined = (bc > 0) & (sc > 0) & (sv > 0)
    if defined.any():
        power = (bv[defined] / bc[defined]) / (sv[defined] / sc[defined])
        f.bs_power_ratio = float(np.mean(power))
    f.ownership_change = float(np.mean(bv - sv))
    return f
