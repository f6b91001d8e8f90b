"""Macroeconomic and market-level features at an as-of date.

Monthly returns divide the nearest-prior observation at as_of by the one at
as_of minus one calendar month; the market index return uses three months.
The government bond figure is the trailing-month average of the daily bond
return series.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass

import numpy as np

from ..dates import add_months
from ..errors import SeriesGapTooLarge
from ..marketdata import MacroBundle

MACRO_SERIES_NAMES = (
    "usd_irr",
    "gold_usd",
    "bond_daily_return",
    "market_index",
    "equal_weight_index",
)


@dataclass
class MacroFeatures:
    gov_bond_return_1m: float | None = None
    usd_irr_rate: float | None = None
    usd_irr_return_1m: float | None = None
    equal_weight_index_return_1m: float | None = None
    market_index_value: float | None = None
    market_index_return_3m: float | None = None
    gold_usd_return_1m: float | None = None

    def as_dict(self) -> dict[str, float | None]:
        return {
            "gov_bond_return_1m": self.gov_bond_return_1m,
            "usd_irr_rate": self.usd_irr_rate,
            "usd_irr_return_1m": self.usd_irr_return_1m,
            "equal_weight_index_return_1m": self.equal_weight_index_return_1m,
            "market_index_value": self.market_index_value,
            "market_index_return_3m": self.market_index_return_3m,
            "gold_usd_return_1m": self.gold_usd_return_1m,
        }


def compute_macro_features(
    macro: MacroBundle, as_of: datetime.date, staleness_days: int = 14
) -> MacroFeatures:
    """Macro features at as_of; raises SeriesGapTooLarge when a series has
    no observation within the staleness bound of a required lookup date."""

    def level(name: str, d: datetime.date) -> float:
        return macro[name].value_at(d, max_staleness_days=staleness_days)

    def monthly_return(name: str, months: int) -> float:
        now = level(name, as_of)
        then = level(name, add_months(as_of, -months))
        if then == 0:
            raise SeriesGapTooLarge(f"{name}: zero base value")
        return now / then - 1.0

    f = MacroFeatures()
    f.usd_irr_rate = level("usd_irr", as_of)
    f.usd_irr_return_1m = monthly_return("usd_irr", 1)
    f.gold_usd_return_1m = monthly_return("gold_usd", 1)
    f.equal_weight_index_return_1m = monthly_return("equal_weight_index", 1)
    f.market_index_value = level("market_index", as_of)
    f.market_index_return_3m = monthly_return("market_index", 3)

    bond = macro["bond_daily_return"]
    window = bond.window_values(add_months(as_of, -1), as_of)
    if len(window) == 0:
        raise SeriesGapTooLarge("bond_daily_return: empty trailing month")
    f.gov_bond_return_1m = float(np.mean(window))
    return f
