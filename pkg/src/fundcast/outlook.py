"""Market-level direction forecast: cap-weighted mean of per-stock
probabilities.

p_market = sum(P(s_i) * cap_i) / sum(cap_i) over stocks carrying a
prediction at as_of. Stocks without a prediction are excluded and counted
in the coverage metric; if covered cap falls below half of the universe cap
the forecast is flagged low-confidence but still emitted.
"""

from __future__ import annotations

import csv
import datetime
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .dates import format_date, parse_date
from .errors import EmptyUniverse, NonPositiveCap


@dataclass(frozen=True)
class Prediction:
    symbol: str
    as_of: datetime.date
    horizon_months: int
    probability: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.probability) and 0.0 <= self.probability <= 1.0):
            raise ValueError(f"probability out of range: {self.probability}")


@dataclass
class MarketForecast:
    as_of: datetime.date
    horizon_months: int
    p_market: float
    n_stocks: int
    total_market_cap: float
    covered_market_cap: float
    coverage: float
    low_confidence: bool


LOW_CONFIDENCE_COVERAGE = 0.5


def market_probability(
    probabilities: Sequence[float | None],
    caps: Sequence[float],
    as_of: datetime.date,
    horizon_months: int,
) -> MarketForecast:
    """Exact cap-weighted mean with compensated summation.

    probabilities and caps are aligned per stock; None marks a stock with
    no prediction at as_of (excluded, counted against coverage).
    """
    if len(probabilities) != len(caps):
        raise ValueError("probabilities and caps must be aligned")
    if not caps:
        raise EmptyUniverse(f"no stocks in the universe at {as_of}")
    for c in caps:
        if not (math.isfinite(c) and c > 0):
            raise NonPositiveCap(f"market cap {c} at {as_of}")
    covered_terms = [(p, c) for p, c in zip(probabilities, caps) if p is not None]
    if not covered_terms:
        raise EmptyUniverse(f"no stock carries a prediction at {as_of}")
    weighted = math.fsum(p * c for p, c in covered_terms)
    covered_cap = math.fsum(c for _p, c in covered_terms)
    total_cap = math.fsum(caps)
    coverage = covered_cap / total_cap
    return MarketForecast(
        as_of=as_of,
        horizon_months=horizon_months,
        p_market=weighted / covered_cap,
        n_stocks=len(covered_terms),
        total_market_cap=total_cap,
        covered_market_cap=covered_cap,
        coverage=coverage,
        low_confidence=coverage < LOW_CONFIDENCE_COVERAGE,
    )


FORECAST_HEADER = (
    "as_of",
    "horizon_months",
    "p_market",
    "n_stocks",
    "total_market_cap",
    "covered_market_cap",
    "coverage",
    "low_confidence",
    "market_index_value",
)


def write_forecast_csv(
    path: Path | str, forecasts: list[MarketForecast], index_values: list[float | None]
) -> None:
    """Dated series for the plotting pipeline; index level rides along."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(FORECAST_HEADER)
        for f, idx in zip(forecasts, index_values):
            w.writerow(
                [
                    format_date(f.as_of),
                    f.horizon_months,
                    repr(float(f.p_market)),
                    f.n_stocks,
                    repr(float(f.total_market_cap)),
                    repr(float(f.covered_market_cap)),
                    repr(float(f.coverage)),
                    int(f.low_confidence),
                    "" if idx is None else repr(float(idx)),
                ]
            )


def read_forecast_csv(path: Path | str) -> list[MarketForecast]:
    out = []
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        next(r)
        for row in r:
            out.append(
                MarketForecast(
                    as_of=parse_date(row[0]),
                    horizon_months=int(row[1]),
                    p_market=float(row[2]),
                    n_stocks=int(row[3]),
                    total_market_cap=float(row[4]),
                    covered_market_cap=float(row[5]),
                    coverage=float(row[6]),
                    low_confidence=bool(int(row[7])),
                )
            )
    return out
