"""Daily market data containers and delimited-text loaders.

Dates are stored as proleptic-Gregorian ordinals in sorted numpy arrays so
point-in-time lookups are binary searches. Floats round-trip through text
via repr, so artifacts re-read bit-identically.
"""

from __future__ import annotations

import csv
import datetime
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dates import format_date, from_ordinal, parse_date, to_ordinal
from .errors import SeriesGapTooLarge

PRICE_COLUMNS = (
    "close",
    "adj_close",
    "high",
    "low",
    "value_traded",
    "ind_buy_value",
    "ind_sell_value",
    "ind_buy_count",
    "ind_sell_count",
)


@dataclass
class PriceHistory:
    """Per-symbol daily bars, sorted by date."""

    symbol: str
    dates: np.ndarray  # int64 ordinals, strictly increasing
    close: np.ndarray
    adj_close: np.ndarray
    high: np.ndarray
    low: np.ndarray
    value_traded: np.ndarray
    ind_buy_value: np.ndarray
    ind_sell_value: np.ndarray
    ind_buy_count: np.ndarray
    ind_sell_count: np.ndarray

    def __len__(self) -> int:
        return len(self.dates)

    def idx_at_or_before(self, d: datetime.date) -> int:
        """Index of the last bar dated <= d, or -1 if none."""
        return int(np.searchsorted(self.dates, to_ordinal(d), side="right")) - 1

    def adj_close_at(self, d: datetime.date) -> float | None:
        i = self.idx_at_or_before(d)
        return float(self.adj_close[i]) if i >= 0 else None

    def last_date(self) -> datetime.date:
        return from_ordinal(self.dates[-1])

    def window(self, start: datetime.date, end: datetime.date) -> slice:
        """Bars with start < date <= end."""
        lo = int(np.searchsorted(self.dates, to_ordinal(start), side="right"))
        hi = int(np.searchsorted(self.dates, to_ordinal(end), side="right"))
        return slice(lo, hi)

    def daily_returns(self) -> tuple[np.ndarray, np.ndarray]:
        """(dates[1:], adj_close[t]/adj_close[t-1] - 1)."""
        r = self.adj_close[1:] / self.adj_close[:-1] - 1.0
        return self.dates[1:], r


@dataclass
class DatedSeries:
    """A single observed time series with nearest-prior lookup."""

    name: str
    dates: np.ndarray  # int64 ordinals, strictly increasing
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.dates)

    def idx_at_or_before(self, d: datetime.date) -> int:
        return int(np.searchsorted(self.dates, to_ordinal(d), side="right")) - 1

    def value_at(self, d: datetime.date, max_staleness_days: int | None = None) -> float:
        """Nearest-prior observation; staleness bound optional."""
        i = self.idx_at_or_before(d)
        if i < 0:
            raise SeriesGapTooLarge(f"{self.name}: no observation at or before {d}")
        if max_staleness_days is not None and to_ordinal(d) - int(self.dates[i]) > max_staleness_days:
            raise SeriesGapTooLarge(
                f"{self.name}: last observation {from_ordinal(self.dates[i])} is older "
                f"than {max_staleness_days} days at {d}"
            )
        return float(self.values[i])

    def window_values(self, start: datetime.date, end: datetime.date) -> np.ndarray:
        """Values with start < date <= end."""
        lo = int(np.searchsorted(self.dates, to_ordinal(start), side="right"))
        hi = int(np.searchsorted(self.dates, to_ordinal(end), side="right"))
        return self.values[lo:hi]

    def returns(self) -> "DatedSeries":
        return DatedSeries(
            name=f"{self.name}_return",
            dates=self.dates[1:],
            values=self.values[1:] / self.values[:-1] - 1.0,
        )


@dataclass
class UniverseEntry:
    """Static listing metadata for one symbol."""

    symbol: str
    industry: str
    market_exchange: str
    activity_type: str
    shares_outstanding: float


@dataclass
class MacroBundle:
    """The market-level series consumed by macro features and the backtester."""

    series: dict[str, DatedSeries] = field(default_factory=dict)

    def __getitem__(self, name: str) -> DatedSeries:
        return self.series[name]

    def __contains__(self, name: str) -> bool:
        return name in self.series


def _fmt(x: float) -> str:
    return repr(float(x))


def write_prices_csv(path: Path, histories: dict[str, PriceHistory]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("symbol", "date") + PRICE_COLUMNS)
        for symbol in sorted(histories):
            h = histories[symbol]
            for i in range(len(h)):
                w.writerow(
                    [symbol, format_date(from_ordinal(h.dates[i]))]
                    + [_fmt(getattr(h, c)[i]) for c in PRICE_COLUMNS]
                )


def read_prices_csv(path: Path) -> dict[str, PriceHistory]:
    buf: dict[str, list[list[float]]] = {}
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        assert header[:2] == ["symbol", "date"], f"unexpected price header: {header[:2]}"
        cols = header[2:]
        for row in r:
            rec = [float(to_ordinal(parse_date(row[1])))] + [float(v) for v in row[2:]]
            buf.setdefault(row[0], []).append(rec)
    out: dict[str, PriceHistory] = {}
    for symbol, rows in buf.items():
        arr = np.asarray(rows, dtype=np.float64)
        order = np.argsort(arr[:, 0], kind="stable")
        arr = arr[order]
        kwargs = {c: np.ascontiguousarray(arr[:, 1 + j]) for j, c in enumerate(cols)}
        out[symbol] = PriceHistory(symbol=symbol, dates=arr[:, 0].astype(np.int64), **kwargs)
    return out


def write_series_csv(path: Path, series: dict[str, DatedSeries]) -> None:
    """Wide layout: date column plus one column per series; blanks for gaps."""
    names = sorted(series)
    all_dates = sorted({int(d) for s in series.values() for d in s.dates})
    lookup = {
        n: dict(zip(series[n].dates.tolist(), series[n].values.tolist())) for n in names
    }
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["date"] + names)
        for d in all_dates:
            row = [format_date(from_ordinal(d))]
            for n in names:
                v = lookup[n].get(d)
                row.append("" if v is None else _fmt(v))
            w.writerow(row)


def read_series_csv(path: Path) -> MacroBundle:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        names = header[1:]
        cols: dict[str, tuple[list[int], list[float]]] = {n: ([], []) for n in names}
        for row in r:
            d = to_ordinal(parse_date(row[0]))
            for n, cell in zip(names, row[1:]):
                if cell != "":
                    cols[n][0].append(d)
                    cols[n][1].append(float(cell))
    bundle = MacroBundle()
    for n, (ds, vs) in cols.items():
        bundle.series[n] = DatedSeries(
            name=n,
            dates=np.asarray(ds, dtype=np.int64),
            values=np.asarray(vs, dtype=np.float64),
        )
    return bundle


def write_single_series_csv(path: Path, series: DatedSeries, value_header: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["date", value_header])
        for d, v in zip(series.dates.tolist(), series.values.tolist()):
            w.writerow([format_date(from_ordinal(d)), _fmt(v)])


def read_single_series_csv(path: Path, name: str) -> DatedSeries:
    ds: list[int] = []
    vs: list[float] = []
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        next(r)
        for row in r:
            ds.append(to_ordinal(parse_date(row[0])))
            vs.append(float(row[1]))
    return DatedSeries(name=name, dates=np.asarray(ds, dtype=np.int64), values=np.asarray(vs, dtype=np.float64))


def write_universe_csv(path: Path, entries: list[UniverseEntry]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["symbol", "industry", "market_exchange", "activity_type", "shares_outstanding"])
        for e in sorted(entries, key=lambda e: e.symbol):
            w.writerow([e.symbol, e.industry, e.market_exchange, e.activity_type, _fmt(e.shares_outstanding)])


def read_universe_csv(path: Path) -> dict[str, UniverseEntry]:
    out: dict[str, UniverseEntry] = {}
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        next(r)
        for row in r:
            out[row[0]] = UniverseEntry(
                symbol=row[0],
                industry=row[1],
                market_exchange=row[2],
                activity_type=row[3],
                shares_outstanding=float(row[4]),
            )
    return out
