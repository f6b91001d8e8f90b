"""Labeled, leakage-free, scaled datasets per prediction horizon.

The label asks whether the stock's adjusted-price return over the horizon
strictly beats compounding the fixed-income yield quoted at as_of. The
chronological split sorts by as_of and never lets a boundary-date tie leak
into the test side. Scaling statistics come from training rows only.
"""

from __future__ import annotations

import csv
import datetime
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dates import add_months, format_date, parse_date
from .errors import AllMissingColumn, DomainError, EmptyInput, HorizonBeyondData
from .features.assemble import FeatureRow
from .marketdata import DatedSeries, PriceHistory

HORIZONS = (1, 2, 3, 4, 5, 6, 9, 12)


def fixed_income_growth(ytm: float) -> float:
    """Monthly growth factor of a bond yield: (1 + YTM) ** (1/12)."""
    if ytm <= -1.0:
        raise DomainError(f"ytm must exceed -1, got {ytm}")
    return (1.0 + ytm) ** (1.0 / 12.0)


def fixed_income_return(ytm: float, months: int) -> float:
    """Benchmark return over a horizon: factor ** months - 1."""
    return fixed_income_growth(ytm) ** months - 1.0


def apply_publication_lag(publish_date: datetime.date, lag_months: int = 1) -> datetime.date:
    """Earliest date a report may influence features: publish date shifted
    forward by the configured number of calendar months (day clamped)."""
    return add_months(publish_date, lag_months)


@dataclass
class LabeledExample:
    feature_row: FeatureRow
    symbol: str
    as_of: datetime.date
    horizon_months: int
    label: int
    realized_stock_return: float
    fi_benchmark_return: float


def label_example(
    history: PriceHistory,
    as_of: datetime.date,
    horizon_months: int,
    fi_curve: DatedSeries,
) -> tuple[float, float, int]:
    """Realized return vs. fixed-income benchmark for one example.

    Prices resolve to the nearest prior trading day; the YTM is the quote
    at as_of and stays locked over the horizon. Raises HorizonBeyondData
    when the price series ends before as_of + horizon.
    """
    target = add_months(as_of, horizon_months)
    if history.last_date() < target:
        raise HorizonBeyondData(f"{history.symbol}: history ends before {target}")
    p0 = history.adj_close_at(as_of)
    p1 = history.adj_close_at(target)
    if p0 is None or p0 <= 0 or p1 is None:
        raise HorizonBeyondData(f"{history.symbol}: no usable price at {as_of}")
    realized = p1 / p0 - 1.0
    ytm = fi_curve.value_at(as_of)
    benchmark = fixed_income_return(ytm, horizon_months)
    label = 1 if realized > benchmark else 0
    return realized, benchmark, label


@dataclass
class SkipReport:
    """Counts of feature rows excluded from a horizon's dataset."""

    horizon_months: int
    total: int = 0
    kept: int = 0
    beyond_data: int = 0
    no_history: int = 0


def build_labeled_rows(
    rows: list[FeatureRow],
    histories: dict[str, PriceHistory],
    fi_curve: DatedSeries,
    horizon_months: int,
) -> tuple[list[LabeledExample], SkipReport]:
    skip = SkipReport(horizon_months=horizon_months)
    out: list[LabeledExample] = []
    for row in rows:
        skip.total += 1
        history = histories.get(row.symbol)
        if history is None:
            skip.no_history += 1
            continue
        try:
            realized, benchmark, label = label_example(history, row.as_of, horizon_months, fi_curve)
        except HorizonBeyondData:
            skip.beyond_data += 1
            continue
        out.append(
            LabeledExample(
                feature_row=row,
                symbol=row.symbol,
                as_of=row.as_of,
                horizon_months=horizon_months,
                label=label,
                realized_stock_return=realized,
                fi_benchmark_return=benchmark,
            )
        )
        skip.kept += 1
    return out, skip


def chronological_split(
    rows: list[LabeledExample], train_fraction: float = 0.75
) -> tuple[list[LabeledExample], list[LabeledExample], datetime.date, bool]:
    """Stable date-ordered split: first ceil(f*n) rows train, ties on the
    boundary date all join the training side.

    Returns (train, test, boundary_date, tie_warning) where tie_warning is
    set when the tie rule emptied the test side.
    """
    if not rows:
        raise EmptyInput("no labeled rows to split")
    ordered = sorted(rows, key=lambda r: r.as_of)  # stable
    n = len(ordered)
    k = math.ceil(train_fraction * n)
    boundary = ordered[k - 1].as_of
    while k < n and ordered[k].as_of == boundary:
        k += 1
    train, test = ordered[:k], ordered[k:]
    return train, test, boundary, len(test) == 0


@dataclass
class ScalerParams:
    """Train-only standardization: median imputation then z-scoring.

    Columns that are entirely missing or constant on the training side are
    dropped and recorded; kept columns transform to exact zero mean and
    unit (population) standard deviation on the training data.
    """

    columns: tuple[str, ...]
    kept: tuple[int, ...]
    mean: np.ndarray
    std: np.ndarray
    median: np.ndarray
    dropped: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "columns": list(self.columns),
            "kept_indices": list(self.kept),
            "mean": [repr(float(v)) for v in self.mean],
            "std": [repr(float(v)) for v in self.std],
            "median": [repr(float(v)) for v in self.median],
            "dropped": self.dropped,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ScalerParams":
        return cls(
            columns=tuple(obj["columns"]),
            kept=tuple(obj["kept_indices"]),
            mean=np.asarray([float(v) for v in obj["mean"]]),
            std=np.asarray([float(v) for v in obj["std"]]),
            median=np.asarray([float(v) for v in obj["median"]]),
            dropped=list(obj["dropped"]),
        )

    def kept_columns(self) -> tuple[str, ...]:
        return tuple(self.columns[i] for i in self.kept)


def fit_scaler(X: np.ndarray, columns: tuple[str, ...]) -> ScalerParams:
    """Fit imputation medians and population moments on training rows only."""
    if X.shape[0] == 0:
        raise EmptyInput("cannot fit a scaler on zero rows")
    n_cols = X.shape[1]
    kept: list[int] = []
    dropped: list[dict] = []
    medians = np.zeros(n_cols)
    means = []
    stds = []
    for j in range(n_cols):
        col = X[:, j]
        present = ~np.isnan(col)
        if not present.any():
            dropped.append({"column": columns[j], "reason": "all_missing"})
            continue
        med = float(np.median(col[present]))
        medians[j] = med
        filled = np.where(present, col, med)
        mean = float(filled.mean())
        std = float(filled.std())  # population (1/n)
        if std == 0.0:
            dropped.append({"column": columns[j], "reason": "constant"})
            continue
        kept.append(j)
        means.append(mean)
        stds.append(std)
    if not kept:
        raise AllMissingColumn("every column dropped while fitting the scaler")
    return ScalerParams(
        columns=columns,
        kept=tuple(kept),
        mean=np.asarray(means),
        std=np.asarray(stds),
        median=np.asarray([medians[j] for j in kept]),
        dropped=dropped,
    )


def transform(X: np.ndarray, params: ScalerParams) -> np.ndarray:
    """Impute with train medians, z-score with train moments, keep columns."""
    sub = X[:, list(params.kept)]
    filled = np.where(np.isnan(sub), params.median, sub)
    return (filled - params.mean) / params.std


# --- dataset files -----------------------------------------------------------

DATASET_META = ("symbol", "as_of", "horizon", "label", "realized_return", "benchmark_return")


def write_dataset_csv(path: Path | str, examples: list[LabeledExample], Z: np.ndarray, columns: tuple[str, ...]) -> None:
    assert Z.shape[0] == len(examples)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(DATASET_META) + list(columns))
        for ex, z in zip(examples, Z):
            w.writerow(
                [
                    ex.symbol,
                    format_date(ex.as_of),
                    ex.horizon_months,
                    ex.label,
                    repr(float(ex.realized_stock_return)),
                    repr(float(ex.fi_benchmark_return)),
                ]
                + [repr(float(v)) for v in z]
            )


@dataclass
class LoadedDataset:
    columns: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    symbols: list[str]
    as_of: list[datetime.date]


def read_dataset_csv(path: Path | str) -> LoadedDataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        columns = tuple(header[len(DATASET_META):])
        X_rows, y, symbols, dates = [], [], [], []
        for rec in reader:
            symbols.append(rec[0])
            dates.append(parse_date(rec[1]))
            y.append(int(rec[3]))
            X_rows.append([float(v) for v in rec[len(DATASET_META):]])
    X = np.asarray(X_rows, dtype=np.float64) if X_rows else np.empty((0, len(columns)))
    return LoadedDataset(columns=columns, X=X, y=np.asarray(y, dtype=np.float64), symbols=symbols, as_of=dates)


def write_dataset_manifest(
    path: Path | str,
    horizon: int,
    params: ScalerParams,
    boundary: datetime.date,
    skip: SkipReport,
    n_train: int,
    n_test: int,
    tie_warning: bool,
) -> None:
    payload = {
        "horizon_months": horizon,
        "column_order": list(params.kept_columns()),
        "dropped_columns": params.dropped,
        "imputation_medians": {
            c: repr(float(m)) for c, m in zip(params.kept_columns(), params.median)
        },
        "split_boundary_date": format_date(boundary),
        "n_train": n_train,
        "n_test": n_test,
        "tie_warning_empty_test": tie_warning,
        "skip_report": {
            "total_rows": skip.total,
            "kept": skip.kept,
            "horizon_beyond_data": skip.beyond_data,
            "no_price_history": skip.no_history,
        },
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
