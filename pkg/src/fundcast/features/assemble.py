"""Feature vector assembly: fixed column order, one-hot categoricals.

The column manifest is a pure function of the declared vocabularies, so two
runs over the same universe produce byte-identical layouts. Missing numeric
features ride through as NaN for the dataset builder to impute.
"""

from __future__ import annotations

import csv
import datetime
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..dates import format_date, parse_date
from ..errors import VocabularyViolation
from .macro import MacroFeatures
from .ratios import RATIO_NAMES, RatioSet
from .trading import TradingFeatures

ACTIVITY_TYPES = ("production", "other")

TRADING_NAMES = (
    "avg_price_volatility",
    "avg_daily_return",
    "avg_trades_value",
    "bs_power_ratio",
    "ownership_change",
)

MACRO_NAMES = (
    "gov_bond_return_1m",
    "usd_irr_rate",
    "usd_irr_return_1m",
    "equal_weight_index_return_1m",
    "market_index_value",
    "market_index_return_3m",
    "gold_usd_return_1m",
)


@dataclass(frozen=True)
class Vocabulary:
    """Declared categorical vocabularies; one-hot layout depends on these."""

    industries: tuple[str, ...]
    exchanges: tuple[str, ...]
    activities: tuple[str, ...] = ACTIVITY_TYPES

    def to_json(self) -> dict:
        return {
            "industries": list(self.industries),
            "exchanges": list(self.exchanges),
            "activities": list(self.activities),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Vocabulary":
        return cls(
            industries=tuple(obj["industries"]),
            exchanges=tuple(obj["exchanges"]),
            activities=tuple(obj["activities"]),
        )


@dataclass
class StockTypeFeatures:
    industry: str
    market_exchange: str
    activity_type: str


@dataclass
class FeatureRow:
    """One assembled sample; values align with feature_columns(vocab)."""

    symbol: str
    as_of: datetime.date
    values: np.ndarray  # float64; NaN marks missing


def feature_columns(vocab: Vocabulary) -> tuple[str, ...]:
    cols: list[str] = list(RATIO_NAMES)
    cols += [f"industry_{c}" for c in vocab.industries]
    cols += [f"exchange_{c}" for c in vocab.exchanges]
    cols += [f"activity_{c}" for c in vocab.activities]
    cols += list(TRADING_NAMES)
    cols += list(MACRO_NAMES)
    return tuple(cols)


def _one_hot(code: str, vocab: tuple[str, ...], kind: str) -> list[float]:
    if code not in vocab:
        raise VocabularyViolation(f"{kind} code {code!r} not in declared vocabulary {vocab}")
    return [1.0 if v == code else 0.0 for v in vocab]


def assemble_feature_vector(
    ratios: RatioSet,
    stock_type: StockTypeFeatures,
    trading: TradingFeatures,
    macro: MacroFeatures,
    vocab: Vocabulary,
    symbol: str,
    as_of: datetime.date,
) -> FeatureRow:
    """Concatenate the four feature groups into the fixed column order."""

    def num(v: float | None) -> float:
        return np.nan if v is None else float(v)

    values: list[float] = [num(ratios.as_dict()[n]) for n in RATIO_NAMES]
    values += _one_hot(stock_type.industry, vocab.industries, "industry")
    values += _one_hot(stock_type.market_exchange, vocab.exchanges, "exchange")
    values += _one_hot(stock_type.activity_type, vocab.activities, "activity")
    values += [num(trading.as_dict()[n]) for n in TRADING_NAMES]
    values += [num(macro.as_dict()[n]) for n in MACRO_NAMES]
    return FeatureRow(symbol=symbol, as_of=as_of, values=np.asarray(values, dtype=np.float64))


@dataclass
class FeatureTable:
    """All assembled rows plus the column manifest."""

    columns: tuple[str, ...]
    rows: list[FeatureRow]

    def matrix(self) -> np.ndarray:
        if not self.rows:
            return np.empty((0, len(self.columns)))
        return np.vstack([r.values for r in self.rows])

    def manifest_hash(self) -> str:
        payload = json.dumps(list(self.columns)).encode()
        return hashlib.sha256(payload).hexdigest()

    def write_csv(self, path: Path | str) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["symbol", "as_of"] + list(self.columns))
            for r in self.rows:
                cells = ["" if np.isnan(v) else repr(float(v)) for v in r.values]
                w.writerow([r.symbol, format_date(r.as_of)] + cells)

    @classmethod
    def read_csv(cls, path: Path | str) -> "FeatureTable":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            columns = tuple(header[2:])
            rows = []
            for rec in reader:
                vals = np.asarray(
                    [np.nan if c == "" else float(c) for c in rec[2:]], dtype=np.float64
                )
                rows.append(FeatureRow(symbol=rec[0], as_of=parse_date(rec[1]), values=vals))
        return cls(columns=columns, rows=rows)

    def write_manifest(self, path: Path | str, vocab: Vocabulary) -> None:
        payload = {
            "columns": list(self.columns),
            "column_hash": self.manifest_hash(),
            "vocabulary": vocab.to_json(),
            "n_rows": len(self.rows),
        }
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
