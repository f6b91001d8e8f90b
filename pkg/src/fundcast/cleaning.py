"""Normalization of report text and mapping onto a unified chart of accounts.

Report layouts change across quarters and industries, so label-to-code
mapping lives in a data file of (format_version, source_label, canonical_code)
triples; supporting a new layout means adding rows, not code. Values carry
the figures for the standalone quarter.

"Missing" is a first-class outcome distinct from zero: an explicit dash
marker never becomes 0.0, it simply leaves the item absent. Rows that cannot
be interpreted at all are quarantined, never silently dropped or zeroed.
"""

from __future__ import annotations

import csv
import datetime
import math
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .dates import add_months, quarter_index
from .errors import (
    IdentityViolation,
    MandatoryItemMissing,
    MissingValue,
    MixedSymbols,
    UnknownFormatVersion,
    UnparseableNumber,
)
from .store import RawReport, StatementType

# --- canonical chart of accounts -------------------------------------------

INCOME_ITEMS = (
    "revenue",
    "cogs",
    "gross_profit",
    "operating_profit",
    "ebit",
    "interest_expense",
    "net_income",
)
BALANCE_ITEMS = (
    "cash",
    "cash_equivalents",
    "inventory",
    "current_assets",
    "fixed_assets",
    "other_assets",
    "total_assets",
    "current_liabilities",
    "long_term_debt",
    "total_debt",
    "total_equity",
    "retained_earnings",
    "shares_outstanding",
)
CASH_FLOW_ITEMS = ("operating_cash_flow",)

CHART_OF_ACCOUNTS = frozenset(INCOME_ITEMS + BALANCE_ITEMS + CASH_FLOW_ITEMS)

STATEMENT_ITEMS = {
    StatementType.INCOME_STATEMENT: frozenset(INCOME_ITEMS),
    StatementType.BALANCE_SHEET: frozenset(BALANCE_ITEMS),
    StatementType.CASH_FLOW: frozenset(CASH_FLOW_ITEMS),
}

MANDATORY_ITEMS = {
    StatementType.INCOME_STATEMENT: frozenset({"revenue", "net_income"}),
    StatementType.BALANCE_SHEET: frozenset({"total_assets", "total_equity"}),
    StatementType.CASH_FLOW: frozenset({"operating_cash_flow"}),
}

IDENTITY_RTOL = 1e-6

# --- numeric text normalization ---------------------------------------------

# Documented missing markers: hyphen-minus, double hyphen, en dash, em dash,
# minus sign, horizontal bar, tatweel (seen as a filler dash in Persian
# reports), and the common n/a spellings.
MISSING_MARKERS = frozenset({"-", "--", "–", "—", "−", "―", "ـ", "n/a", "N/A"})

_DIGIT_MAP = {}
for i, ch in enumerate("۰۱۲۳۴۵۶۷۸۹"):  # Persian digits
    _DIGIT_MAP[ord(ch)] = str(i)
for i, ch in enumerate("٠١٢٣٤٥٦٧٨٩"):  # Arabic-Indic digits
    _DIGIT_MAP[ord(ch)] = str(i)
_DIGIT_MAP[ord("٫")] = "."  # Arabic decimal separator

# Thousands separators stripped between digits: comma, Arabic comma,
# Arabic thousands separator, apostrophe, plain/no-break/narrow spaces.
_SEPARATORS = {ord(c): None for c in ",،٬'    "}

# Invisible directionality marks that ride along with RTL text.
_BIDI_MARKS = {ord(c): None for c in "‎‏؜​"}


def normalize_number(text: str) -> float:
    """Parse one numeric cell into a finite float.

    Handles thousands separators, Persian/Arabic digits, parenthesized
    negatives, and explicit minus signs. Raises MissingValue for the
    documented dash markers and UnparseableNumber for everything else;
    a missing value is never coerced to zero.
    """
    if not text:
        raise UnparseableNumber("empty cell")
    s = text.translate(_BIDI_MARKS).strip()
    if s in MISSING_MARKERS:
        raise MissingValue(text)
    s = s.translate(_DIGIT_MAP)
    negative = False
    if s.startswith("(") and s.endswith(")") and len(s) > 2:
        inner = s[1:-1].strip()
        if inner.startswith(("-", "−")):
            raise UnparseableNumber(text)  # signed value inside accounting parens
        s = inner
        negative = True
    s = s.translate(_SEPARATORS)
    s = s.replace("−", "-")
    if not s:
        raise UnparseableNumber(text)
    try:
        value = float(s)
    except ValueError as exc:
        raise UnparseableNumber(text) from exc
    if not math.isfinite(value):
        raise UnparseableNumber(text)
    return -value if negative else value


def render_number(value: float) -> str:
    """Canonical rendering; normalize_number(render_number(v)) == v."""
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


# --- label mapping -----------------------------------------------------------


def _canon_label(label: str) -> str:
    return unicodedata.normalize("NFC", label.translate(_BIDI_MARKS)).strip()


class MappingTable:
    """Label vocabulary per format version, loaded from triple files."""

    def __init__(self) -> None:
        self._by_version: dict[int, dict[str, str]] = {}

    @classmethod
    def load(cls, extra_files: list[Path | str] | None = None) -> "MappingTable":
        """Bundled table plus any user-supplied triple files."""
        table = cls()
        bundled = resources.files("fundcast.data") / "mappings.csv"
        with bundled.open(encoding="utf-8") as fh:
            table._read(fh)
        for path in extra_files or []:
            with open(path, encoding="utf-8", newline="") as fh:
                table._read(fh)
        return table

    def _read(self, fh) -> None:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["format_version", "source_label", "canonical_code"]:
            raise UnknownFormatVersion(f"bad mapping file header: {header}")
        for version_s, label, code in reader:
            if code not in CHART_OF_ACCOUNTS:
                raise UnknownFormatVersion(f"mapping targets unknown code {code!r}")
            self._by_version.setdefault(int(version_s), {})[_canon_label(label)] = code

    def versions(self) -> list[int]:
        return sorted(self._by_version)

    def for_version(self, format_version: int) -> dict[str, str]:
        try:
            return self._by_version[format_version]
        except KeyError:
            raise UnknownFormatVersion(str(format_version)) from None

    def labels_for(self, format_version: int) -> dict[str, str]:
        """canonical_code -> source_label, for rendering fixtures."""
        return {code: label for label, code in self.for_version(format_version).items()}


# --- clean reports -----------------------------------------------------------


@dataclass
class QuarantineRow:
    """One rejected input row, kept for the quarantine report."""

    symbol: str
    statement_type: str
    period_end: datetime.date
    table: str
    label: str
    value_text: str
    reason: str


@dataclass
class CleanReport:
    """One statement mapped onto the canonical chart of accounts."""

    symbol: str
    statement_type: StatementType
    period_end: datetime.date
    publish_date: datetime.date
    revision: int
    items: dict[str, float] = field(default_factory=dict)

    def get(self, code: str) -> float | None:
        return self.items.get(code)


def _check_identities(report: CleanReport) -> None:
    items = report.items

    def close(lhs: float, rhs: float) -> bool:
        return abs(lhs - rhs) <= IDENTITY_RTOL * max(1.0, abs(lhs), abs(rhs))

    if all(k in items for k in ("revenue", "cogs", "gross_profit")):
        if not close(items["gross_profit"], items["revenue"] - items["cogs"]):
            raise IdentityViolation(
                f"{report.symbol} {report.period_end}: gross_profit "
                f"{items['gross_profit']} != revenue - cogs "
                f"{items['revenue'] - items['cogs']}"
            )
    if all(k in items for k in ("current_assets", "fixed_assets", "total_assets")):
        parts = items["current_assets"] + items["fixed_assets"] + items.get("other_assets", 0.0)
        if not close(items["total_assets"], parts):
            raise IdentityViolation(
                f"{report.symbol} {report.period_end}: total_assets "
                f"{items['total_assets']} != sum of asset components {parts}"
            )


def map_to_unified(
    raw: RawReport, mapping: MappingTable
) -> tuple[CleanReport, list[QuarantineRow]]:
    """Map one raw report onto canonical codes.

    Returns the clean report plus quarantine rows for unmapped labels and
    unparseable values. Dash-marked rows become absent items (missing, not
    zero, not quarantined). Raises MandatoryItemMissing when a required
    item for the statement type did not survive, and IdentityViolation when
    derivable identities fail beyond tolerance.
    """
    a = raw.announcement
    labels = mapping.for_version(a.format_version)
    allowed = STATEMENT_ITEMS[a.statement_type]
    report = CleanReport(
        symbol=a.symbol,
        statement_type=a.statement_type,
        period_end=a.period_end,
        publish_date=a.publish_date,
        revision=a.revision,
    )
    quarantine: list[QuarantineRow] = []

    def reject(table: str, label: str, value: str, reason: str) -> None:
        quarantine.append(
            QuarantineRow(
                symbol=a.symbol,
                statement_type=a.statement_type.value,
                period_end=a.period_end,
                table=table,
                label=label,
                value_text=value,
                reason=reason,
            )
        )

    for table, rows in raw.tables.items():
        for label, value_text in rows:
            code = labels.get(_canon_label(label))
            if code is None:
                reject(table, label, value_text, "unmapped_label")
                continue
            if code not in allowed:
                reject(table, label, value_text, "wrong_statement")
                continue
            try:
                value = normalize_number(value_text)
            except MissingValue:
                continue  # explicitly missing: item stays absent
            except UnparseableNumber:
                reject(table, label, value_text, "unparseable_value")
                continue
            report.items[code] = value

    absent = MANDATORY_ITEMS[a.statement_type] - report.items.keys()
    if absent:
        raise MandatoryItemMissing(
            f"{a.symbol} {a.statement_type.value} {a.period_end}: missing {sorted(absent)}"
        )
    _check_identities(report)
    return report, quarantine


# --- quarterly merge ----------------------------------------------------------


@dataclass
class StatementSeries:
    """Chronological per-stock statement series with quarterly gap flags."""

    symbol: str
    reports: dict[StatementType, list[CleanReport]] = field(default_factory=dict)
    gaps: list[tuple[StatementType, int]] = field(default_factory=list)  # missing quarter indexes

    def of_type(self, statement_type: StatementType) -> list[CleanReport]:
        return self.reports.get(statement_type, [])

    def visible(
        self,
        statement_type: StatementType,
        as_of: datetime.date,
        lag_months: int = 0,
    ) -> list[CleanReport]:
        """Reports usable at as_of: publish_date shifted by the publication
        lag must not exceed as_of."""
        return [
            r
            for r in self.of_type(statement_type)
            if add_months(r.publish_date, lag_months) <= as_of
        ]


def merge_quarterlies(reports: list[CleanReport]) -> StatementSeries:
    """Merge per-quarter reports into an ordered series.

    Duplicate periods resolve latest-revision-wins; missing quarters are
    flagged, never interpolated.
    """
    if not reports:
        return StatementSeries(symbol="")
    symbols = {r.symbol for r in reports}
    if len(symbols) > 1:
        raise MixedSymbols(f"got reports for {sorted(symbols)}")
    series = StatementSeries(symbol=reports[0].symbol)
    by_type: dict[StatementType, dict[datetime.date, CleanReport]] = {}
    for r in sorted(reports, key=lambda r: (r.statement_type.value, r.period_end, r.revision)):
        by_type.setdefault(r.statement_type, {})[r.period_end] = r
    for st in sorted(by_type, key=lambda s: s.value):
        ordered = [by_type[st][pe] for pe in sorted(by_type[st])]
        series.reports[st] = ordered
        qs = [quarter_index(r.period_end) for r in ordered]
        for prev_q, next_q in zip(qs, qs[1:]):
            for missing in range(prev_q + 1, next_q):
                series.gaps.append((st, missing))
    return series


# --- quarantine report ---------------------------------------------------------


def write_quarantine_csv(path: Path | str, rows: list[QuarantineRow]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["symbol", "statement_type", "period_end", "table", "label", "value_text", "reason"]
        )
        for q in rows:
            w.writerow(
                [q.symbol, q.statement_type, q.period_end.isoformat(), q.table, q.label, q.value_text, q.reason]
            )
