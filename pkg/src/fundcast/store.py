"""File-backed document store for raw quarterly report announcements.

Replaces a crawler + SQL layer with deterministic ingestion of line-delimited
JSON fixture records. Documents are keyed by
(symbol, statement_type, period_end, revision); ingestion is idempotent and
consumers default to the highest revision per period.

Concurrency: single writer, any number of readers. Writes go through a
temp-file rename so a reader never observes a partial document.
"""

from __future__ import annotations

import datetime
import json
import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterator

from .dates import format_date, parse_date
from .errors import DuplicateRevision, MalformedMetadata, UnknownSymbol


class StatementType(str, Enum):
    BALANCE_SHEET = "balance_sheet"
    INCOME_STATEMENT = "income_statement"
    CASH_FLOW = "cash_flow"


@dataclass(frozen=True)
class Announcement:
    """Metadata for one published report document."""

    announcement_id: str
    symbol: str
    statement_type: StatementType
    period_end: datetime.date
    publish_date: datetime.date
    format_version: int
    revision: int

    def validate(self) -> None:
        if not self.announcement_id or not self.symbol:
            raise MalformedMetadata("announcement_id and symbol are required")
        if not isinstance(self.statement_type, StatementType):
            raise MalformedMetadata(f"bad statement_type: {self.statement_type!r}")
        if self.publish_date < self.period_end:
            raise MalformedMetadata(
                f"{self.announcement_id}: publish_date {self.publish_date} "
                f"precedes period_end {self.period_end}"
            )
        if self.revision < 0:
            raise MalformedMetadata(f"{self.announcement_id}: negative revision")
        if self.format_version < 1:
            raise MalformedMetadata(f"{self.announcement_id}: format_version must be >= 1")


# body: table name -> [(label_text, value_text), ...]
Body = dict[str, list[tuple[str, str]]]


@dataclass
class RawReport:
    """One report document: announcement metadata plus labeled text rows."""

    announcement: Announcement
    tables: Body = field(default_factory=dict)

    def validate(self) -> None:
        self.announcement.validate()
        if not self.tables or not any(self.tables.values()):
            raise MalformedMetadata(f"{self.announcement.announcement_id}: empty body")
        for table, rows in self.tables.items():
            for label, _value in rows:
                if not label:
                    raise MalformedMetadata(
                        f"{self.announcement.announcement_id}: unlabeled row in table {table!r}"
                    )

    def to_record(self) -> dict:
        a = self.announcement
        return {
            "announcement_id": a.announcement_id,
            "symbol": a.symbol,
            "statement_type": a.statement_type.value,
            "period_end": format_date(a.period_end),
            "publish_date": format_date(a.publish_date),
            "format_version": a.format_version,
            "revision": a.revision,
            "tables": {t: [[l, v] for l, v in rows] for t, rows in self.tables.items()},
        }

    @classmethod
    def from_record(cls, rec: dict) -> "RawReport":
        try:
            ann = Announcement(
                announcement_id=str(rec["announcement_id"]),
                symbol=str(rec["symbol"]),
                statement_type=StatementType(rec["statement_type"]),
                period_end=parse_date(rec["period_end"]),
                publish_date=parse_date(rec["publish_date"]),
                format_version=int(rec["format_version"]),
                revision=int(rec["revision"]),
            )
            tables = {
                str(t): [(str(l), str(v)) for l, v in rows]
                for t, rows in rec["tables"].items()
            }
        except (KeyError, ValueError, TypeError) as exc:
            raise MalformedMetadata(f"bad fixture record: {exc}") from exc
        report = cls(announcement=ann, tables=tables)
        report.validate()
        return report


class ReportStore:
    """Embedded document store rooted at a directory."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        (self.root / "documents").mkdir(parents=True, exist_ok=True)

    def _doc_path(self, symbol: str, statement_type: StatementType, period_end: datetime.date, revision: int) -> Path:
        return (
            self.root
            / "documents"
            / symbol
            / statement_type.value
            / f"{format_date(period_end)}__r{revision}.json"
        )

    def ingest_announcement(self, report: RawReport) -> str:
        """Store one document. Idempotent on an identical key + body."""
        report.validate()
        a = report.announcement
        path = self._doc_path(a.symbol, a.statement_type, a.period_end, a.revision)
        record = report.to_record()
        payload = json.dumps(record, ensure_ascii=False, sort_keys=True)
        if path.exists():
            existing = path.read_text(encoding="utf-8")
            if existing == payload:
                return json.loads(existing)["announcement_id"]
            raise DuplicateRevision(
                f"{a.symbol} {a.statement_type.value} {a.period_end} r{a.revision}: "
                "stored body differs from the new document"
            )
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(payload, encoding="utf-8")
        os.replace(tmp, path)
        return a.announcement_id

    def fetch_reports(
        self,
        symbol: str,
        statement_type: StatementType,
        period_range: tuple[datetime.date | None, datetime.date | None] = (None, None),
        all_revisions: bool = False,
    ) -> list[RawReport]:
        """Documents sorted by (period_end, revision); latest revision per
        period unless all_revisions is set. Range bounds are inclusive."""
        sym_dir = self.root / "documents" / symbol
        if not sym_dir.is_dir():
            raise UnknownSymbol(symbol)
        type_dir = sym_dir / statement_type.value
        if not type_dir.is_dir():
            return []
        lo, hi = period_range
        reports = []
        for path in sorted(type_dir.glob("*.json")):
            rec = json.loads(path.read_text(encoding="utf-8"))
            report = RawReport.from_record(rec)
            pe = report.announcement.period_end
            if (lo is not None and pe < lo) or (hi is not None and pe > hi):
                continue
            reports.append(report)
        reports.sort(key=lambda r: (r.announcement.period_end, r.announcement.revision))
        if all_revisions:
            return reports
        latest: dict[datetime.date, RawReport] = {}
        for r in reports:
            latest[r.announcement.period_end] = r  # sorted, so last wins
        return [latest[pe] for pe in sorted(latest)]

    def symbols(self) -> list[str]:
        doc_root = self.root / "documents"
        return sorted(p.name for p in doc_root.iterdir() if p.is_dir())

    def ingest_fixture_file(self, path: Path | str) -> int:
        """Ingest a line-delimited fixture file; returns document count."""
        n = 0
        for report in iter_fixture_records(path):
            self.ingest_announcement(report)
            n += 1
        return n


def iter_fixture_records(path: Path | str) -> Iterator[RawReport]:
    """Parse the line-delimited report fixture format.

    One JSON object per line; schema shipped at data/report_record.schema.json.
    """
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedMetadata(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            yield RawReport.from_record(rec)


def write_fixture_file(path: Path | str, reports: list[RawReport]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for report in reports:
            fh.write(json.dumps(report.to_record(), ensure_ascii=False, sort_keys=True))
            fh.write("\n")
