"""Calendar arithmetic used across the pipeline.

All month offsets are calendar months with day-of-month clamping
(Jan 31 + 1 month = Feb 28/29). Quarters are calendar quarters.
"""

from __future__ import annotations

import calendar
import datetime

DATE_FMT = "%Y-%m-%d"


def add_months(d: datetime.date, months: int) -> datetime.date:
    """Shift a date by whole calendar months, clamping the day."""
    total = d.year * 12 + (d.month - 1) + months
    year, month = divmod(total, 12)
    month += 1
    day = min(d.day, calendar.monthrange(year, month)[1])
    return datetime.date(year, month, day)


def quarter_index(d: datetime.date) -> int:
    """Absolute quarter number; consecutive quarters differ by 1."""
    return d.year * 4 + (d.month - 1) // 3


def quarter_end(year: int, quarter: int) -> datetime.date:
    """Last calendar day of a quarter (quarter in 1..4)."""
    month = quarter * 3
    return datetime.date(year, month, calendar.monthrange(year, month)[1])


def parse_date(text: str) -> datetime.date:
    return datetime.datetime.strptime(text, DATE_FMT).date()


def format_date(d: datetime.date) -> str:
    return d.strftime(DATE_FMT)


def to_ordinal(d: datetime.date) -> int:
    return d.toordinal()


def from_ordinal(o: int) -> datetime.date:
    return datetime.date.fromordinal(int(o))
