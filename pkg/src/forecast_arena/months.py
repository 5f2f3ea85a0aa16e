"""Calendar-month arithmetic on plain ``datetime.date`` values.

A month is represented as the date of its first day. All helpers reject
nothing and assume day-1 dates; validation happens at parse time.
"""

from __future__ import annotations

from datetime import date


def month_floor(d: date) -> date:
    """First day of the month containing ``d``."""
    return d.replace(day=1)


def add_months(month: date, n: int) -> date:
    """Month ``n`` steps after (or before, if negative) ``month``."""
    idx = month.year * 12 + (month.month - 1) + n
    return date(idx // 12, idx % 12 + 1, 1)


def months_between(later: date, earlier: date) -> int:
    """Signed number of month steps from ``earlier`` to ``later``."""
    return (later.year - earlier.year) * 12 + (later.month - earlier.month)


def month_range(start: date, end: date) -> list[date]:
    """All months from ``start`` to ``end`` inclusive."""
    return [add_months(start, i) for i in range(months_between(end, start) + 1)]


def parse_month(text: str) -> date:
    """Parse ``YYYY-MM`` (or ``YYYY-MM-DD``, truncated) into a month."""
    parts = text.strip().split("-")
    if len(parts) not in (2, 3):
        raise ValueError(f"not a calendar month: {text!r}")
    return date(int(parts[0]), int(parts[1]), 1)


def format_month(month: date) -> str:
    return f"{month.year:04d}-{month.month:02d}"
