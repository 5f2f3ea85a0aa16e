"""Ingestion of the monthly sales benchmark files.

Two CSV files drive everything downstream: quantities sold per
(item, org) month and the matching unit prices. Records are validated
row by row, optionally rolled up from daily granularity, and assembled
into gap-free monthly series. A third, optional file lists holiday days
used as model features.

File formats (UTF-8, ``.`` decimal separator, ISO dates):

    target_ts.csv   header ``item,org,date,quantity``
    related_ts.csv  header ``item,org,date,unit_price``
    holidays.csv    header ``date,name``

Dates must fall on the first day of a month; mid-month dates are
rejected unless ``normalize_dates`` is requested, because silent
coercion would hide corrupt exports.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import IO, Iterable, NamedTuple, Sequence

import numpy as np

from .months import add_months, month_floor, month_range, months_between

TARGET_HEADER = ("item", "org", "date", "quantity")
RELATED_HEADER = ("item", "org", "date", "unit_price")
HOLIDAY_HEADER = ("date", "name")


class DataFormatError(ValueError):
    """An input file violates the documented record format."""


class SeriesKey(NamedTuple):
    """Identifies one sales signal; ordering is lexicographic on (item, org)."""

    item: str
    org: str

    def __str__(self) -> str:
        return f"{self.item}/{self.org}"


@dataclass(frozen=True)
class SalesRecord:
    item: str
    org: str
    date: date
    quantity: float


@dataclass(frozen=True)
class PriceRecord:
    item: str
    org: str
    date: date
    unit_price: float


@dataclass(frozen=True)
class HolidayCalendar:
    """Set of (day, name) holiday entries; may be empty."""

    entries: frozenset[tuple[date, str]] = frozenset()

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(sorted({name for _, name in self.entries}))

    def counts_in_month(self, month: date) -> dict[str, int]:
        """Number of configured days per holiday name inside ``month``."""
        counts: dict[str, int] = {}
        for day, name in self.entries:
            if day.year == month.year and day.month == month.month:
                counts[name] = counts.get(name, 0) + 1
        return counts


@dataclass(eq=False)
class MonthlySeries:
    """One item/org signal: contiguous monthly quantities and unit prices.

    ``quantities`` and ``prices`` are aligned float arrays of equal
    length >= 1; month ``i`` is ``start_month + i`` with no gaps.
    """

    key: SeriesKey
    start_month: date
    quantities: np.ndarray
    prices: np.ndarray

    def __post_init__(self) -> None:
        self.quantities = np.asarray(self.quantities, dtype=np.float64)
        self.prices = np.asarray(self.prices, dtype=np.float64)
        if len(self.quantities) != len(self.prices) or len(self.quantities) == 0:
            raise ValueError(f"{self.key}: quantities and prices must be equal-length and non-empty")
        if np.any(self.quantities < 0) or not np.all(np.isfinite(self.quantities)):
            raise ValueError(f"{self.key}: quantities must be finite and >= 0")
        if np.any(self.prices <= 0) or not np.all(np.isfinite(self.prices)):
            raise ValueError(f"{self.key}: prices must be finite and > 0")
        if self.start_month.day != 1:
            raise ValueError(f"{self.key}: start_month must be the first day of a month")

    def __len__(self) -> int:
        return len(self.quantities)

    @property
    def end_month(self) -> date:
        return add_months(self.start_month, len(self) - 1)

    def month_at(self, index: int) -> date:
        return add_months(self.start_month, index)

    def index_of(self, month: date) -> int:
        idx = months_between(month, self.start_month)
        if idx < 0 or idx >= len(self):
            raise KeyError(f"{month:%Y-%m} outside series {self.key}")
        return idx

    def truncated(self, n_months: int) -> "MonthlySeries":
        """First ``n_months`` months of the series."""
        if not 1 <= n_months <= len(self):
            raise ValueError(f"cannot truncate length-{len(self)} series to {n_months}")
        return MonthlySeries(self.key, self.start_month,
                             self.quantities[:n_months].copy(), self.prices[:n_months].copy())

    def tail(self, n_months: int) -> "MonthlySeries":
        """Last ``n_months`` months (whole series when shorter)."""
        if n_months >= len(self):
            return self
        cut = len(self) - n_months
        return MonthlySeries(self.key, add_months(self.start_month, cut),
                             self.quantities[cut:].copy(), self.prices[cut:].copy())

    def up_to(self, month: date) -> "MonthlySeries | None":
        """Series restricted to months <= ``month``; None if it starts later."""
        if self.start_month > month:
            return None
        if month >= self.end_month:
            return self
        return self.truncated(months_between(month, self.start_month) + 1)


@dataclass
class DatasetBundle:
    """All assembled series keyed by SeriesKey, in sorted key order."""

    series: dict[SeriesKey, MonthlySeries]
    holidays: HolidayCalendar = field(default_factory=HolidayCalendar)

    def __post_init__(self) -> None:
        self.series = {k: self.series[k] for k in sorted(self.series)}

    def keys(self) -> list[SeriesKey]:
        return list(self.series)

    def items(self) -> set[str]:
        return {k.item for k in self.series}

    def restrict(self, items: Iterable[str]) -> "DatasetBundle":
        wanted = set(items)
        kept = {k: s for k, s in self.series.items() if k.item in wanted}
        return DatasetBundle(kept, self.holidays)

    def with_holidays(self, holidays: HolidayCalendar) -> "DatasetBundle":
        return DatasetBundle(dict(self.series), holidays)

    def tail(self, n_months: int) -> "DatasetBundle":
        return DatasetBundle({k: s.tail(n_months) for k, s in self.series.items()}, self.holidays)


# ---------------------------------------------------------------------------
# parsing

def _text_reader(source: IO[bytes] | bytes) -> IO[str]:
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    return io.TextIOWrapper(source, encoding="utf-8", newline="")


def _check_header(row: Sequence[str] | None, expected: tuple[str, ...]) -> None:
    got = tuple(cell.strip() for cell in row) if row is not None else None
    if got != expected:
        raise DataFormatError(f"unexpected header {got!r}, expected {','.join(expected)!r}")


def _parse_iso_date(text: str, row_no: int) -> date:
    try:
        parsed = date.fromisoformat(text.strip())
    except ValueError:
        raise DataFormatError(f"row {row_no}: unparseable date {text!r}") from None
    return parsed


def _parse_month_cell(text: str, row_no: int, normalize_dates: bool) -> date:
    parsed = _parse_iso_date(text, row_no)
    if parsed.day != 1:
        if not normalize_dates:
            raise DataFormatError(f"row {row_no}: date {text.strip()!r} not first of month "
                                  "(pass normalize_dates to truncate)")
        parsed = month_floor(parsed)
    return parsed


def _parse_float(text: str, row_no: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataFormatError(f"row {row_no}: non-numeric {column} {text!r}") from None
    if not np.isfinite(value):
        raise DataFormatError(f"row {row_no}: non-finite {column} {text!r}")
    return value


def _iter_rows(reader, n_cols: int):
    # row numbers are 1-based and include the header line
    for row_no, row in enumerate(reader, start=2):
        if not row or all(cell.strip() == "" for cell in row):
            continue
        if len(row) != n_cols:
            raise DataFormatError(f"row {row_no}: expected {n_cols} columns, got {len(row)}")
        yield row_no, [cell.strip() for cell in row]


def parse_target_csv(source: IO[bytes] | bytes, *, normalize_dates: bool = False) -> list[SalesRecord]:
    """Parse the quantity file into one SalesRecord per data row."""
    reader = csv.reader(_text_reader(source))
    _check_header(next(reader, None), TARGET_HEADER)
    records = []
    for row_no, (item, org, day, qty) in _iter_rows(reader, 4):
        quantity = _parse_float(qty, row_no, "quantity")
        if quantity < 0:
            raise DataFormatError(f"row {row_no}: negative quantity {qty!r}")
        records.append(SalesRecord(item, org, _parse_month_cell(day, row_no, normalize_dates), quantity))
    return records


def parse_related_csv(source: IO[bytes] | bytes, *, normalize_dates: bool = False) -> list[PriceRecord]:
    """Parse the unit-price file into one PriceRecord per data row."""
    reader = csv.reader(_text_reader(source))
    _check_header(next(reader, None), RELATED_HEADER)
    records = []
    for row_no, (item, org, day, price) in _iter_rows(reader, 4):
        unit_price = _parse_float(price, row_no, "unit_price")
        if unit_price <= 0:
            raise DataFormatError(f"row {row_no}: non-positive unit_price {price!r}")
        records.append(PriceRecord(item, org, _parse_month_cell(day, row_no, normalize_dates), unit_price))
    return records


def load_holidays(source: IO[bytes] | bytes) -> HolidayCalendar:
    """Load the holiday day list; duplicate rows collapse to one entry."""
    reader = csv.reader(_text_reader(source))
    _check_header(next(reader, None), HOLIDAY_HEADER)
    entries = set()
    for row_no, (day, name) in _iter_rows(reader, 2):
        entries.add((_parse_iso_date(day, row_no), name))
    return HolidayCalendar(frozenset(entries))


# ---------------------------------------------------------------------------
# daily roll-up

def aggregate_daily_to_monthly(
    daily: Iterable[tuple[SeriesKey, date, float, float]],
) -> tuple[list[SalesRecord], list[PriceRecord]]:
    """Roll daily rows up to months.

    Monthly quantity is the plain sum. The monthly unit price is the
    quantity-weighted mean of the daily prices, which keeps total
    revenue (sum of quantity * price) exact. Months whose total
    quantity is zero emit a zero SalesRecord and no PriceRecord, since
    a weighted mean is undefined there.
    """
    totals: dict[tuple[SeriesKey, date], list[float]] = {}
    for key, day, quantity, unit_price in daily:
        if quantity < 0:
            raise ValueError(f"{key}: negative daily quantity on {day}")
        acc = totals.setdefault((SeriesKey(*key), month_floor(day)), [0.0, 0.0])
        acc[0] += quantity
        acc[1] += quantity * unit_price
    sales, prices = [], []
    for (key, month), (quantity, revenue) in sorted(totals.items()):
        sales.append(SalesRecord(key.item, key.org, month, quantity))
        if quantity > 0:
            prices.append(PriceRecord(key.item, key.org, month, revenue / quantity))
    return sales, prices


# ---------------------------------------------------------------------------
# assembly

def assemble_series(sales: Iterable[SalesRecord], prices: Iterable[PriceRecord]) -> DatasetBundle:
    """Build gap-free monthly series from parsed records.

    Every series spans its first to last sales month. Months without a
    sales row get quantity 0 (nothing sold means no row in the source
    system). Months without a price row reuse the last known price, or
    the next known one for a leading gap. A key whose price file has no
    rows at all cannot be priced and is an error.
    """
    sales_by_key: dict[SeriesKey, dict[date, float]] = {}
    for rec in sales:
        per_month = sales_by_key.setdefault(SeriesKey(rec.item, rec.org), {})
        if rec.date in per_month:
            raise DataFormatError(f"duplicate month {rec.date:%Y-%m} for {rec.item}/{rec.org} in target data")
        per_month[rec.date] = rec.quantity

    prices_by_key: dict[SeriesKey, dict[date, float]] = {}
    for rec in prices:
        per_month = prices_by_key.setdefault(SeriesKey(rec.item, rec.org), {})
        if rec.date in per_month:
            raise DataFormatError(f"duplicate month {rec.date:%Y-%m} for {rec.item}/{rec.org} in price data")
        per_month[rec.date] = rec.unit_price

    series: dict[SeriesKey, MonthlySeries] = {}
    for key in sorted(sales_by_key):
        quantities_by_month = sales_by_key[key]
        price_map = prices_by_key.get(key)
        if not price_map:
            raise DataFormatError(f"series {key} has sales but no price records")
        months = month_range(min(quantities_by_month), max(quantities_by_month))
        quantities = np.array([quantities_by_month.get(m, 0.0) for m in months])
        known = sorted(price_map)
        filled = np.empty(len(months))
        pos = 0  # index of the last known price month <= current month
        for i, m in enumerate(months):
            while pos + 1 < len(known) and known[pos + 1] <= m:
                pos += 1
            filled[i] = price_map[known[pos]] if known[pos] <= m else price_map[known[0]]
        series[key] = MonthlySeries(key, months[0], quantities, filled)
    return DatasetBundle(series)


# ---------------------------------------------------------------------------
# serialization

def _format_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def write_target_csv(records: Iterable[SalesRecord], dest: IO[str] | str | Path) -> None:
    _write_records(dest, TARGET_HEADER,
                   ((r.item, r.org, r.date.isoformat(), _format_number(r.quantity)) for r in records))


def write_related_csv(records: Iterable[PriceRecord], dest: IO[str] | str | Path) -> None:
    _write_records(dest, RELATED_HEADER,
                   ((r.item, r.org, r.date.isoformat(), repr(r.unit_price)) for r in records))


def write_holidays_csv(calendar: HolidayCalendar, dest: IO[str] | str | Path) -> None:
    _write_records(dest, HOLIDAY_HEADER,
                   ((d.isoformat(), name) for d, name in sorted(calendar.entries)))


def _write_records(dest: IO[str] | str | Path, header: tuple[str, ...], rows: Iterable[tuple]) -> None:
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="") as handle:
            _write_records(handle, header, rows)
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def load_dataset(
    target_path: str | Path,
    related_path: str | Path,
    holidays_path: str | Path | None = None,
    *,
    normalize_dates: bool = False,
    max_history_months: int | None = None,
) -> DatasetBundle:
    """Read, assemble, and (optionally) truncate the full dataset."""
    with open(target_path, "rb") as handle:
        sales = parse_target_csv(handle, normalize_dates=normalize_dates)
    with open(related_path, "rb") as handle:
        prices = parse_related_csv(handle, normalize_dates=normalize_dates)
    bundle = assemble_series(sales, prices)
    if holidays_path is not None:
        with open(holidays_path, "rb") as handle:
            bundle = bundle.with_holidays(load_holidays(handle))
    if max_history_months is not None:
        if max_history_months < 1:
            raise ValueError("max_history_months must be >= 1")
        bundle = bundle.tail(max_history_months)
    return bundle


__all__ = [
    "DataFormatError", "SeriesKey", "SalesRecord", "PriceRecord", "HolidayCalendar",
    "MonthlySeries", "DatasetBundle", "parse_target_csv", "parse_related_csv",
    "load_holidays", "aggregate_daily_to_monthly", "assemble_series",
    "write_target_csv", "write_related_csv", "write_holidays_csv", "load_dataset",
]
