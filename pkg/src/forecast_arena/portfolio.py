"""Item importance ranking and series classification.

Importance is total financial turnover: quantity times unit price,
summed over an item's whole history and all of its organizations.
Results downstream are still reported per (item, org); the ranking only
decides which items make the analysis portfolio and how report rows
are ordered.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Literal, Sequence

from .dataset import DatasetBundle, MonthlySeries

LONG_HISTORY_MONTHS = 24
DEFAULT_ACTIVITY_WINDOW = 3
DEFAULT_TOP_N = 50


@dataclass(frozen=True)
class ImportanceEntry:
    item: str
    revenue: float
    rank: int  # 1 = highest revenue


@dataclass(frozen=True)
class SeriesClass:
    history: Literal["long", "short"]
    activity: Literal["active", "inactive"]
    history_months: int


def importance_table(bundle: DatasetBundle, *, window: int | None = None) -> list[ImportanceEntry]:
    """Rank items by revenue, descending; ties break on ascending item id.

    ``window`` restricts the revenue sum to each series' final N months;
    by default the whole history counts.
    """
    if not bundle.series:
        raise ValueError("empty bundle")
    revenue: dict[str, float] = {}
    for key, series in bundle.series.items():
        scope = series if window is None else series.tail(window)
        revenue[key.item] = revenue.get(key.item, 0.0) + float(scope.quantities @ scope.prices)
    ordered = sorted(revenue.items(), key=lambda kv: (-kv[1], kv[0]))
    return [ImportanceEntry(item, rev, rank) for rank, (item, rev) in enumerate(ordered, start=1)]


def classify_series(series: MonthlySeries, activity_window: int = DEFAULT_ACTIVITY_WINDOW) -> SeriesClass:
    """History is long at >= 24 months; active means any sale in the last window."""
    if activity_window < 1:
        raise ValueError("activity_window must be >= 1")
    n = len(series)
    history = "long" if n >= LONG_HISTORY_MONTHS else "short"
    active = bool((series.quantities[-activity_window:] > 0).any())
    return SeriesClass(history, "active" if active else "inactive", n)


def select_portfolio(bundle: DatasetBundle, table: Sequence[ImportanceEntry],
                     top_n: int = DEFAULT_TOP_N) -> DatasetBundle:
    """Restrict the bundle to series of the ``top_n`` highest-revenue items."""
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    items = {entry.item for entry in table}
    if top_n > len(items):
        raise ValueError(f"top_n={top_n} exceeds item count {len(items)}")
    return bundle.restrict(entry.item for entry in table if entry.rank <= top_n)


def write_importance_csv(table: Iterable[ImportanceEntry], dest: IO[str] | str | Path) -> None:
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="") as handle:
            write_importance_csv(table, handle)
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(("item", "revenue", "rank"))
    for entry in table:
        writer.writerow((entry.item, repr(entry.revenue), entry.rank))


__all__ = [
    "ImportanceEntry", "SeriesClass", "importance_table", "classify_series",
    "select_portfolio", "write_importance_csv",
    "LONG_HISTORY_MONTHS", "DEFAULT_ACTIVITY_WINDOW", "DEFAULT_TOP_N",
]
