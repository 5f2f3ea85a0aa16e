"""Deterministic synthetic dataset in the benchmark's file layout.

Produces target/related/holiday CSVs with the documented shape: a
configurable number of items sold in a handful of organizations,
monthly quantities over about seven years, seasonal levels spread over
several orders of magnitude, a few short-history items and a few that
went inactive. Useful for demos and for end-to-end tests where the real
files are not available.

Usage::

    python -m forecast_arena.datagen OUT_DIR [--items 50] [--orgs 4] [--seed N]
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from datetime import date
from pathlib import Path

import numpy as np

from .dataset import (
    HolidayCalendar,
    PriceRecord,
    SalesRecord,
    write_holidays_csv,
    write_related_csv,
    write_target_csv,
)
from .months import add_months

_HOLIDAYS = (
    (1, 1, "new_year"),
    (1, 2, "new_year"),
    (5, 1, "labour_day"),
    (5, 2, "labour_day"),
    (9, 15, "harvest_fair"),
    (12, 31, "year_end"),
)


@dataclass(frozen=True)
class DemoPaths:
    target: Path
    related: Path
    holidays: Path


def generate_demo_dataset(out_dir: str | Path, *, n_items: int = 50, n_orgs: int = 4,
                          n_months: int = 84, end_month: date = date(2021, 12, 1),
                          seed: int = 20210401, n_short_items: int = 2,
                          n_inactive_items: int = 2) -> DemoPaths:
    """Write the three CSV files and return their paths.

    Identical arguments produce byte-identical files. Short-history
    items start late enough to fall under the 24-month backtesting
    threshold; inactive items sell nothing in their final four months.
    """
    if n_short_items + n_inactive_items > n_items:
        raise ValueError("more special items than items")
    rng = np.random.default_rng(seed)
    start = add_months(end_month, -(n_months - 1))
    items = sorted(str(n) for n in rng.choice(np.arange(10**6, 10**7), size=n_items, replace=False))
    orgs = sorted(str(n) for n in rng.choice(np.arange(10**6, 10**7), size=n_orgs, replace=False))

    # least-important items get the special treatment so the portfolio head stays clean
    levels = 4000.0 * np.exp(-np.arange(n_items) / 10.0) + 20.0
    order = rng.permutation(n_items)  # decouple item id from importance
    short_set = {items[order[i]] for i in range(n_short_items)}
    inactive_set = {items[order[i]] for i in range(n_short_items, n_short_items + n_inactive_items)}

    months = [add_months(start, i) for i in range(n_months)]
    holiday_month_numbers = {mo for mo, _, _ in _HOLIDAYS}

    sales: list[SalesRecord] = []
    prices: list[PriceRecord] = []
    for idx, item in enumerate(items):
        level = levels[idx]
        phase = rng.uniform(0, 12)
        amplitude = rng.uniform(0.15, 0.45)
        slope = rng.uniform(-0.003, 0.005) * level
        base_price = float(np.exp(rng.normal(1.0, 0.8)))
        first = n_months - 21 if item in short_set else 0
        for org in orgs:
            org_factor = rng.uniform(0.5, 1.5)
            price_factor = rng.uniform(0.9, 1.1)
            noise = rng.normal(0.0, 0.08 * level, size=n_months)
            for i in range(first, n_months):
                month = months[i]
                seasonal = 1.0 + amplitude * np.sin(2 * np.pi * (i + phase) / 12.0)
                bump = 1.05 if month.month in holiday_month_numbers else 1.0
                quantity = max(0.0, (level * seasonal * bump + slope * i) * org_factor + noise[i])
                if item in inactive_set and i >= n_months - 4:
                    quantity = 0.0
                quantity = round(quantity, 3)
                sales.append(SalesRecord(item, org, month, quantity))
                if quantity > 0:
                    wiggle = 1.0 + 0.04 * np.sin(2 * np.pi * i / 9.0 + idx)
                    prices.append(PriceRecord(item, org, month,
                                              round(base_price * price_factor * wiggle, 6)))

    entries = {(date(year, mo, dy), name)
               for year in range(start.year, end_month.year + 1)
               for mo, dy, name in _HOLIDAYS}
    calendar = HolidayCalendar(frozenset(entries))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = DemoPaths(out / "target_ts.csv", out / "related_ts.csv", out / "holidays.csv")
    write_target_csv(sales, paths.target)
    write_related_csv(prices, paths.related)
    write_holidays_csv(calendar, paths.holidays)
    return paths


def write_demo_config(config_path: str | Path, data: DemoPaths, out_dir: str | Path) -> Path:
    """Write an INI config pointing at generated data; handy for quickstarts."""
    config_path = Path(config_path)
    config_path.write_text(
        "[paths]\n"
        f"target = {data.target}\n"
        f"related = {data.related}\n"
        f"holidays = {data.holidays}\n"
        f"output = {out_dir}\n"
        "\n[backtest]\nparallelism = auto\n"
        "\n[report]\nformats = csv,json,svg\n",
        encoding="utf-8")
    return config_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("out_dir")
    parser.add_argument("--items", type=int, default=50)
    parser.add_argument("--orgs", type=int, default=4)
    parser.add_argument("--months", type=int, default=84)
    parser.add_argument("--seed", type=int, default=20210401)
    args = parser.parse_args(argv)
    paths = generate_demo_dataset(args.out_dir, n_items=args.items, n_orgs=args.orgs,
                                  n_months=args.months, seed=args.seed)
    print(f"wrote {paths.target}, {paths.related}, {paths.holidays}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
