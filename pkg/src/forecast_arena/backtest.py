"""Rolling-origin backtesting with monthly and quarterly WAPE.

Every month that leaves at least 18 months of history behind it and at
least one month ahead of it can serve as a forecast origin: the model
is retrained on data up to and including the origin, then scored on
what follows. A series is backtestable once it has 24 months (18 of
history plus the 6-step minimum); longer series use up to 12 origins,
always the most recent ones.

Each origin contributes one monthly sample (the single next month) and,
when three future months exist, one quarterly sample (3-month sums), so
a full plan yields ``steps`` monthly and ``steps - 2`` quarterly
samples. WAPE pools the samples: sum of absolute errors over sum of
absolute actuals, undefined when the actuals sum to zero.

The global autoregression retrains on *all* portfolio series truncated
at the same calendar origin; those fits are shared across series via a
per-origin cache, which changes nothing observable because the training
set depends only on the origin month.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .dataset import DatasetBundle, HolidayCalendar, MonthlySeries, SeriesKey
from .forecasters import (
    ForecasterSpec,
    fit_global_ar,
    fit_prophet_lite,
    predict_global_ar,
    predict_prophet_lite,
    seasonal_naive,
)
from .forecasters.global_ar import DEFAULT_LAGS
from .months import parse_month
from .portfolio import SeriesClass, classify_series, importance_table, ImportanceEntry

MIN_HISTORY_MONTHS = 18
MIN_STEPS = 6
MAX_STEPS = 12
QUARTER_HORIZON = 3

RESULT_COLUMNS = ("item", "org", "model", "wape1mo", "wape3mo", "n_monthly",
                  "n_quarterly", "importance_rank", "history_class", "activity")
ORIGIN_COLUMNS = ("item", "org", "model", "origin", "actual_1mo", "forecast_1mo",
                  "actual_3mo", "forecast_3mo")


class NothingBacktestableError(RuntimeError):
    """No series in the portfolio satisfies the backtesting length rule."""


def backtest_steps(series_length: int) -> int | None:
    """Number of rolling origins for a history of this length.

    None below 24 months; otherwise between 6 and 12, using every month
    past the 18-month training minimum up to the 12-step cap.
    """
    if series_length < MIN_HISTORY_MONTHS + MIN_STEPS:
        return None
    return min(MAX_STEPS, series_length - MIN_HISTORY_MONTHS)


@dataclass(frozen=True)
class BacktestPlan:
    steps: int
    origins: tuple[date, ...]  # oldest first; training ends at each origin
    series_length: int


def backtest_plan(series: MonthlySeries,
                  origin_window: tuple[date, date] | None = None) -> BacktestPlan | None:
    """Origins for one series, or None when it cannot be backtested.

    ``origin_window`` restricts candidate origins to a month range
    (used by the two-window comparison); the 6-minimum and 12-cap then
    apply to the restricted set.
    """
    n = len(series)
    candidates = [i for i in range(MIN_HISTORY_MONTHS - 1, n - 1)]
    if origin_window is not None:
        start, end = origin_window
        candidates = [i for i in candidates if start <= series.month_at(i) <= end]
    if len(candidates) < MIN_STEPS:
        return None
    chosen = candidates[-MAX_STEPS:]
    return BacktestPlan(steps=len(chosen),
                        origins=tuple(series.month_at(i) for i in chosen),
                        series_length=n)


def wape(actuals: Sequence[float], forecasts: Sequence[float]) -> float | None:
    """Sum |a - f| / sum |a| over pooled samples; None when actuals sum to 0."""
    actuals = np.asarray(actuals, dtype=np.float64)
    forecasts = np.asarray(forecasts, dtype=np.float64)
    if actuals.shape != forecasts.shape:
        raise ValueError(f"length mismatch: {actuals.shape} vs {forecasts.shape}")
    if actuals.size == 0:
        raise ValueError("wape needs at least one sample")
    denominator = float(np.sum(np.abs(actuals)))
    if denominator == 0.0:
        return None
    return float(np.sum(np.abs(actuals - forecasts)) / denominator)


@dataclass(frozen=True)
class OriginSample:
    origin: date
    actual_1mo: float
    forecast_1mo: float
    actual_3mo: float | None
    forecast_3mo: float | None


@dataclass(frozen=True)
class BacktestResult:
    key: SeriesKey
    model: str
    wape_1mo: float | None
    wape_3mo: float | None
    n_monthly: int
    n_quarterly: int
    per_origin: tuple[OriginSample, ...]
    failures: tuple[tuple[date, str], ...] = ()


class GlobalFitCache(dict):
    """(model label, origin month) -> fitted global parameters."""


def _global_params(spec: ForecasterSpec, bundle: DatasetBundle, origin: date,
                   cache: GlobalFitCache):
    cache_key = (spec.label, origin)
    if cache_key not in cache:
        lags = int(spec.get("lags", DEFAULT_LAGS))
        training = {}
        for key, series in bundle.series.items():
            truncated = series.up_to(origin)
            if truncated is not None and len(truncated) >= lags + 1:
                training[key] = truncated
        cache[cache_key] = fit_global_ar(training, spec)
    return cache[cache_key]


def forecast_at_origin(spec: ForecasterSpec, series: MonthlySeries, origin: date,
                       horizon: int, future_prices, bundle: DatasetBundle,
                       calendar: HolidayCalendar,
                       cache: GlobalFitCache | None = None) -> np.ndarray:
    """Train at ``origin`` and forecast ``horizon`` months, per the spec's kind.

    Training data is sliced to months <= origin before any model sees
    it, which is what makes the engine causal by construction. Future
    prices are a known regressor and arrive from the caller.
    """
    train = series.up_to(origin)
    if train is None or train.end_month != origin:
        raise ValueError(f"origin {origin:%Y-%m} not covered by series {series.key}")
    if spec.kind == "seasonal_naive":
        return seasonal_naive(train, origin, horizon).values
    if spec.kind == "prophet_lite":
        params = fit_prophet_lite(train, calendar, spec)
        return predict_prophet_lite(params, origin, horizon, future_prices, calendar).values
    if spec.kind == "global_ar":
        params = _global_params(spec, bundle, origin, cache if cache is not None else GlobalFitCache())
        return predict_global_ar(params, train, origin, horizon, future_prices).values
    raise ValueError(f"unknown forecaster kind {spec.kind!r}")


def run_backtest(series: MonthlySeries, spec: ForecasterSpec, bundle: DatasetBundle,
                 calendar: HolidayCalendar, *,
                 origin_window: tuple[date, date] | None = None,
                 cache: GlobalFitCache | None = None) -> BacktestResult:
    """Roll the origin across one series and pool the errors.

    A fit failure at one origin is recorded and that origin skipped;
    everything else still counts. Samples are collected oldest origin
    first, so aggregation order never depends on scheduling.
    """
    plan = backtest_plan(series, origin_window)
    if plan is None:
        raise ValueError(f"series {series.key} is not backtestable")
    monthly_a, monthly_f = [], []
    quarterly_a, quarterly_f = [], []
    samples: list[OriginSample] = []
    failures: list[tuple[date, str]] = []
    for origin in plan.origins:
        i = series.index_of(origin)
        horizon = min(QUARTER_HORIZON, len(series) - 1 - i)
        future_prices = series.prices[i + 1:i + 1 + horizon]
        try:
            forecast = forecast_at_origin(spec, series, origin, horizon, future_prices,
                                          bundle, calendar, cache)
        except (ValueError, KeyError, np.linalg.LinAlgError) as exc:
            failures.append((origin, str(exc)))
            continue
        actual_1mo = float(series.quantities[i + 1])
        monthly_a.append(actual_1mo)
        monthly_f.append(float(forecast[0]))
        actual_3mo = forecast_3mo = None
        if horizon == QUARTER_HORIZON:
            actual_3mo = float(series.quantities[i + 1:i + 4].sum())
            forecast_3mo = float(forecast.sum())
            quarterly_a.append(actual_3mo)
            quarterly_f.append(forecast_3mo)
        samples.append(OriginSample(origin, actual_1mo, float(forecast[0]),
                                    actual_3mo, forecast_3mo))
    return BacktestResult(
        key=series.key,
        model=spec.label,
        wape_1mo=wape(monthly_a, monthly_f) if monthly_a else None,
        wape_3mo=wape(quarterly_a, quarterly_f) if quarterly_a else None,
        n_monthly=len(monthly_a),
        n_quarterly=len(quarterly_a),
        per_origin=tuple(samples),
        failures=tuple(failures),
    )


@dataclass(frozen=True)
class ResultRow:
    key: SeriesKey
    model: str
    wape_1mo: float | None
    wape_3mo: float | None
    n_monthly: int
    n_quarterly: int
    importance_rank: int
    history: str
    activity: str

    def metric(self, name: str) -> float | None:
        if name == "wape_1mo":
            return self.wape_1mo
        if name == "wape_3mo":
            return self.wape_3mo
        raise ValueError(f"unknown metric {name!r}")


@dataclass(frozen=True)
class ResultTable:
    """Backtest results joined with importance rank and series class."""

    rows: tuple[ResultRow, ...]

    def models(self) -> list[str]:
        return sorted({row.model for row in self.rows})

    def write_csv(self, dest: IO[str] | str | Path) -> None:
        if isinstance(dest, (str, Path)):
            with open(dest, "w", encoding="utf-8", newline="") as handle:
                self.write_csv(handle)
            return
        writer = csv.writer(dest, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for row in self.rows:
            writer.writerow((row.key.item, row.key.org, row.model,
                             "" if row.wape_1mo is None else repr(row.wape_1mo),
                             "" if row.wape_3mo is None else repr(row.wape_3mo),
                             row.n_monthly, row.n_quarterly, row.importance_rank,
                             row.history, row.activity))

    @classmethod
    def read_csv(cls, source: IO[str] | str | Path) -> "ResultTable":
        if isinstance(source, (str, Path)):
            with open(source, "r", encoding="utf-8", newline="") as handle:
                return cls.read_csv(handle)
        reader = csv.reader(source)
        header = tuple(next(reader, ()))
        if header != RESULT_COLUMNS:
            raise ValueError(f"unexpected results header {header!r}")
        rows = []
        for raw in reader:
            if not raw:
                continue
            item, org, model, w1, w3, n1, n3, rank, history, activity = raw
            rows.append(ResultRow(SeriesKey(item, org), model,
                                  float(w1) if w1 else None, float(w3) if w3 else None,
                                  int(n1), int(n3), int(rank), history, activity))
        return cls(tuple(rows))


@dataclass(frozen=True)
class SuiteResult:
    table: ResultTable
    results: dict[tuple[SeriesKey, str], BacktestResult]
    skipped: tuple[tuple[SeriesKey, str], ...]  # (key, reason) for non-backtestable series

    def write_origins_csv(self, dest: IO[str] | str | Path) -> None:
        if isinstance(dest, (str, Path)):
            with open(dest, "w", encoding="utf-8", newline="") as handle:
                self.write_origins_csv(handle)
            return
        writer = csv.writer(dest, lineterminator="\n")
        writer.writerow(ORIGIN_COLUMNS)
        for (key, model) in sorted(self.results):
            for s in self.results[(key, model)].per_origin:
                writer.writerow((key.item, key.org, model, f"{s.origin:%Y-%m}",
                                 repr(s.actual_1mo), repr(s.forecast_1mo),
                                 "" if s.actual_3mo is None else repr(s.actual_3mo),
                                 "" if s.forecast_3mo is None else repr(s.forecast_3mo)))


def run_suite(bundle: DatasetBundle, specs: Sequence[ForecasterSpec], *,
              importance: Sequence[ImportanceEntry] | None = None,
              activity_window: int = 3,
              origin_window: tuple[date, date] | None = None,
              max_workers: int = 1) -> SuiteResult:
    """Backtest every (series, spec) pair and join the result table.

    Global models are fitted once per origin month up front; the
    per-series evaluations that follow are pure and may run on any
    number of workers with identical output, because rows are sorted by
    (series key, model label) before the table is built.
    """
    if not bundle.series:
        raise NothingBacktestableError("nothing to backtest: empty portfolio")
    if not specs:
        raise ValueError("no forecaster specs given")
    labels = [spec.label for spec in specs]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate model labels: {labels}")
    if importance is None:
        importance = importance_table(bundle)
    rank_by_item = {entry.item: entry.rank for entry in importance}
    calendar = bundle.holidays

    plans: dict[SeriesKey, BacktestPlan] = {}
    skipped: list[tuple[SeriesKey, str]] = []
    classes: dict[SeriesKey, SeriesClass] = {}
    for key, series in bundle.series.items():
        classes[key] = classify_series(series, activity_window)
        plan = backtest_plan(series, origin_window)
        if plan is None:
            skipped.append((key, f"history of {len(series)} months is not backtestable"))
        else:
            plans[key] = plan
    if not plans:
        raise NothingBacktestableError("nothing to backtest: no series satisfies the length rule")

    cache = GlobalFitCache()
    for spec in specs:
        if spec.kind == "global_ar":
            for origin in sorted({o for plan in plans.values() for o in plan.origins}):
                _global_params(spec, bundle, origin, cache)

    tasks = [(key, spec) for key in plans for spec in specs]

    def evaluate(task: tuple[SeriesKey, ForecasterSpec]) -> BacktestResult:
        key, spec = task
        return run_backtest(bundle.series[key], spec, bundle, calendar,
                            origin_window=origin_window, cache=cache)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(evaluate, tasks))
    else:
        outcomes = [evaluate(task) for task in tasks]

    results = {(r.key, r.model): r for r in outcomes}
    rows = []
    for key, model in sorted(results):
        r = results[(key, model)]
        cls = classes[key]
        rows.append(ResultRow(key, model, r.wape_1mo, r.wape_3mo, r.n_monthly,
                              r.n_quarterly, rank_by_item[key.item],
                              cls.history, cls.activity))
    return SuiteResult(ResultTable(tuple(rows)), results, tuple(sorted(skipped)))


def parse_origin_window(text: str) -> tuple[date, date]:
    """Parse ``YYYY-MM:YYYY-MM`` into an inclusive month range."""
    try:
        start_text, end_text = text.split(":")
        start, end = parse_month(start_text), parse_month(end_text)
    except ValueError:
        raise ValueError(f"not a month range (YYYY-MM:YYYY-MM): {text!r}") from None
    if start > end:
        raise ValueError(f"window start {start_text} after end {end_text}")
    return start, end


__all__ = [
    "backtest_steps", "backtest_plan", "BacktestPlan", "wape",
    "OriginSample", "BacktestResult", "GlobalFitCache", "forecast_at_origin",
    "run_backtest", "ResultRow", "ResultTable", "SuiteResult", "run_suite",
    "NothingBacktestableError", "parse_origin_window",
    "MIN_HISTORY_MONTHS", "MIN_STEPS", "MAX_STEPS", "RESULT_COLUMNS", "ORIGIN_COLUMNS",
]
