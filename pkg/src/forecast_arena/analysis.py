"""Analyses over a backtest result table.

Everything here is a pure transformation of a ResultTable: cumulative
WAPE histograms per model, per-importance-prefix "best of all" shares,
WAPE-vs-rank scatter data with a first-order trend line, long/short
history splits, and the two-window comparison that reruns the backtest
suite with restricted origin ranges.

Rows whose WAPE is undefined (zero actuals) never enter an aggregate;
their counts are carried alongside so reports can state how many
degenerate series were dropped instead of faking zeros.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .backtest import (
    BacktestResult,
    NothingBacktestableError,
    ResultTable,
    SuiteResult,
    run_suite,
    wape,
)
from .dataset import DatasetBundle, SeriesKey
from .forecasters import ForecasterSpec
from .months import format_month
from . import svg

METRICS = ("wape_1mo", "wape_3mo")
DEFAULT_TOP_KS = (5, 10, 25, 50)


@dataclass(frozen=True)
class CdfCurve:
    """Empirical CDF of a metric; fractions are non-decreasing and end at 1."""

    points: tuple[tuple[float, float], ...]  # (threshold, fraction of values <= threshold)
    excluded: int  # rows dropped for undefined metric

    def fraction_at(self, threshold: float) -> float:
        best = 0.0
        for value, fraction in self.points:
            if value <= threshold:
                best = fraction
            else:
                break
        return best


@dataclass(frozen=True)
class BestOfAllShare:
    top_k: int
    shares: dict[str, float]  # model -> fraction of (item, org) pairs it wins
    included: int
    excluded: int


@dataclass(frozen=True)
class ScatterData:
    metric: str
    points: tuple[tuple[int, str, float], ...]  # (rank, model, value)
    trends: dict[str, tuple[float, float]]  # model -> (slope, intercept)


def cumulative_histogram(table: ResultTable, model: str, metric: str, top_k: int) -> CdfCurve:
    """Empirical CDF of one model's metric over the top_k most important items."""
    values, excluded = [], 0
    for row in table.rows:
        if row.model != model or row.importance_rank > top_k:
            continue
        value = row.metric(metric)
        if value is None:
            excluded += 1
        else:
            values.append(value)
    if not values:
        raise ValueError(f"no defined {metric} values for {model} in top {top_k}")
    values.sort()
    n = len(values)
    points = []
    for i, value in enumerate(values, start=1):
        if points and points[-1][0] == value:
            points[-1] = (value, i / n)
        else:
            points.append((value, i / n))
    return CdfCurve(points=tuple(points), excluded=excluded)


def best_of_all(table: ResultTable, metric: str, top_k: int) -> BestOfAllShare:
    """Share of (item, org) pairs each model wins among the top_k items.

    The winner holds the minimum metric; exact ties go to the
    lexicographically smallest model label. Pairs where no model has a
    defined metric are excluded and counted.
    """
    candidates: dict[SeriesKey, list[tuple[float, str]]] = {}
    for row in table.rows:
        if row.importance_rank > top_k:
            continue
        value = row.metric(metric)
        candidates.setdefault(row.key, [])
        if value is not None:
            candidates[row.key].append((value, row.model))
    wins = {model: 0 for model in table.models()}
    included = excluded = 0
    for key in sorted(candidates):
        if not candidates[key]:
            excluded += 1
            continue
        included += 1
        wins[min(candidates[key])[1]] += 1
    shares = {model: wins[model] / included for model in wins} if included else {}
    return BestOfAllShare(top_k=top_k, shares=shares, included=included, excluded=excluded)


def importance_scatter(table: ResultTable, metric: str) -> ScatterData:
    """One point per defined row plus a least-squares line per model.

    The line is the first-order fit of the metric on the importance
    rank: a rising slope means accuracy degrades for less important
    items.
    """
    points = sorted((row.importance_rank, row.model, value)
                    for row in table.rows
                    if (value := row.metric(metric)) is not None)
    trends: dict[str, tuple[float, float]] = {}
    for model in sorted({model for _, model, _ in points}):
        ranks = [float(r) for r, m, _ in points if m == model]
        values = [v for _, m, v in points if m == model]
        n = len(ranks)
        mean_r = sum(ranks) / n
        mean_v = sum(values) / n
        var = sum((r - mean_r) ** 2 for r in ranks)
        if var == 0.0:
            slope = 0.0
        else:
            slope = sum((r - mean_r) * (v - mean_v) for r, v in zip(ranks, values)) / var
        trends[model] = (slope, mean_v - slope * mean_r)
    return ScatterData(metric=metric, points=tuple(points), trends=trends)


def history_split(table: ResultTable) -> tuple[ResultTable, ResultTable]:
    """Partition rows into (long-history, short-history) tables."""
    long_rows = tuple(row for row in table.rows if row.history == "long")
    short_rows = tuple(row for row in table.rows if row.history == "short")
    return ResultTable(long_rows), ResultTable(short_rows)


# ---------------------------------------------------------------------------
# two-window comparison

@dataclass(frozen=True)
class WindowComparison:
    window_a: tuple[date, date]
    window_b: tuple[date, date]
    metric: str
    suite_a: SuiteResult
    suite_b: SuiteResult
    aggregates: dict[str, tuple[float | None, float | None, float | None]]
    # model -> (wape in a, wape in b, delta b - a)


def pooled_wape(results: Iterable[BacktestResult], metric: str) -> float | None:
    """WAPE over all per-origin samples of the given results, pooled."""
    actuals, forecasts = [], []
    for result in results:
        for sample in result.per_origin:
            if metric == "wape_1mo":
                actuals.append(sample.actual_1mo)
                forecasts.append(sample.forecast_1mo)
            elif metric == "wape_3mo":
                if sample.actual_3mo is not None:
                    actuals.append(sample.actual_3mo)
                    forecasts.append(sample.forecast_3mo)
            else:
                raise ValueError(f"unknown metric {metric!r}")
    if not actuals:
        return None
    return wape(actuals, forecasts)


def window_comparison(bundle: DatasetBundle, specs: Sequence[ForecasterSpec],
                      window_a: tuple[date, date], window_b: tuple[date, date], *,
                      metric: str = "wape_1mo",
                      importance=None, activity_window: int = 3,
                      max_workers: int = 1) -> WindowComparison:
    """Backtest twice with origins restricted to each window and compare.

    Windows must be identical (the identity check) or fully disjoint;
    partial overlap would double-count origins. A series participates
    in a window when it offers at least the 6-origin minimum there.
    """
    if window_a != window_b and not (window_a[1] < window_b[0] or window_b[1] < window_a[0]):
        raise ValueError("windows must be identical or disjoint")

    def run(window: tuple[date, date]) -> SuiteResult:
        try:
            return run_suite(bundle, specs, importance=importance,
                             activity_window=activity_window,
                             origin_window=window, max_workers=max_workers)
        except NothingBacktestableError as exc:
            raise ValueError(f"window {format_month(window[0])}:{format_month(window[1])} "
                             f"leaves no backtestable series") from exc

    suite_a, suite_b = run(window_a), run(window_b)
    aggregates = {}
    for spec in specs:
        in_a = [r for r in suite_a.results.values() if r.model == spec.label]
        in_b = [r for r in suite_b.results.values() if r.model == spec.label]
        wape_a, wape_b = pooled_wape(in_a, metric), pooled_wape(in_b, metric)
        delta = None if wape_a is None or wape_b is None else wape_b - wape_a
        aggregates[spec.label] = (wape_a, wape_b, delta)
    return WindowComparison(window_a, window_b, metric, suite_a, suite_b, aggregates)


# ---------------------------------------------------------------------------
# report emission

def _write_csv(path: Path, header: tuple[str, ...], rows: Iterable[tuple]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def emit_report(table: ResultTable, out_dir: str | Path, *,
                metrics: Sequence[str] = METRICS,
                top_ks: Sequence[int] = DEFAULT_TOP_KS,
                formats: Sequence[str] = ("csv", "json")) -> list[Path]:
    """Write the full analysis file tree; returns the written paths.

    The root holds analyses over all rows; ``long_history/`` and
    ``short_history/`` mirror them per split. CSV files are the source
    of truth, JSON siblings add excluded-row counts, SVG siblings are
    optional renderings. Output depends only on the table contents, so
    reruns are byte-identical.
    """
    for metric in metrics:
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r}")
    unknown = set(formats) - {"csv", "json", "svg"}
    if unknown:
        raise ValueError(f"unknown formats: {sorted(unknown)}")
    out_dir = Path(out_dir)
    long_table, short_table = history_split(table)
    written: list[Path] = []
    for subdir, subtable in (("", table), ("long_history", long_table),
                             ("short_history", short_table)):
        base = out_dir / subdir if subdir else out_dir
        base.mkdir(parents=True, exist_ok=True)
        for metric in metrics:
            written += _emit_split(subtable, base, metric, top_ks, formats)
    return sorted(written)


def _effective_top_ks(table: ResultTable, top_ks: Sequence[int]) -> list[int]:
    # requested prefixes plus "all ranks", deduplicated
    ks = {int(k) for k in top_ks if k >= 1}
    if table.rows:
        ks.add(max(row.importance_rank for row in table.rows))
    return sorted(ks)


def _emit_split(table: ResultTable, base: Path, metric: str,
                top_ks: Sequence[int], formats: Sequence[str]) -> list[Path]:
    written: list[Path] = []
    want = set(formats)
    ks = _effective_top_ks(table, top_ks)

    scatter = importance_scatter(table, metric)
    if "csv" in want:
        path = base / f"scatter_{metric}.csv"
        _write_csv(path, ("rank", "model", "value"),
                   ((rank, model, repr(value)) for rank, model, value in scatter.points))
        written.append(path)
        path = base / f"trend_{metric}.csv"
        _write_csv(path, ("model", "slope", "intercept"),
                   ((model, repr(slope), repr(intercept))
                    for model, (slope, intercept) in sorted(scatter.trends.items())))
        written.append(path)
    if "json" in want:
        path = base / f"scatter_{metric}.json"
        _write_json(path, {"metric": metric,
                           "points": [list(p) for p in scatter.points],
                           "trends": {m: {"slope": s, "intercept": b}
                                      for m, (s, b) in scatter.trends.items()}})
        written.append(path)
    if "svg" in want and scatter.points:
        path = base / f"scatter_{metric}.svg"
        path.write_text(svg.render_scatter(scatter, title=f"{metric} by importance rank"),
                        encoding="utf-8")
        written.append(path)

    shares = [best_of_all(table, metric, k) for k in ks]
    shares = [s for s in shares if s.included > 0]
    if "csv" in want:
        path = base / f"best_of_all_{metric}.csv"
        _write_csv(path, ("top_k", "model", "share"),
                   ((s.top_k, model, repr(s.shares[model]))
                    for s in shares for model in sorted(s.shares)))
        written.append(path)
    if "json" in want:
        path = base / f"best_of_all_{metric}.json"
        _write_json(path, {"metric": metric,
                           "shares": [{"top_k": s.top_k, "shares": s.shares,
                                       "included": s.included, "excluded": s.excluded}
                                      for s in shares]})
        written.append(path)
    if "svg" in want and shares:
        path = base / f"best_of_all_{metric}.svg"
        path.write_text(svg.render_stacked_shares(shares, title=f"best of all: {metric}"),
                        encoding="utf-8")
        written.append(path)

    for model in table.models():
        for k in ks:
            try:
                curve = cumulative_histogram(table, model, metric, k)
            except ValueError:
                continue  # nothing defined for this (model, prefix)
            stem = f"cdf_{model}_{metric}_top{k}"
            if "csv" in want:
                path = base / f"{stem}.csv"
                _write_csv(path, ("threshold", "fraction"),
                           ((repr(t), repr(f)) for t, f in curve.points))
                written.append(path)
            if "json" in want:
                path = base / f"{stem}.json"
                _write_json(path, {"model": model, "metric": metric, "top_k": k,
                                   "excluded": curve.excluded,
                                   "points": [list(p) for p in curve.points]})
                written.append(path)
            if "svg" in want:
                path = base / f"{stem}.svg"
                path.write_text(svg.render_cdf(curve, title=f"{model} {metric} top {k}"),
                                encoding="utf-8")
                written.append(path)
    return written


def write_window_compare(comparison: WindowComparison, out_dir: str | Path, *,
                         formats: Sequence[str] = ("csv", "json")) -> list[Path]:
    """Write ``window_compare.csv`` (and siblings) for a two-window run."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    rows = [(model, *comparison.aggregates[model]) for model in sorted(comparison.aggregates)]
    if "csv" in set(formats):
        path = out_dir / "window_compare.csv"
        _write_csv(path, ("model", "wape_window_a", "wape_window_b", "delta"),
                   ((model, _fmt(a), _fmt(b), _fmt(d)) for model, a, b, d in rows))
        written.append(path)
    if "json" in set(formats):
        path = out_dir / "window_compare.json"
        _write_json(path, {
            "metric": comparison.metric,
            "window_a": [format_month(m) for m in comparison.window_a],
            "window_b": [format_month(m) for m in comparison.window_b],
            "models": {model: {"wape_window_a": a, "wape_window_b": b, "delta": d}
                       for model, a, b, d in rows},
        })
        written.append(path)
    if "svg" in set(formats):
        path = out_dir / "window_compare.svg"
        path.write_text(svg.render_window_bars(rows, title=f"window comparison ({comparison.metric})"),
                        encoding="utf-8")
        written.append(path)
    return sorted(written)


__all__ = [
    "CdfCurve", "BestOfAllShare", "ScatterData", "cumulative_histogram",
    "best_of_all", "importance_scatter", "history_split", "pooled_wape",
    "WindowComparison", "window_comparison", "emit_report", "write_window_compare",
    "METRICS", "DEFAULT_TOP_KS",
]
