"""Command-line entry point.

    forecast-arena validate         check inputs, list series, report classes
    forecast-arena backtest         run the full suite, write results + manifest
    forecast-arena report           turn results.csv into the analysis file tree
    forecast-arena compare-windows  backtest two origin windows and diff them
    forecast-arena model-dump       fit one configured model and print its JSON

Exit codes are a stable scripting contract: 0 success, 1 usage or
configuration error, 2 data error (missing or malformed input), 3
nothing backtestable.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .analysis import emit_report, window_comparison, write_window_compare
from .backtest import (
    NothingBacktestableError,
    ResultTable,
    backtest_steps,
    run_suite,
)
from .config import CONFIG_ENV_VAR, ConfigError, RunConfig, load_config
from .dataset import DataFormatError, DatasetBundle, load_dataset
from .forecasters import fit_global_ar, fit_prophet_lite
from .months import format_month, parse_month
from .portfolio import classify_series, importance_table, select_portfolio, write_importance_csv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NOTHING_BACKTESTABLE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the scripting contract wants 1
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="forecast-arena",
                     description="Monthly sales forecasting comparison harness.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help=f"INI config file (default: ${CONFIG_ENV_VAR})")
        p.add_argument("--target", help="target_ts.csv path")
        p.add_argument("--related", help="related_ts.csv path")
        p.add_argument("--holidays", help="holidays.csv path")
        p.add_argument("--out", help="output directory")
        p.add_argument("--top-n", dest="top_n", type=int, help="portfolio size (items)")
        p.add_argument("--activity-window", dest="activity_window", type=int,
                       help="months with no sale before a series counts as inactive")
        p.add_argument("--importance-window", dest="importance_window", type=int,
                       help="rank items on their final N months only")
        p.add_argument("--max-history-months", dest="max_history_months", type=int,
                       help="truncate every series to its final N months")
        p.add_argument("--normalize-dates", dest="normalize_dates", action="store_true",
                       help="truncate mid-month dates instead of rejecting them")
        p.add_argument("--parallel", help="worker count or 'auto'")
        p.add_argument("--metrics", help="comma list: wape_1mo,wape_3mo")
        p.add_argument("--formats", help="comma list: csv,json,svg")
        p.add_argument("--top-k", dest="top_k", help="comma list of importance prefixes")
        p.add_argument("--window-a", dest="window_a", help="origin window YYYY-MM:YYYY-MM")
        p.add_argument("--window-b", dest="window_b", help="origin window YYYY-MM:YYYY-MM")
        p.add_argument("--window-metric", dest="window_metric",
                       help="metric for the window comparison")

    add_common(sub.add_parser("validate", help="parse inputs and report per-series status"))
    add_common(sub.add_parser("backtest", help="run the backtest suite"))
    report = sub.add_parser("report", help="emit analyses from a results file")
    add_common(report)
    report.add_argument("--results", help="results.csv path (default: <out>/results.csv)")
    add_common(sub.add_parser("compare-windows", help="backtest two origin windows"))
    dump = sub.add_parser("model-dump", help="fit one model and print parameter JSON")
    add_common(dump)
    dump.add_argument("--model", required=True, help="model label from the config")
    dump.add_argument("--item", required=True)
    dump.add_argument("--org", required=True)
    dump.add_argument("--origin", help="train up to this month (YYYY-MM; default: series end)")
    return parser


def _load_bundle(config: RunConfig) -> DatasetBundle:
    config.require_inputs()
    return load_dataset(config.target, config.related, config.holidays,
                        normalize_dates=config.normalize_dates,
                        max_history_months=config.max_history_months)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def cmd_validate(config: RunConfig, out=sys.stdout) -> int:
    bundle = _load_bundle(config)
    print(f"{'item':>12} {'org':>12} {'start':>8} {'end':>8} {'months':>6} "
          f"{'history':>7} {'activity':>8} {'steps':>5}", file=out)
    n_backtestable = 0
    n_active_long = 0
    for key, series in bundle.series.items():
        cls = classify_series(series, config.activity_window)
        steps = backtest_steps(len(series))
        if steps is not None:
            n_backtestable += 1
        if cls.history == "long" and cls.activity == "active":
            n_active_long += 1
        print(f"{key.item:>12} {key.org:>12} {format_month(series.start_month):>8} "
              f"{format_month(series.end_month):>8} {len(series):>6} {cls.history:>7} "
              f"{cls.activity:>8} {steps if steps is not None else '-':>5}", file=out)
    total = len(bundle.series)
    share = n_active_long / total
    print(f"series: {total}  items: {len(bundle.items())}  backtestable: {n_backtestable}  "
          f"active_long_share: {share:.1%}", file=out)
    if n_backtestable == 0:
        print("error: no backtestable series (need 24+ months)", file=sys.stderr)
        return EXIT_NOTHING_BACKTESTABLE
    return EXIT_OK


def cmd_backtest(config: RunConfig, out=sys.stdout) -> int:
    started = time.perf_counter()
    bundle = _load_bundle(config)
    importance = importance_table(bundle, window=config.importance_window)
    top_n = min(config.top_n, len(importance))
    portfolio = select_portfolio(bundle, importance, top_n)
    suite = run_suite(portfolio, config.specs, importance=importance,
                      activity_window=config.activity_window,
                      max_workers=config.parallelism)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_importance_csv(importance, out_dir / "importance.csv")
    suite.table.write_csv(out_dir / "results.csv")
    suite.write_origins_csv(out_dir / "origins.csv")
    failures = sum(len(r.failures) for r in suite.results.values())
    manifest = {
        "version": __version__,
        "config": config.as_manifest_dict(),
        "inputs": {name: {"path": str(path), "sha256": _sha256(Path(path))}
                   for name, path in (("target", config.target), ("related", config.related),
                                      ("holidays", config.holidays)) if path is not None},
        "seeds": {spec.label: spec.seed for spec in config.specs},
        "rows": len(suite.table.rows),
        "skipped_series": [[str(key), reason] for key, reason in suite.skipped],
        "origin_fit_failures": failures,
        "timings": {"backtest_seconds": round(time.perf_counter() - started, 3)},
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")
    print(f"wrote {len(suite.table.rows)} result rows to {out_dir / 'results.csv'} "
          f"({len(suite.skipped)} series skipped, {failures} origin failures, "
          f"{manifest['timings']['backtest_seconds']}s)", file=out)
    return EXIT_OK


def cmd_report(config: RunConfig, results_path: str | None, out=sys.stdout) -> int:
    out_dir = Path(config.out_dir)
    path = Path(results_path) if results_path else out_dir / "results.csv"
    if not path.exists():
        raise DataFormatError(f"results file not found: {path}")
    try:
        table = ResultTable.read_csv(path)
    except ValueError as exc:
        raise DataFormatError(str(exc)) from None
    written = emit_report(table, out_dir / "report", metrics=config.metrics,
                          top_ks=config.top_ks, formats=config.formats)
    print(f"wrote {len(written)} report files under {out_dir / 'report'}", file=out)
    return EXIT_OK


def cmd_compare_windows(config: RunConfig, out=sys.stdout) -> int:
    if config.window_a is None or config.window_b is None:
        raise ConfigError("compare-windows needs both --window-a and --window-b "
                          "(or a [windows] config section)")
    bundle = _load_bundle(config)
    importance = importance_table(bundle, window=config.importance_window)
    portfolio = select_portfolio(bundle, importance, min(config.top_n, len(importance)))
    try:
        comparison = window_comparison(portfolio, config.specs, config.window_a,
                                       config.window_b, metric=config.window_metric,
                                       importance=importance,
                                       activity_window=config.activity_window,
                                       max_workers=config.parallelism)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    written = write_window_compare(comparison, config.out_dir, formats=config.formats)
    for model in sorted(comparison.aggregates):
        a, b, delta = comparison.aggregates[model]
        print(f"{model}: window_a={_round(a)} window_b={_round(b)} delta={_round(delta)}", file=out)
    print(f"wrote {', '.join(str(p) for p in written)}", file=out)
    return EXIT_OK


def _round(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.4f}"


def cmd_model_dump(config: RunConfig, args, out=sys.stdout) -> int:
    bundle = _load_bundle(config)
    by_label = {spec.label: spec for spec in config.specs}
    if args.model not in by_label:
        raise ConfigError(f"unknown model label {args.model!r}; "
                          f"configured: {sorted(by_label)}")
    spec = by_label[args.model]
    matches = [s for s in bundle.series.values()
               if s.key.item == args.item and s.key.org == args.org]
    if not matches:
        raise DataFormatError(f"no series for item={args.item} org={args.org}")
    series = matches[0]
    origin = series.end_month if args.origin is None else parse_month(args.origin)
    if spec.kind == "prophet_lite":
        train = series.up_to(origin)
        if train is None:
            raise DataFormatError(f"series starts after origin {format_month(origin)}")
        payload = fit_prophet_lite(train, bundle.holidays, spec).to_dict()
    elif spec.kind == "global_ar":
        lags = int(spec.get("lags", 12))
        training = {k: t for k, s in bundle.series.items()
                    if (t := s.up_to(origin)) is not None and len(t) >= lags + 1}
        params = fit_global_ar(training, spec)
        payload = params.to_dict()
    else:
        payload = {"kind": spec.kind, "note": "no fitted parameters"}
    json.dump(payload, out, indent=2, sort_keys=True)
    out.write("\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = load_config(args.config, args)
        if args.command == "validate":
            return cmd_validate(config)
        if args.command == "backtest":
            return cmd_backtest(config)
        if args.command == "report":
            return cmd_report(config, args.results)
        if args.command == "compare-windows":
            return cmd_compare_windows(config)
        if args.command == "model-dump":
            return cmd_model_dump(config, args)
        raise UsageError(f"unknown command {args.command!r}")
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataFormatError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NothingBacktestableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOTHING_BACKTESTABLE


if __name__ == "__main__":
    sys.exit(main())
