"""Run configuration: plain-text INI files plus flag overrides.

A config file is the durable record of an experiment; every option can
also be set on the command line, and flags win. Paths inside a config
file resolve relative to the file itself so a run directory can be
moved wholesale.

Example::

    [paths]
    target = data/target_ts.csv
    related = data/related_ts.csv
    holidays = data/holidays.csv
    output = out

    [portfolio]
    top_n = 50
    activity_window = 3

    [backtest]
    parallelism = auto

    [report]
    metrics = wape_1mo,wape_3mo
    top_k = 5,10,25,50
    formats = csv,json,svg

    [windows]
    window_a = 2019-03:2020-02
    window_b = 2020-03:2021-02

    [model.prophet_lite]
    seed = 1

    [model.global_ar_q]
    kind = global_ar
    quantile = 0.5

Model sections are named ``model.<label>``; ``kind`` defaults to the
label when the label itself is a forecaster kind.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from .backtest import parse_origin_window
from .forecasters import KINDS, ForecasterSpec

CONFIG_ENV_VAR = "FORECAST_ARENA_CONFIG"
VALID_METRICS = ("wape_1mo", "wape_3mo")
VALID_FORMATS = ("csv", "json", "svg")

_INT_HYPERPARAMETERS = {"fourier_order", "changepoint_count", "lags"}
_FLOAT_HYPERPARAMETERS = {"ridge_lambda", "quantile"}


class ConfigError(ValueError):
    """Unusable configuration; reported as a usage error (exit 1)."""


def default_specs() -> list[ForecasterSpec]:
    """The standard comparison set: one spec per forecaster family plus
    the quantile variant of the global model."""
    return [
        ForecasterSpec("prophet_lite"),
        ForecasterSpec("global_ar"),
        ForecasterSpec("global_ar", {"quantile": 0.5}),
        ForecasterSpec("seasonal_naive"),
    ]


@dataclass
class RunConfig:
    target: Path | None = None
    related: Path | None = None
    holidays: Path | None = None
    out_dir: Path = Path("out")
    top_n: int = 50
    activity_window: int = 3
    importance_window: int | None = None
    max_history_months: int | None = None
    normalize_dates: bool = False
    parallelism: int = 1
    metrics: tuple[str, ...] = VALID_METRICS
    top_ks: tuple[int, ...] = (5, 10, 25, 50)
    formats: tuple[str, ...] = ("csv", "json")
    window_a: tuple[date, date] | None = None
    window_b: tuple[date, date] | None = None
    window_metric: str = "wape_1mo"
    specs: list[ForecasterSpec] = field(default_factory=default_specs)

    def require_inputs(self) -> None:
        if self.target is None or self.related is None:
            raise ConfigError("target and related CSV paths are required "
                              "(config [paths] or --target/--related)")

    def as_manifest_dict(self) -> dict:
        return {
            "target": str(self.target),
            "related": str(self.related),
            "holidays": None if self.holidays is None else str(self.holidays),
            "out_dir": str(self.out_dir),
            "top_n": self.top_n,
            "activity_window": self.activity_window,
            "importance_window": self.importance_window,
            "max_history_months": self.max_history_months,
            "normalize_dates": self.normalize_dates,
            "parallelism": self.parallelism,
            "metrics": list(self.metrics),
            "top_k": list(self.top_ks),
            "formats": list(self.formats),
            "window_a": _window_text(self.window_a),
            "window_b": _window_text(self.window_b),
            "window_metric": self.window_metric,
            "models": [{"label": s.label, "kind": s.kind, "seed": s.seed,
                        "hyperparameters": dict(s.hyperparameters)} for s in self.specs],
        }


def _window_text(window: tuple[date, date] | None) -> str | None:
    if window is None:
        return None
    return f"{window[0].year:04d}-{window[0].month:02d}:{window[1].year:04d}-{window[1].month:02d}"


def _split_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _parse_bool(text: str, key: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: not a boolean: {text!r}")


def _parse_parallelism(text: str) -> int:
    if text.strip().lower() == "auto":
        return min(8, os.cpu_count() or 1)
    try:
        value = int(text)
    except ValueError:
        raise ConfigError(f"parallelism must be an integer or 'auto', got {text!r}") from None
    if value < 1:
        raise ConfigError("parallelism must be >= 1")
    return value


def _check_metrics(metrics: list[str]) -> tuple[str, ...]:
    for metric in metrics:
        if metric not in VALID_METRICS:
            raise ConfigError(f"unknown metric {metric!r}; expected one of {VALID_METRICS}")
    if not metrics:
        raise ConfigError("at least one metric is required")
    return tuple(metrics)


def _check_formats(formats: list[str]) -> tuple[str, ...]:
    for fmt in formats:
        if fmt not in VALID_FORMATS:
            raise ConfigError(f"unknown format {fmt!r}; expected one of {VALID_FORMATS}")
    if not formats:
        raise ConfigError("at least one output format is required")
    return tuple(formats)


def _spec_from_section(label: str, section) -> ForecasterSpec:
    values = dict(section)
    kind = values.pop("kind", label)
    if kind not in KINDS:
        raise ConfigError(f"[model.{label}]: unknown kind {kind!r}")
    seed = 0
    if "seed" in values:
        try:
            seed = int(values.pop("seed"))
        except ValueError:
            raise ConfigError(f"[model.{label}]: seed must be an integer") from None
    hyperparameters = {}
    for key, raw in values.items():
        try:
            if key in _INT_HYPERPARAMETERS:
                hyperparameters[key] = int(raw)
            elif key in _FLOAT_HYPERPARAMETERS:
                hyperparameters[key] = float(raw)
            else:
                raise ValueError
        except ValueError:
            raise ConfigError(f"[model.{label}]: bad hyperparameter {key}={raw!r}") from None
    try:
        return ForecasterSpec(kind, hyperparameters, seed=seed, label=label)
    except ValueError as exc:
        raise ConfigError(f"[model.{label}]: {exc}") from None


def load_config(path: str | Path | None, overrides=None) -> RunConfig:
    """Build a RunConfig from an optional INI file and argparse overrides."""
    config = RunConfig()
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR) or None
    if path is not None:
        config = _read_ini(Path(path))
    if overrides is not None:
        _apply_overrides(config, overrides)
    if config.window_metric not in VALID_METRICS:
        raise ConfigError(f"unknown window metric {config.window_metric!r}")
    return config


def _read_ini(path: Path) -> RunConfig:
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    base = path.resolve().parent
    config = RunConfig()

    def resolve(text: str) -> Path:
        p = Path(text.strip())
        return p if p.is_absolute() else base / p

    if parser.has_section("paths"):
        section = parser["paths"]
        if "target" in section:
            config.target = resolve(section["target"])
        if "related" in section:
            config.related = resolve(section["related"])
        if "holidays" in section:
            config.holidays = resolve(section["holidays"])
        if "output" in section:
            config.out_dir = resolve(section["output"])
    if parser.has_section("portfolio"):
        section = parser["portfolio"]
        try:
            config.top_n = section.getint("top_n", config.top_n)
            config.activity_window = section.getint("activity_window", config.activity_window)
            if section.get("importance_window", "").strip():
                config.importance_window = section.getint("importance_window")
            if section.get("max_history_months", "").strip():
                config.max_history_months = section.getint("max_history_months")
        except ValueError as exc:
            raise ConfigError(f"[portfolio]: {exc}") from None
    if parser.has_section("backtest"):
        section = parser["backtest"]
        if "parallelism" in section:
            config.parallelism = _parse_parallelism(section["parallelism"])
        if "normalize_dates" in section:
            config.normalize_dates = _parse_bool(section["normalize_dates"], "normalize_dates")
    if parser.has_section("report"):
        section = parser["report"]
        if "metrics" in section:
            config.metrics = _check_metrics(_split_list(section["metrics"]))
        if "formats" in section:
            config.formats = _check_formats(_split_list(section["formats"]))
        if "top_k" in section:
            try:
                config.top_ks = tuple(int(k) for k in _split_list(section["top_k"]))
            except ValueError:
                raise ConfigError("[report]: top_k must be a comma-separated list of integers") from None
    if parser.has_section("windows"):
        section = parser["windows"]
        try:
            if "window_a" in section:
                config.window_a = parse_origin_window(section["window_a"])
            if "window_b" in section:
                config.window_b = parse_origin_window(section["window_b"])
        except ValueError as exc:
            raise ConfigError(f"[windows]: {exc}") from None
        config.window_metric = section.get("metric", config.window_metric).strip()

    model_sections = [name for name in parser.sections() if name.startswith("model.")]
    if model_sections:
        config.specs = [_spec_from_section(name[len("model."):], parser[name])
                        for name in model_sections]
        labels = [spec.label for spec in config.specs]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate model labels: {labels}")
    return config


def _apply_overrides(config: RunConfig, args) -> None:
    mapping = {
        "target": ("target", Path),
        "related": ("related", Path),
        "holidays": ("holidays", Path),
        "out": ("out_dir", Path),
        "top_n": ("top_n", int),
        "activity_window": ("activity_window", int),
        "importance_window": ("importance_window", int),
        "max_history_months": ("max_history_months", int),
    }
    for arg_name, (field_name, cast) in mapping.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            setattr(config, field_name, cast(value))
    if getattr(args, "normalize_dates", False):
        config.normalize_dates = True
    if getattr(args, "parallel", None) is not None:
        config.parallelism = _parse_parallelism(args.parallel)
    if getattr(args, "metrics", None) is not None:
        config.metrics = _check_metrics(_split_list(args.metrics))
    if getattr(args, "formats", None) is not None:
        config.formats = _check_formats(_split_list(args.formats))
    if getattr(args, "top_k", None) is not None:
        try:
            config.top_ks = tuple(int(k) for k in _split_list(args.top_k))
        except ValueError:
            raise ConfigError("--top-k must be a comma-separated list of integers") from None
    try:
        if getattr(args, "window_a", None) is not None:
            config.window_a = parse_origin_window(args.window_a)
        if getattr(args, "window_b", None) is not None:
            config.window_b = parse_origin_window(args.window_b)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if getattr(args, "window_metric", None) is not None:
        config.window_metric = args.window_metric


__all__ = ["RunConfig", "ConfigError", "load_config", "default_specs",
           "CONFIG_ENV_VAR", "VALID_METRICS", "VALID_FORMATS"]
