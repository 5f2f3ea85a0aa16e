"""Global linear autoregression over all series, with per-series rescaling.

One weight vector is shared by every series. Each series is first
normalized by its own mean training quantity, which lets a single model
serve signals whose volumes differ by orders of magnitude; forecasts
are mapped back through the same factor. Squared loss gives a
closed-form ridge solution; configuring a quantile swaps in the pinball
loss, fitted by deterministic subgradient descent from the squared-loss
solution.

Feature layout per training row (target month t of one series):
    [z(t-1) .. z(t-L),  12 month-of-year indicators,  normalized price,  1]
where z is the rescaled quantity signal.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from typing import Mapping

import numpy as np

from ..dataset import MonthlySeries, SeriesKey
from ..months import add_months
from .base import Forecast, ForecasterSpec
from .components import fit_pinball

DEFAULT_LAGS = 12
DEFAULT_RIDGE_LAMBDA = 1e-6
SCALE_FLOOR = 1e-6  # keeps all-zero series divisible


@dataclass(frozen=True)
class GlobalARParams:
    """Shared weights plus the per-series normalizers needed at inference."""

    weights: np.ndarray  # length lags + 14
    lags: int
    scales: dict[SeriesKey, float]
    price_scales: dict[SeriesKey, float]
    quantile: float | None = None

    def to_dict(self) -> dict:
        return {
            "kind": "global_ar",
            "lags": self.lags,
            "weights": [float(w) for w in self.weights],
            "scales": {str(k): v for k, v in sorted(self.scales.items())},
            "price_scales": {str(k): v for k, v in sorted(self.price_scales.items())},
            "quantile": self.quantile,
        }


def _series_scales(series: MonthlySeries) -> tuple[float, float]:
    scale = max(float(series.quantities.mean()), SCALE_FLOOR)
    price_scale = max(float(series.prices.mean()), SCALE_FLOOR)
    return scale, price_scale


def _feature_row(z_window: np.ndarray, month: date, price_norm: float, lags: int) -> np.ndarray:
    """z_window holds the last ``lags`` normalized values, most recent last."""
    row = np.zeros(lags + 14)
    row[:lags] = z_window[::-1]  # most recent lag first
    row[lags + month.month - 1] = 1.0
    row[lags + 12] = price_norm
    row[lags + 13] = 1.0
    return row


def fit_global_ar(training: Mapping[SeriesKey, MonthlySeries], spec: ForecasterSpec) -> GlobalARParams:
    """Pool rows from every series and fit one shared weight vector.

    Every series must provide at least lags+1 months (callers filter
    shorter ones out). Rows are stacked in sorted key order so the fit
    is independent of mapping order. The ridge solve minimizes mean
    squared error plus lambda * ||w||^2; a configured quantile then
    refines the weights under the pinball loss.
    """
    if not training:
        raise ValueError("global fit needs at least one series")
    lags = int(spec.get("lags", DEFAULT_LAGS))
    ridge_lambda = float(spec.get("ridge_lambda", DEFAULT_RIDGE_LAMBDA))
    quantile = spec.get("quantile")
    if lags < 1:
        raise ValueError("lags must be >= 1")

    rows, targets = [], []
    scales: dict[SeriesKey, float] = {}
    price_scales: dict[SeriesKey, float] = {}
    for key in sorted(training):
        series = training[key]
        if len(series) < lags + 1:
            raise ValueError(f"series {key} has {len(series)} months; global fit needs >= {lags + 1}")
        scale, price_scale = _series_scales(series)
        scales[key] = scale
        price_scales[key] = price_scale
        z = series.quantities / scale
        p = series.prices / price_scale
        for t in range(lags, len(series)):
            rows.append(_feature_row(z[t - lags:t], series.month_at(t), p[t], lags))
            targets.append(z[t])
    features = np.asarray(rows)
    y = np.asarray(targets)

    n = len(y)
    gram = features.T @ features / n + ridge_lambda * np.eye(features.shape[1])
    weights = np.linalg.solve(gram, features.T @ y / n)
    if quantile is not None:
        q = float(quantile)
        if not 0.0 < q < 1.0:
            raise ValueError(f"quantile must lie in (0, 1), got {q}")
        weights = fit_pinball(features, y, q, init=weights)
    return GlobalARParams(weights=weights, lags=lags, scales=scales,
                          price_scales=price_scales,
                          quantile=None if quantile is None else float(quantile))


def predict_global_ar(params: GlobalARParams, series: MonthlySeries, origin: date,
                      horizon: int, future_prices) -> Forecast:
    """Recursive multi-step forecast for one series.

    Each step's raw normalized prediction is appended to the lag window
    for the next step; only the final values are rescaled and clamped.
    Reads nothing from the series after ``origin``.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    future_prices = np.asarray(future_prices, dtype=np.float64)
    if len(future_prices) != horizon:
        raise ValueError(f"expected {horizon} future prices, got {len(future_prices)}")
    if series.key not in params.scales:
        raise KeyError(f"no scale for series {series.key}; it was not part of the global fit")
    origin_idx = series.index_of(origin)
    if origin_idx + 1 < params.lags:
        raise ValueError(f"series {series.key} has only {origin_idx + 1} months at origin; "
                         f"need >= {params.lags}")

    scale = params.scales[series.key]
    price_scale = params.price_scales[series.key]
    window = list(series.quantities[origin_idx + 1 - params.lags:origin_idx + 1] / scale)
    raw = np.empty(horizon)
    for h in range(1, horizon + 1):
        row = _feature_row(np.asarray(window[-params.lags:]), add_months(origin, h),
                           future_prices[h - 1] / price_scale, params.lags)
        raw[h - 1] = row @ params.weights
        window.append(raw[h - 1])
    return Forecast(origin=origin, horizon=horizon, values=np.maximum(raw * scale, 0.0),
                    quantile_tag=params.quantile)


__all__ = [
    "GlobalARParams", "fit_global_ar", "predict_global_ar",
    "DEFAULT_LAGS", "DEFAULT_RIDGE_LAMBDA", "SCALE_FLOOR",
]
