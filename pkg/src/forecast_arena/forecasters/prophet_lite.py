"""Per-series additive decomposable forecaster.

Models quantity as trend + seasonality + holiday effect + price term:
a piecewise-linear trend with a fixed set of slope changepoints, Fourier
seasonality at the 12-month base period, additive per-holiday effects
keyed on monthly day counts, and the standardized unit price as a
regressor. Coefficients come from a single ridge-regularized
least-squares solve, so fits are fast, closed-form, and deterministic.

The slope and offset of the base trend are never penalized; everything
else shrinks toward zero with strength ``ridge_lambda``.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ..dataset import HolidayCalendar, MonthlySeries
from ..months import add_months, months_between
from .base import Forecast, ForecasterSpec
from .components import fourier_features, trend_value

MIN_TRAIN_MONTHS = 18
SEASON_PERIOD = 12.0
DEFAULT_FOURIER_ORDER = 3
DEFAULT_RIDGE_LAMBDA = 1.0
MAX_CHANGEPOINTS = 5
CHANGEPOINT_RANGE = 0.8  # changepoints live in the first 80% of training months


@dataclass(frozen=True)
class ProphetLiteParams:
    """Fitted coefficients of the additive model.

    ``t`` counts months with t=0 at ``train_origin`` (the first training
    month). ``price_mean``/``price_scale`` freeze the training-window
    standardization so prediction applies the identical transform.
    """

    k: float
    m: float
    changepoints: tuple[float, ...]
    deltas: tuple[float, ...]
    fourier_a: tuple[float, ...]
    fourier_b: tuple[float, ...]
    holiday_effects: dict[str, float]
    beta_price: float
    price_mean: float
    price_scale: float
    train_origin: date

    @property
    def fourier_order(self) -> int:
        return len(self.fourier_a)

    def to_dict(self) -> dict:
        return {
            "kind": "prophet_lite",
            "k": self.k,
            "m": self.m,
            "changepoints": list(self.changepoints),
            "deltas": list(self.deltas),
            "fourier_a": list(self.fourier_a),
            "fourier_b": list(self.fourier_b),
            "holiday_effects": dict(sorted(self.holiday_effects.items())),
            "beta_price": self.beta_price,
            "price_mean": self.price_mean,
            "price_scale": self.price_scale,
            "train_origin": self.train_origin.isoformat(),
        }


def default_changepoint_count(n_train: int) -> int:
    return min(MAX_CHANGEPOINTS, n_train // 6)


def place_changepoints(n_train: int, count: int) -> np.ndarray:
    """Interior uniform quantiles of the first 80% of training months."""
    window = int(np.floor(CHANGEPOINT_RANGE * n_train))
    if count <= 0 or window < 2:
        return np.empty(0)
    return (window - 1) * np.arange(1, count + 1) / (count + 1)


def _interleave(cos_coefs: np.ndarray, sin_coefs: np.ndarray) -> np.ndarray:
    out = np.empty(2 * len(cos_coefs))
    out[0::2] = cos_coefs
    out[1::2] = sin_coefs
    return out


def _design_row_count(order: int, changepoints: np.ndarray, holiday_names: tuple[str, ...]) -> int:
    return 2 + len(changepoints) + 2 * order + len(holiday_names) + 1


def _design_matrix(t: np.ndarray, months: list[date], prices_std: np.ndarray,
                   changepoints: np.ndarray, order: int,
                   holiday_names: tuple[str, ...], calendar: HolidayCalendar) -> np.ndarray:
    n = len(t)
    design = np.empty((n, _design_row_count(order, changepoints, holiday_names)))
    design[:, 0] = 1.0
    design[:, 1] = t
    col = 2
    if len(changepoints):
        design[:, col:col + len(changepoints)] = np.maximum(0.0, t[:, None] - changepoints[None, :])
        col += len(changepoints)
    design[:, col:col + 2 * order] = fourier_features(t, order, SEASON_PERIOD)
    col += 2 * order
    for name in holiday_names:
        design[:, col] = [calendar.counts_in_month(m).get(name, 0) for m in months]
        col += 1
    design[:, col] = prices_std
    return design


def fit_prophet_lite(series: MonthlySeries, calendar: HolidayCalendar,
                     spec: ForecasterSpec) -> ProphetLiteParams:
    """Fit the additive model to one series by penalized least squares.

    Minimizes sum((y - yhat)^2) + lambda * ||penalized coefficients||^2
    where the base slope and offset stay unpenalized. Solved through the
    normal equations with a Cholesky factorization; with lambda > 0 the
    system is positive definite by construction.
    """
    n = len(series)
    if n < MIN_TRAIN_MONTHS:
        raise ValueError(f"series {series.key} too short to fit: {n} < {MIN_TRAIN_MONTHS} months")
    order = int(spec.get("fourier_order", DEFAULT_FOURIER_ORDER))
    ridge_lambda = float(spec.get("ridge_lambda", DEFAULT_RIDGE_LAMBDA))
    count = spec.get("changepoint_count")
    count = default_changepoint_count(n) if count is None else int(count)
    if ridge_lambda < 0:
        raise ValueError("ridge_lambda must be >= 0")

    changepoints = place_changepoints(n, count)
    t = np.arange(n, dtype=np.float64)
    months = [series.month_at(i) for i in range(n)]
    price_mean = float(series.prices.mean())
    price_std = float(series.prices.std())
    price_scale = price_std if price_std > 0 else 1.0
    prices_std = (series.prices - price_mean) / price_scale
    holiday_names = calendar.names

    design = _design_matrix(t, months, prices_std, changepoints, order, holiday_names, calendar)
    penalty = np.full(design.shape[1], ridge_lambda)
    penalty[:2] = 0.0  # k and m are never shrunk

    gram = design.T @ design + np.diag(penalty)
    try:
        coefs = cho_solve(cho_factor(gram), design.T @ series.quantities)
    except np.linalg.LinAlgError as exc:
        assert ridge_lambda == 0.0, "regularized normal equations cannot be singular"
        raise ValueError(f"singular design matrix for {series.key}; use ridge_lambda > 0") from exc

    col = 2 + len(changepoints)
    fourier = coefs[col:col + 2 * order]
    col += 2 * order
    effects = {name: float(coefs[col + i]) for i, name in enumerate(holiday_names)}
    return ProphetLiteParams(
        k=float(coefs[1]),
        m=float(coefs[0]),
        changepoints=tuple(changepoints),
        deltas=tuple(coefs[2:2 + len(changepoints)]),
        fourier_a=tuple(fourier[0::2]),
        fourier_b=tuple(fourier[1::2]),
        holiday_effects=effects,
        beta_price=float(coefs[-1]),
        price_mean=price_mean,
        price_scale=price_scale,
        train_origin=series.start_month,
    )


def predict_prophet_lite(params: ProphetLiteParams, origin: date, horizon: int,
                         future_prices, calendar: HolidayCalendar) -> Forecast:
    """Evaluate the additive sum for origin+1 .. origin+horizon, clamped at 0.

    Month indices continue the training clock, so the trend simply
    extends its last linear segment: no changepoints exist past the
    training window.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    future_prices = np.asarray(future_prices, dtype=np.float64)
    if len(future_prices) != horizon:
        raise ValueError(f"expected {horizon} future prices, got {len(future_prices)}")
    if origin < params.train_origin:
        raise ValueError("origin precedes the training window")

    offset = months_between(origin, params.train_origin)
    t = np.arange(offset + 1, offset + horizon + 1, dtype=np.float64)
    values = trend_value(params.k, params.m, params.changepoints, params.deltas, t)
    if params.fourier_order:
        values = values + fourier_features(t, params.fourier_order, SEASON_PERIOD) \
            @ _interleave(np.array(params.fourier_a), np.array(params.fourier_b))
    for h in range(horizon):
        month = add_months(origin, h + 1)
        counts = calendar.counts_in_month(month)
        values[h] += sum(effect * counts.get(name, 0)
                         for name, effect in params.holiday_effects.items())
    values = values + params.beta_price * (future_prices - params.price_mean) / params.price_scale
    return Forecast(origin=origin, horizon=horizon, values=np.maximum(values, 0.0))


__all__ = [
    "ProphetLiteParams", "fit_prophet_lite", "predict_prophet_lite",
    "place_changepoints", "default_changepoint_count",
    "MIN_TRAIN_MONTHS", "DEFAULT_FOURIER_ORDER", "DEFAULT_RIDGE_LAMBDA",
]
