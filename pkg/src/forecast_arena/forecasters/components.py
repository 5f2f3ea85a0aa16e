"""Building blocks shared by the forecaster families.

Piecewise-linear trend, Fourier seasonality terms, monthly holiday
counts, and the pinball (quantile) loss with its subgradient solver.
"""

from __future__ import annotations

import math
from datetime import date

import numpy as np

from ..dataset import HolidayCalendar

PINBALL_EPOCHS = 500
PINBALL_STEP = 0.1  # step at epoch e is PINBALL_STEP / sqrt(e)


def trend_value(k: float, m: float, changepoints, deltas, t) -> float | np.ndarray:
    """Continuous piecewise-linear trend.

    k*t + m plus one hinge per changepoint: delta_j * max(0, t - s_j).
    ``t`` may be a scalar or an array of month indices.
    """
    changepoints = np.asarray(changepoints, dtype=np.float64)
    deltas = np.asarray(deltas, dtype=np.float64)
    if changepoints.shape != deltas.shape:
        raise ValueError("changepoints and deltas must have equal length")
    t_arr = np.asarray(t, dtype=np.float64)
    value = k * t_arr + m
    if changepoints.size:
        hinges = np.maximum(0.0, t_arr[..., None] - changepoints)
        value = value + hinges @ deltas
    return value if t_arr.ndim else float(value)


def fourier_features(t, order: int, period: float = 12.0) -> np.ndarray:
    """Interleaved [cos, sin] pairs of harmonics 1..order at period ``period``.

    Scalar ``t`` gives shape (2*order,), array input shape (len(t), 2*order).
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if period <= 0:
        raise ValueError("period must be > 0")
    t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    angles = 2.0 * np.pi * np.outer(t_arr, np.arange(1, order + 1)) / period
    features = np.empty((len(t_arr), 2 * order))
    features[:, 0::2] = np.cos(angles)
    features[:, 1::2] = np.sin(angles)
    return features if np.ndim(t) else features[0]


def holiday_features(month: date, calendar: HolidayCalendar) -> dict[str, int]:
    """Count of each holiday's configured days falling inside ``month``."""
    return calendar.counts_in_month(month)


def pinball_loss(actual: float, predicted: float, q: float) -> float:
    """Quantile loss: q*(a-p) when under-predicting, (1-q)*(p-a) otherwise."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile must lie in (0, 1), got {q}")
    diff = actual - predicted
    return q * diff if diff >= 0 else (q - 1.0) * diff


def pinball_objective(weights: np.ndarray, features: np.ndarray, targets: np.ndarray,
                      q: float) -> tuple[float, np.ndarray]:
    """Mean pinball loss over rows and its subgradient w.r.t. the weights.

    At rows sitting exactly on the prediction (a kink) the subgradient
    contribution is 0, which is a valid choice for any q in (0, 1).
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile must lie in (0, 1), got {q}")
    residuals = targets - features @ weights
    loss = float(np.mean(np.where(residuals >= 0, q * residuals, (q - 1.0) * residuals)))
    dloss_dpred = np.where(residuals > 0, -q, np.where(residuals < 0, 1.0 - q, 0.0))
    grad = features.T @ dloss_dpred / len(targets)
    return loss, grad


def fit_pinball(features: np.ndarray, targets: np.ndarray, q: float,
                init: np.ndarray, epochs: int = PINBALL_EPOCHS) -> np.ndarray:
    """Deterministic full-batch subgradient descent on the mean pinball loss.

    Fixed schedule (0.1 / sqrt(epoch)); no randomness, so reruns are
    bitwise identical. ``init`` is normally the squared-loss solution.
    """
    weights = np.array(init, dtype=np.float64, copy=True)
    for epoch in range(1, epochs + 1):
        _, grad = pinball_objective(weights, features, targets, q)
        weights -= (PINBALL_STEP / math.sqrt(epoch)) * grad
    return weights


__all__ = [
    "trend_value", "fourier_features", "holiday_features",
    "pinball_loss", "pinball_objective", "fit_pinball",
    "PINBALL_EPOCHS", "PINBALL_STEP",
]
