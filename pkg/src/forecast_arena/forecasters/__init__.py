"""Three forecaster families behind one configuration surface.

* ``prophet_lite`` — per-series additive trend/seasonality/holiday/price model.
* ``global_ar`` — one linear autoregression shared by all series, with
  per-series rescaling; an optional quantile switches the loss to pinball
  (reported as ``global_ar_q``).
* ``seasonal_naive`` — repeat last year's month, the comparison floor.
"""

from .base import Forecast, ForecasterSpec, KINDS
from .components import (
    PINBALL_EPOCHS,
    fit_pinball,
    fourier_features,
    holiday_features,
    pinball_loss,
    pinball_objective,
    trend_value,
)
from .global_ar import GlobalARParams, fit_global_ar, predict_global_ar
from .naive import seasonal_naive
from .prophet_lite import (
    MIN_TRAIN_MONTHS,
    ProphetLiteParams,
    fit_prophet_lite,
    place_changepoints,
    predict_prophet_lite,
)

__all__ = [
    "Forecast", "ForecasterSpec", "KINDS",
    "trend_value", "fourier_features", "holiday_features",
    "pinball_loss", "pinball_objective", "fit_pinball", "PINBALL_EPOCHS",
    "ProphetLiteParams", "fit_prophet_lite", "predict_prophet_lite",
    "place_changepoints", "MIN_TRAIN_MONTHS",
    "GlobalARParams", "fit_global_ar", "predict_global_ar",
    "seasonal_naive",
]
