"""Seasonal naive baseline: repeat the value from twelve months earlier."""

from __future__ import annotations

from datetime import date

import numpy as np

from ..dataset import MonthlySeries
from .base import Forecast

SEASON_LAG = 12


def seasonal_naive(series: MonthlySeries, origin: date, horizon: int) -> Forecast:
    """Forecast month origin+h with the quantity at origin+h-12.

    When that month precedes the series start, the last observed value
    stands in.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    origin_idx = series.index_of(origin)
    values = np.empty(horizon)
    for h in range(1, horizon + 1):
        source = origin_idx + h - SEASON_LAG
        values[h - 1] = series.quantities[source] if source >= 0 else series.quantities[origin_idx]
    return Forecast(origin=origin, horizon=horizon, values=values)


__all__ = ["seasonal_naive", "SEASON_LAG"]
