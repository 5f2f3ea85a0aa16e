"""Forecaster configuration and the common forecast container."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from types import MappingProxyType
from typing import Any, Mapping

import numpy as np

KINDS = ("prophet_lite", "global_ar", "seasonal_naive")

_ALLOWED_HYPERPARAMETERS: dict[str, frozenset[str]] = {
    "prophet_lite": frozenset({"fourier_order", "changepoint_count", "ridge_lambda"}),
    "global_ar": frozenset({"lags", "ridge_lambda", "quantile"}),
    "seasonal_naive": frozenset(),
}


@dataclass(frozen=True)
class ForecasterSpec:
    """One configured forecaster: kind, hyperparameters, seed, report label.

    Unknown hyperparameter keys are rejected up front so a typo in a
    config file fails loudly instead of silently running defaults.
    """

    kind: str
    hyperparameters: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0
    label: str = ""

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown forecaster kind {self.kind!r}; expected one of {KINDS}")
        unknown = set(self.hyperparameters) - _ALLOWED_HYPERPARAMETERS[self.kind]
        if unknown:
            raise ValueError(f"unknown hyperparameters for {self.kind}: {sorted(unknown)}")
        object.__setattr__(self, "hyperparameters",
                           MappingProxyType(dict(self.hyperparameters)))
        if not self.label:
            object.__setattr__(self, "label", self._default_label())

    def _default_label(self) -> str:
        if self.kind == "global_ar" and self.hyperparameters.get("quantile") is not None:
            return "global_ar_q"
        return self.kind

    def get(self, name: str, default: Any = None) -> Any:
        return self.hyperparameters.get(name, default)


@dataclass(eq=False)
class Forecast:
    """Point forecast for the ``horizon`` months after ``origin``.

    ``values[h-1]`` is the prediction for origin+h; all values are
    clamped to >= 0 because negative quantities cannot be sold.
    """

    origin: date
    horizon: int
    values: np.ndarray
    quantile_tag: float | None = None

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if len(self.values) != self.horizon:
            raise ValueError(f"expected {self.horizon} values, got {len(self.values)}")
        if np.any(self.values < 0):
            raise ValueError("forecast values must be clamped to >= 0")


__all__ = ["ForecasterSpec", "Forecast", "KINDS"]
