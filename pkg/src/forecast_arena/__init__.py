"""Monthly sales forecasting comparison harness.

Ingests item/org monthly quantity and price files, ranks items by
turnover, backtests three forecaster families with a rolling origin,
and reports monthly/quarterly WAPE analyses.
"""

__version__ = "0.1.0"

from .backtest import backtest_steps, run_backtest, run_suite, wape
from .dataset import DatasetBundle, MonthlySeries, SeriesKey, load_dataset
from .forecasters import Forecast, ForecasterSpec
from .portfolio import classify_series, importance_table, select_portfolio

__all__ = [
    "__version__",
    "DatasetBundle", "MonthlySeries", "SeriesKey", "load_dataset",
    "ForecasterSpec", "Forecast",
    "importance_table", "classify_series", "select_portfolio",
    "backtest_steps", "run_backtest", "run_suite", "wape",
]
