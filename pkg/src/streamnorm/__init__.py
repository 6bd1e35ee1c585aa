"""Adaptive min-max normalization for unbounded numeric streams."""

from streamnorm.core import (
    ColumnStats,
    ConfigError,
    DataError,
    NormalizedSample,
    RefParams,
    Sample,
    StreamNormError,
    UsageError,
    Window,
    compute_window_stats,
    minmax_normalize,
    percent_mean_change,
)
from streamnorm.strategies import (
    AdaptationEvent,
    EventKind,
    Method,
    Strategy,
    StrategyConfig,
    make_strategy,
)
from streamnorm.windowing import WindowAssembler, tumbling_windows

__all__ = [
    "AdaptationEvent",
    "ColumnStats",
    "ConfigError",
    "DataError",
    "EventKind",
    "Method",
    "NormalizedSample",
    "RefParams",
    "Sample",
    "Strategy",
    "StrategyConfig",
    "StreamNormError",
    "UsageError",
    "Window",
    "WindowAssembler",
    "compute_window_stats",
    "make_strategy",
    "minmax_normalize",
    "percent_mean_change",
    "tumbling_windows",
]

__version__ = "0.1.0"
