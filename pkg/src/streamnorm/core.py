"""Value types and the per-window math shared by every strategy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


class StreamNormError(Exception):
    """Base class for all library errors."""


class UsageError(StreamNormError):
    """An operation was called with arguments violating its contract."""


class ConfigError(UsageError):
    """A strategy or pipeline configuration is invalid."""


class DataError(StreamNormError):
    """Input data could not be parsed or is inconsistent."""


@dataclass(frozen=True, slots=True)
class Sample:
    """One stream element: its 0-based position and one value per attribute."""

    ordinal: int
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.ordinal < 0:
            raise UsageError(f"negative ordinal {self.ordinal}")
        for v in self.values:
            if not math.isfinite(v):
                raise DataError(f"non-finite value {v!r} at ordinal {self.ordinal}")

    @property
    def arity(self) -> int:
        return len(self.values)


@dataclass(frozen=True, slots=True)
class NormalizedSample:
    ordinal: int
    values: tuple[float, ...]


@dataclass(frozen=True, slots=True)
class Window:
    """A run of consecutive samples; ``id`` is 1-based."""

    id: int
    samples: tuple[Sample, ...]

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def arity(self) -> int:
        return self.samples[0].arity if self.samples else 0

    def columns(self) -> list[list[float]]:
        """Values transposed to one list per attribute."""
        return [list(col) for col in zip(*(s.values for s in self.samples))]


@dataclass(frozen=True, slots=True)
class RefParams:
    """Reference range for one attribute."""

    refmin: float
    refmax: float

    def __post_init__(self) -> None:
        if not self.refmin <= self.refmax:
            raise UsageError(f"refmin {self.refmin} > refmax {self.refmax}")


@dataclass(frozen=True, slots=True)
class ColumnStats:
    min: float
    max: float
    mean: float


def column_stats(values: Sequence[float]) -> ColumnStats:
    """Min, max and mean of one attribute's values within a window.

    The mean is ``fsum / count``, clamped into ``[min, max]`` so rounding can
    never push it outside the extrema. Windows are bounded by the window
    size, so no further compensation is attempted.
    """
    if not values:
        raise UsageError("statistics of an empty window")
    lo = min(values)
    hi = max(values)
    mean = math.fsum(values) / len(values)
    if mean < lo:
        mean = lo
    elif mean > hi:
        mean = hi
    return ColumnStats(lo, hi, mean)


def compute_window_stats(window: Window) -> tuple[ColumnStats, ...]:
    """Per-attribute statistics of ``window``."""
    if not window.samples:
        raise UsageError("statistics of an empty window")
    return tuple(column_stats(col) for col in window.columns())


def minmax_normalize(x: float, params: RefParams) -> float:
    """Map ``x`` affinely so that refmin -> 0 and refmax -> 1.

    A degenerate range (refmin == refmax) maps everything to 0.5.
    """
    span = params.refmax - params.refmin
    if span == 0:
        return 0.5
    return (x - params.refmin) / span


def normalize_column(values: Sequence[float], refmin: float, refmax: float) -> list[float]:
    # same arithmetic as minmax_normalize, hoisted for the hot path
    span = refmax - refmin
    if span == 0:
        return [0.5] * len(values)
    return [(x - refmin) / span for x in values]


def percent_mean_change(mean_cur: float, mean_prev: float) -> float:
    """Relative change of consecutive window means, ``|cur - prev| / |prev|``.

    Returns ``inf`` when the previous mean is zero and the current one is
    not, and 0.0 when both are zero.
    """
    if mean_prev == 0:
        return 0.0 if mean_cur == 0 else math.inf
    return abs(mean_cur - mean_prev) / abs(mean_prev)
