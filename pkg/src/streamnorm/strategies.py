"""The five window normalization strategies.

Every strategy keeps independent state per attribute: a reference range
(refmin, refmax) and the previous window's mean. Methods differ only in how
the reference range evolves from one window to the next:

1. known range, fixed for the whole stream (the ground-truth baseline)
2. first window's range, frozen forever
3. each window's own range
4. replaced on a significant mean change, otherwise left untouched
5. replaced on a significant mean change, otherwise widened to cover the
   current window (the adaptive method)

A change is significant when ``percent_mean_change >= threshold``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from streamnorm.core import (
    ConfigError,
    NormalizedSample,
    RefParams,
    UsageError,
    Window,
    column_stats,
    normalize_column,
    percent_mean_change,
)

DEFAULT_THRESHOLD = 0.5


class Method(enum.IntEnum):
    KNOWN_RANGE = 1
    FIRST_WINDOW_FIXED = 2
    PER_WINDOW = 3
    SIGNIFICANT_ONLY = 4
    ADAPTIVE = 5


class EventKind(str, enum.Enum):
    REPLACE = "replace"
    WIDEN = "widen"
    NONE = "none"


@dataclass(frozen=True)
class StrategyConfig:
    method: Method
    threshold: float = DEFAULT_THRESHOLD
    known_range: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "method", Method(self.method))
        except ValueError:
            raise ConfigError(f"unknown method {self.method!r}; expected 1-5") from None
        if math.isnan(self.threshold) or self.threshold < 0:
            raise ConfigError(f"threshold must be >= 0, got {self.threshold}")
        if self.known_range is not None:
            pairs = tuple((float(lo), float(hi)) for lo, hi in self.known_range)
            object.__setattr__(self, "known_range", pairs)
        if self.method is Method.KNOWN_RANGE:
            if not self.known_range:
                raise ConfigError("method 1 requires a known range per attribute")
            for j, (lo, hi) in enumerate(self.known_range):
                if not lo < hi:
                    raise ConfigError(f"known range for attribute {j} is empty: [{lo}, {hi}]")

    def to_dict(self) -> dict:
        return {
            "method": int(self.method),
            "threshold": self.threshold,
            "known_range": [list(p) for p in self.known_range] if self.known_range else None,
        }


@dataclass(frozen=True)
class AttributeState:
    ref: RefParams | None = None
    prev_mean: float | None = None


@dataclass(frozen=True)
class StrategyState:
    attributes: tuple[AttributeState, ...] = ()
    windows_seen: int = 0

    @property
    def ref_params(self) -> tuple[RefParams, ...] | None:
        if not self.attributes or any(a.ref is None for a in self.attributes):
            return None
        return tuple(a.ref for a in self.attributes)

    @property
    def prev_mean(self) -> tuple[float, ...] | None:
        if not self.attributes or any(a.prev_mean is None for a in self.attributes):
            return None
        return tuple(a.prev_mean for a in self.attributes)


@dataclass(frozen=True)
class AdaptationEvent:
    window_id: int
    attribute: int
    kind: EventKind
    old_params: RefParams
    new_params: RefParams
    observed_change: float

    def to_dict(self) -> dict:
        change = self.observed_change
        return {
            "window_id": self.window_id,
            "attribute": self.attribute,
            "kind": self.kind.value,
            "old_min": self.old_params.refmin,
            "old_max": self.old_params.refmax,
            "new_min": self.new_params.refmin,
            "new_max": self.new_params.refmax,
            # JSON has no infinity
            "observed_change": change if math.isfinite(change) else None,
        }


def step_column(
    method: Method,
    state: AttributeState,
    values: Sequence[float],
    *,
    window_id: int,
    attribute: int = 0,
    threshold: float = DEFAULT_THRESHOLD,
    known: RefParams | None = None,
) -> tuple[list[float], AttributeState, AdaptationEvent | None]:
    """Advance one attribute's state by one window and normalize its values.

    An event is returned only by methods 4 and 5, and only from the second
    window on.
    """
    if method is Method.KNOWN_RANGE:
        if known is None:
            raise ConfigError("method 1 requires a known range")
        return normalize_column(values, known.refmin, known.refmax), state, None

    stats = column_stats(values)
    own = RefParams(stats.min, stats.max)
    event = None

    if state.ref is None:
        ref = own
    elif method is Method.FIRST_WINDOW_FIXED:
        ref = state.ref
    elif method is Method.PER_WINDOW:
        ref = own
    else:
        old = state.ref
        change = percent_mean_change(stats.mean, state.prev_mean)
        if change >= threshold:
            ref, kind = own, EventKind.REPLACE
        elif method is Method.SIGNIFICANT_ONLY:
            ref, kind = old, EventKind.NONE
        else:
            ref = RefParams(min(stats.min, old.refmin), max(stats.max, old.refmax))
            kind = EventKind.NONE if ref == old else EventKind.WIDEN
        event = AdaptationEvent(window_id, attribute, kind, old, ref, change)

    out = normalize_column(values, ref.refmin, ref.refmax)
    return out, AttributeState(ref, stats.mean), event


def _process(
    method: Method,
    state: StrategyState,
    window: Window,
    threshold: float = DEFAULT_THRESHOLD,
    known_range: Sequence[tuple[float, float]] | None = None,
) -> tuple[list[NormalizedSample], StrategyState, list[AdaptationEvent]]:
    if not window.samples:
        raise UsageError("cannot normalize an empty window")
    columns = window.columns()
    if known_range is not None and len(known_range) != len(columns):
        raise ConfigError(
            f"known range has {len(known_range)} attributes, stream has {len(columns)}"
        )
    attrs = state.attributes or (AttributeState(),) * len(columns)
    if len(attrs) != len(columns):
        raise UsageError(f"state tracks {len(attrs)} attributes, window has {len(columns)}")

    out_cols = []
    new_attrs = []
    events = []
    for j, col in enumerate(columns):
        known = RefParams(*known_range[j]) if known_range is not None else None
        out, attr_state, event = step_column(
            method, attrs[j], col,
            window_id=window.id, attribute=j, threshold=threshold, known=known,
        )
        out_cols.append(out)
        new_attrs.append(attr_state)
        if event is not None:
            events.append(event)

    normalized = [
        NormalizedSample(s.ordinal, tuple(vals))
        for s, vals in zip(window.samples, zip(*out_cols))
    ]
    new_state = StrategyState(tuple(new_attrs), state.windows_seen + 1)
    return normalized, new_state, events


def process_window_method1(state, window, known_range):
    """Normalize with a range fixed in advance; state only counts windows."""
    if known_range is None:
        raise ConfigError("method 1 requires a known range")
    out, new_state, _ = _process(Method.KNOWN_RANGE, state, window, known_range=known_range)
    return out, new_state


def process_window_method2(state, window):
    out, new_state, _ = _process(Method.FIRST_WINDOW_FIXED, state, window)
    return out, new_state


def process_window_method3(state, window):
    out, new_state, _ = _process(Method.PER_WINDOW, state, window)
    return out, new_state


def process_window_method4(state, window, threshold):
    return _process(Method.SIGNIFICANT_ONLY, state, window, threshold)


def process_window_method5(state, window, threshold):
    return _process(Method.ADAPTIVE, state, window, threshold)


@dataclass
class Strategy:
    """Stateful per-stream processor for one :class:`StrategyConfig`.

    Windows must arrive in id order. Attribute states are disjoint, so a
    handle may be restricted to a subset of attributes (see
    :meth:`process_columns`) and several handles can cover one stream.
    """

    config: StrategyConfig
    states: dict[int, AttributeState] = field(default_factory=dict)
    windows_seen: int = 0

    def _known(self, attribute: int) -> RefParams | None:
        kr = self.config.known_range
        if self.config.method is not Method.KNOWN_RANGE:
            return None
        if attribute >= len(kr):
            raise ConfigError(
                f"known range has {len(kr)} attributes, stream has at least {attribute + 1}"
            )
        return RefParams(*kr[attribute])

    def process_columns(
        self,
        window_id: int,
        columns: Sequence[Sequence[float]],
        attributes: Sequence[int] | None = None,
    ) -> tuple[list[list[float]], list[AdaptationEvent]]:
        """Normalize one window given as per-attribute columns.

        ``attributes`` names the attribute index of each column; it defaults
        to ``0..len(columns)-1``.
        """
        if attributes is None:
            attributes = range(len(columns))
        method = self.config.method
        threshold = self.config.threshold
        out_cols = []
        events = []
        for j, col in zip(attributes, columns):
            out, self.states[j], event = step_column(
                method, self.states.get(j, _EMPTY), col,
                window_id=window_id, attribute=j, threshold=threshold, known=self._known(j),
            )
            out_cols.append(out)
            if event is not None:
                events.append(event)
        self.windows_seen += 1
        return out_cols, events

    def process(self, window: Window) -> tuple[list[NormalizedSample], list[AdaptationEvent]]:
        if not window.samples:
            raise UsageError("cannot normalize an empty window")
        if self.config.method is Method.KNOWN_RANGE and len(self.config.known_range) != window.arity:
            raise ConfigError(
                f"known range has {len(self.config.known_range)} attributes, "
                f"stream has {window.arity}"
            )
        out_cols, events = self.process_columns(window.id, window.columns())
        normalized = [
            NormalizedSample(s.ordinal, vals)
            for s, vals in zip(window.samples, zip(*out_cols))
        ]
        return normalized, events

    @property
    def state(self) -> StrategyState:
        attrs = tuple(self.states[j] for j in sorted(self.states))
        return StrategyState(attrs, self.windows_seen)

    def reset(self) -> None:
        self.states.clear()
        self.windows_seen = 0


_EMPTY = AttributeState()


def make_strategy(config: StrategyConfig) -> Strategy:
    if not isinstance(config, StrategyConfig):
        raise ConfigError(f"expected StrategyConfig, got {type(config).__name__}")
    return Strategy(replace(config))
