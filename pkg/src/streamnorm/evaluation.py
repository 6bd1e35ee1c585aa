"""Scoring normalized streams against the known-range baseline."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

from streamnorm.core import NormalizedSample, RefParams, Sample, UsageError
from streamnorm.pipeline import PipelineConfig, run
from streamnorm.strategies import (
    DEFAULT_THRESHOLD,
    Method,
    StrategyConfig,
    StrategyState,
    process_window_method1,
)
from streamnorm.windowing import tumbling_windows

OOB_TOLERANCE = 1e-12
COMPARED = (2, 3, 4, 5)


def rmse(a: Sequence[NormalizedSample], b: Sequence[NormalizedSample]) -> float:
    """Root mean squared difference over every element and attribute."""
    if len(a) != len(b):
        raise UsageError(f"length mismatch: {len(a)} vs {len(b)}")
    total = []
    count = 0
    for x, y in zip(a, b):
        if x.ordinal != y.ordinal:
            raise UsageError(f"misaligned ordinals {x.ordinal} and {y.ordinal}")
        if len(x.values) != len(y.values):
            raise UsageError(f"arity mismatch at ordinal {x.ordinal}")
        total.extend((u - v) ** 2 for u, v in zip(x.values, y.values))
        count += len(x.values)
    if count == 0:
        return 0.0
    return math.sqrt(math.fsum(total) / count)


def improvement(rmse_worst: float, rmse_k: float) -> float:
    """Percent reduction of ``rmse_k`` relative to ``rmse_worst``."""
    if not rmse_worst > 0:
        raise UsageError(f"reference rmse must be positive, got {rmse_worst}")
    return 100.0 * (rmse_worst - rmse_k) / rmse_worst


def out_of_bound_count(stream: Sequence[NormalizedSample], tol: float = OOB_TOLERANCE) -> int:
    """Number of values falling outside [0, 1] by more than ``tol``."""
    lo, hi = -tol, 1.0 + tol
    return sum(1 for s in stream for v in s.values if v < lo or v > hi)


def data_range(samples: Sequence[Sample]) -> tuple[tuple[float, float], ...]:
    """Per-attribute global (min, max) of a finite stream."""
    if not samples:
        raise UsageError("range of an empty stream")
    cols = zip(*(s.values for s in samples))
    return tuple((min(c), max(c)) for c in cols)


@dataclass
class EvalReport:
    dataset: str
    window_size: int
    threshold: float
    length: int
    arity: int
    known_range: tuple[tuple[float, float], ...]
    rmse: dict[int, float] = field(default_factory=dict)
    improvement: dict[int, float | None] = field(default_factory=dict)
    out_of_bound: dict[int, int] = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "window_size": self.window_size,
            "threshold": self.threshold,
            "length": self.length,
            "arity": self.arity,
            "known_range": [list(p) for p in self.known_range],
            "rmse_vs_baseline": {f"1vs{k}": v for k, v in self.rmse.items()},
            "improvement_percent_vs_method2": {str(k): v for k, v in self.improvement.items()},
            "out_of_bound_count": {str(k): v for k, v in self.out_of_bound.items()},
            **self.extra,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def table_row(self) -> dict:
        row = {
            "dataset": self.dataset,
            "window_size": self.window_size,
            "threshold": self.threshold,
            "length": self.length,
        }
        for k in COMPARED:
            row[f"1vs{k}"] = repr(self.rmse[k])
        imp = self.improvement.get(5)
        row["improvement_5_percent"] = "" if imp is None else f"{imp:.2f}"
        return row


TABLE_FIELDS = (
    "dataset", "window_size", "threshold", "length",
    "1vs2", "1vs3", "1vs4", "1vs5", "improvement_5_percent",
)


def table_csv(reports: Sequence[EvalReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TABLE_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.table_row())
    return buf.getvalue()


def sweep_csv(reports: Sequence[EvalReport]) -> str:
    """Long-format ``method,window_size,rmse`` rows for an RMSE-vs-N plot."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["method", "window_size", "threshold", "rmse"])
    for r in reports:
        for k in COMPARED:
            writer.writerow([k, r.window_size, r.threshold, repr(r.rmse[k])])
    return buf.getvalue()


def _baseline(samples, window_size, known_range) -> list[NormalizedSample]:
    # method 1 through the bare window function: a data-derived range may be
    # degenerate (constant stream), which StrategyConfig rejects
    state = StrategyState()
    out: list[NormalizedSample] = []
    for window in tumbling_windows(samples, window_size):
        normalized, state = process_window_method1(state, window, known_range)
        out.extend(normalized)
    return out


def run_comparison(
    samples: Sequence[Sample],
    window_size: int,
    threshold: float = DEFAULT_THRESHOLD,
    known_range: Sequence[tuple[float, float]] | None = None,
    *,
    dataset: str = "custom",
    parallelism: int = 1,
) -> EvalReport:
    """Run methods 1-5 over ``samples`` and score 2-5 against method 1.

    ``known_range`` defaults to the stream's own global extrema, found by a
    preliminary pass (the baseline is allowed to know them).
    """
    samples = list(samples)
    if not samples:
        raise UsageError("cannot compare on an empty stream")
    if known_range is None:
        known_range = data_range(samples)
    known_range = tuple((float(lo), float(hi)) for lo, hi in known_range)
    for lo, hi in known_range:
        RefParams(lo, hi)
    arity = samples[0].arity
    if len(known_range) != arity:
        raise UsageError(f"known range has {len(known_range)} attributes, stream has {arity}")

    outputs = {1: _baseline(samples, window_size, known_range)}
    for k in COMPARED:
        cfg = PipelineConfig(
            StrategyConfig(Method(k), threshold),
            window_size=window_size,
            parallelism=parallelism,
        )
        outputs[k] = run(cfg, samples).outputs

    report = EvalReport(
        dataset=dataset,
        window_size=window_size,
        threshold=threshold,
        length=len(samples),
        arity=arity,
        known_range=known_range,
    )
    for k in COMPARED:
        report.rmse[k] = rmse(outputs[k], outputs[1])
    for k in range(1, 6):
        report.out_of_bound[k] = out_of_bound_count(outputs[k])
    worst = report.rmse[2]
    for k in COMPARED:
        report.improvement[k] = improvement(worst, report.rmse[k]) if worst > 0 else None
    return report


def sweep_window_sizes(
    samples: Sequence[Sample],
    sizes: Sequence[int],
    threshold: float = DEFAULT_THRESHOLD,
    known_range: Sequence[tuple[float, float]] | None = None,
    **kwargs,
) -> list[EvalReport]:
    samples = list(samples)
    return [run_comparison(samples, n, threshold, known_range, **kwargs) for n in sizes]
