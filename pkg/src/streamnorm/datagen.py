"""Synthetic drift streams and CSV ingestion."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from streamnorm.core import ConfigError, DataError, Sample

DEFAULT_SEGMENTS = ((1.0, 5.0), (1.0, 10.0), (30.0, 50.0), (30.0, 60.0))
DEFAULT_SIZE = 160_000
GENERATOR_NAME = "PCG64"

# numeric columns of the electricity market dataset (date and class dropped)
ELEC2_COLUMNS = ("nswprice", "nswdemand", "vicprice", "vicdemand", "transfer")


@dataclass(frozen=True)
class SyntheticSpec:
    total_size: int = DEFAULT_SIZE
    segments: tuple[tuple[float, float], ...] = DEFAULT_SEGMENTS
    seed: int = 0

    def __post_init__(self) -> None:
        if self.total_size < 1:
            raise ConfigError(f"total_size must be positive, got {self.total_size}")
        if not self.segments:
            raise ConfigError("at least one segment is required")
        for lo, hi in self.segments:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ConfigError(f"invalid segment range [{lo}, {hi}]")

    def segment_sizes(self) -> list[int]:
        """Equal split; the last segment absorbs any remainder."""
        k = len(self.segments)
        base = self.total_size // k
        return [base] * (k - 1) + [self.total_size - base * (k - 1)]

    @property
    def global_range(self) -> tuple[float, float]:
        return (min(lo for lo, _ in self.segments), max(hi for _, hi in self.segments))

    def describe(self) -> str:
        segs = ",".join(f"{lo:g}:{hi:g}" for lo, hi in self.segments)
        return f"seed={self.seed} segments={segs} size={self.total_size} generator={GENERATOR_NAME}"


def synthetic_values(spec: SyntheticSpec) -> np.ndarray:
    """The synthetic stream as a flat float64 array."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    parts = [
        rng.uniform(lo, hi, size)
        for (lo, hi), size in zip(spec.segments, spec.segment_sizes())
    ]
    return np.concatenate(parts)


def generate_synthetic(spec: SyntheticSpec) -> Iterator[Sample]:
    """Yield the single-attribute drift stream described by ``spec``.

    Each segment is drawn uniformly from its range, segments follow each
    other in the order given, and the same seed always yields the same
    stream.
    """
    for i, v in enumerate(synthetic_values(spec).tolist()):
        yield Sample(i, (v,))


def parse_segments(text: str) -> tuple[tuple[float, float], ...]:
    """Parse ``"1:5,1:10"`` into ``((1.0, 5.0), (1.0, 10.0))``."""
    try:
        pairs = []
        for item in text.split(","):
            lo, hi = item.split(":")
            pairs.append((float(lo), float(hi)))
    except ValueError:
        raise ConfigError(f"bad segment list {text!r}; expected lo:hi,lo:hi,...") from None
    return tuple(pairs)


def write_synthetic_csv(spec: SyntheticSpec, path: str | os.PathLike) -> int:
    """Write the stream as single-column CSV with a ``# seed=...`` comment line."""
    values = synthetic_values(spec)
    with open(path, "w", newline="") as fh:
        fh.write(f"# {spec.describe()}\n")
        for v in values.tolist():
            fh.write(f"{v!r}\n")
    return len(values)


@dataclass(frozen=True)
class CsvIngestSpec:
    """How to read a CSV file into samples.

    ``keep_columns`` holds column indices or header names; empty means every
    column. Names require ``has_header``. Lines starting with ``#`` are
    skipped.
    """

    path: Path
    keep_columns: tuple[int | str, ...] = field(default=())
    has_header: bool = False


def _resolve_columns(keep: Sequence[int | str], header: list[str] | None, width: int) -> list[int]:
    if not keep:
        return list(range(width))
    idx = []
    for col in keep:
        if isinstance(col, str) and not col.lstrip("-").isdigit():
            if header is None:
                raise ConfigError(f"column name {col!r} given but file has no header")
            names = [h.strip() for h in header]
            if col not in names:
                raise DataError(f"column {col!r} not in header {names}")
            idx.append(names.index(col))
        else:
            i = int(col)
            if not 0 <= i < width:
                raise DataError(f"column index {i} out of range for {width} columns")
            idx.append(i)
    return idx


def load_csv(spec: CsvIngestSpec) -> Iterator[Sample]:
    """Yield one sample per data row, taking values from the kept columns."""
    path = Path(spec.path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror}") from exc
    with fh:
        rows = csv.reader(line for line in fh if line.strip() and not line.startswith("#"))
        header = None
        if spec.has_header:
            header = next(rows, None)
            if header is None:
                return
        columns = None
        width = None
        ordinal = 0
        for lineno, row in enumerate(rows, start=1):
            if width is None:
                width = len(header) if header is not None else len(row)
                columns = _resolve_columns(spec.keep_columns, header, width)
            if len(row) != width:
                raise DataError(f"data row {lineno}: expected {width} columns, found {len(row)}")
            values = []
            for c in columns:
                cell = row[c].strip()
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(f"data row {lineno}, column {c}: cannot parse {cell!r}") from None
                if not math.isfinite(v):
                    raise DataError(f"data row {lineno}, column {c}: non-finite value {cell!r}")
                values.append(v)
            yield Sample(ordinal, tuple(values))
            ordinal += 1


def generate_synthetic_multi(spec: SyntheticSpec, attributes: int) -> Iterator[Sample]:
    """Several independent drift streams side by side.

    Attribute ``j`` is the single-attribute stream for seed ``spec.seed + j``.
    """
    if attributes < 1:
        raise ConfigError(f"attributes must be positive, got {attributes}")
    cols = [
        synthetic_values(SyntheticSpec(spec.total_size, spec.segments, spec.seed + j)).tolist()
        for j in range(attributes)
    ]
    for i, vals in enumerate(zip(*cols)):
        yield Sample(i, vals)
