"""Fixed-size tumbling windows over an ordered sample stream."""

from __future__ import annotations

from typing import Iterable, Iterator

from streamnorm.core import Sample, UsageError, Window


class WindowAssembler:
    """Collects samples until ``size`` have arrived, then emits them as a window.

    Windows never overlap. Ids start at 1 and increase without gaps; a
    trailing partial window is only produced by :meth:`flush`.
    """

    def __init__(self, size: int) -> None:
        if size < 1:
            raise UsageError(f"window size must be positive, got {size}")
        self.size = size
        self.next_id = 1
        self._buffer: list[Sample] = []
        self._last_ordinal = -1
        self._arity: int | None = None

    @property
    def buffered(self) -> int:
        return len(self._buffer)

    def push(self, sample: Sample) -> Window | None:
        if sample.ordinal <= self._last_ordinal:
            raise UsageError(
                f"out-of-order sample: ordinal {sample.ordinal} after {self._last_ordinal}"
            )
        if self._arity is None:
            self._arity = sample.arity
        elif sample.arity != self._arity:
            raise UsageError(
                f"sample {sample.ordinal} has {sample.arity} values, stream has {self._arity}"
            )
        self._last_ordinal = sample.ordinal
        self._buffer.append(sample)
        if len(self._buffer) == self.size:
            return self._emit()
        return None

    def flush(self) -> Window | None:
        if not self._buffer:
            return None
        return self._emit()

    def _emit(self) -> Window:
        window = Window(self.next_id, tuple(self._buffer))
        self.next_id += 1
        self._buffer = []
        return window


def tumbling_windows(samples: Iterable[Sample], size: int) -> Iterator[Window]:
    """Yield every window of ``samples``, including the flushed remainder."""
    assembler = WindowAssembler(size)
    for sample in samples:
        window = assembler.push(sample)
        if window is not None:
            yield window
    tail = assembler.flush()
    if tail is not None:
        yield tail
