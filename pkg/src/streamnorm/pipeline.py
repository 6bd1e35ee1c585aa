"""In-process streaming pipeline: ingest -> window -> normalize -> sink.

With ``parallelism == 1`` everything runs inline in the caller's thread.
With more workers, attributes are sharded across worker processes (each
shard owns the strategy state of its attributes, so windows of one attribute
are still processed strictly in order) and ingest/windowing runs in a feeder
thread overlapping with normalization and with the caller consuming output.
Stages are connected by bounded queues; a full queue blocks its producer.
"""

from __future__ import annotations

import gc
import itertools
import json
import logging
import multiprocessing as mp
import queue
import statistics
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, NamedTuple, Sequence

from streamnorm.core import ConfigError, NormalizedSample, Sample, UsageError, Window
from streamnorm.datagen import SyntheticSpec, generate_synthetic
from streamnorm.strategies import AdaptationEvent, Strategy, StrategyConfig
from streamnorm.windowing import WindowAssembler

log = logging.getLogger(__name__)

_DONE = "done"
_ERROR = "error"
_POLL = 0.1


@dataclass(frozen=True)
class PipelineConfig:
    strategy: StrategyConfig
    window_size: int = 50
    parallelism: int = 1
    session_limit: float | None = None
    queue_depth: int = 8
    batch_points: int = 4096

    def __post_init__(self) -> None:
        if self.window_size < 1:
            raise ConfigError(f"window_size must be positive, got {self.window_size}")
        if self.parallelism < 1:
            raise ConfigError(f"parallelism must be >= 1, got {self.parallelism}")
        if self.session_limit is not None and not self.session_limit > 0:
            raise ConfigError(f"session_limit must be positive, got {self.session_limit}")
        if self.queue_depth < 1 or self.batch_points < 1:
            raise ConfigError("queue_depth and batch_points must be positive")

    def to_dict(self) -> dict:
        return {
            **self.strategy.to_dict(),
            "window_size": self.window_size,
            "parallelism": self.parallelism,
            "session_limit": self.session_limit,
        }


@dataclass
class BenchReport:
    """Timing of one pipeline run.

    ``elapsed`` spans the first source pull to the last output handed to the
    consumer; ``total_execution_time`` additionally covers worker start-up
    and shutdown. Latency per window runs from the moment the window is
    emitted by the assembler until its last element is normalized.
    """

    points_processed: int = 0
    elapsed: float = 0.0
    per_window_latency: list[tuple[int, float]] = field(default_factory=list)
    total_execution_time: float = 0.0

    @property
    def throughput(self) -> float:
        return self.points_processed / self.elapsed if self.elapsed > 0 else 0.0

    def median_latency(self) -> float:
        if not self.per_window_latency:
            return 0.0
        return statistics.median(d for _, d in self.per_window_latency)

    def to_dict(self) -> dict:
        return {
            "points_processed": self.points_processed,
            "elapsed_seconds": self.elapsed,
            "throughput_pps": self.throughput,
            "latency_per_window": [[wid, d] for wid, d in self.per_window_latency],
            "total_execution_seconds": self.total_execution_time,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def csv_row(self) -> dict:
        """Flat summary suitable for ``csv.DictWriter``."""
        return {
            "points_processed": self.points_processed,
            "elapsed_seconds": f"{self.elapsed:.6f}",
            "throughput_pps": f"{self.throughput:.1f}",
            "median_window_latency_seconds": f"{self.median_latency():.9f}",
            "total_execution_seconds": f"{self.total_execution_time:.6f}",
        }


class RunResult(NamedTuple):
    outputs: list[NormalizedSample]
    events: list[AdaptationEvent]
    report: BenchReport


class Pipeline:
    """Pull-based pipeline run.

    Iterate to drive the run; :attr:`events` and :attr:`report` are final
    once iteration is exhausted. With ``materialize=False`` normalized values
    are computed but discarded and iteration yields nothing, which is what
    throughput sessions use.
    """

    def __init__(
        self,
        config: PipelineConfig,
        source: Iterable[Sample],
        *,
        materialize: bool = True,
    ) -> None:
        self.config = config
        self.source = source
        self.materialize = materialize
        self.events: list[AdaptationEvent] = []
        self.report = BenchReport()
        self._started = False

    def __iter__(self) -> Iterator[NormalizedSample]:
        if self._started:
            raise UsageError("a pipeline can only be run once")
        self._started = True
        t0 = time.monotonic()
        it = iter(self.source)
        first = next(it, None)
        if first is None:
            self.report.total_execution_time = time.monotonic() - t0
            return
        source = itertools.chain([first], it)
        workers = min(self.config.parallelism, first.arity)
        if self.config.parallelism == 1:
            yield from self._run_inline(source, t0)
        else:
            yield from self._run_sharded(source, first.arity, max(workers, 1), t0)

    # -- inline -----------------------------------------------------------

    def _run_inline(self, source: Iterator[Sample], t0: float) -> Iterator[NormalizedSample]:
        strategy = Strategy(self.config.strategy)
        assembler = WindowAssembler(self.config.window_size)
        report = self.report
        latency = report.per_window_latency
        points = 0
        start = time.monotonic()

        def handle(window: Window) -> list[NormalizedSample]:
            emitted = time.monotonic()
            if self.materialize:
                out, events = strategy.process(window)
            else:
                _, events = strategy.process_columns(window.id, window.columns())
                out = []
            latency.append((window.id, time.monotonic() - emitted))
            self.events.extend(events)
            return out

        for sample in source:
            points += 1
            window = assembler.push(sample)
            if window is not None:
                yield from handle(window)
        tail = assembler.flush()
        if tail is not None:
            yield from handle(tail)
        end = time.monotonic()
        report.points_processed = points
        report.elapsed = end - start
        report.total_execution_time = end - t0

    # -- sharded ----------------------------------------------------------

    def _run_sharded(
        self, source: Iterator[Sample], arity: int, n_workers: int, t0: float
    ) -> Iterator[NormalizedSample]:
        cfg = self.config
        ctx = _mp_context()
        shards = [list(range(s, arity, n_workers)) for s in range(n_workers)]
        inqs = [ctx.Queue(maxsize=cfg.queue_depth) for _ in shards]
        outqs = [ctx.Queue(maxsize=cfg.queue_depth) for _ in shards]
        procs = [
            ctx.Process(
                target=_shard_worker,
                args=(cfg.strategy, attrs, inq, outq, self.materialize),
                daemon=True,
                name=f"streamnorm-shard-{i}",
            )
            for i, (attrs, inq, outq) in enumerate(zip(shards, inqs, outqs))
        ]
        for p in procs:
            p.start()

        meta: queue.Queue = queue.Queue(maxsize=cfg.queue_depth)
        stop = threading.Event()
        counter = [0]
        start = time.monotonic()
        feeder = threading.Thread(
            target=self._feed,
            args=(source, shards, inqs, meta, stop, counter),
            name="streamnorm-feeder",
            daemon=True,
        )
        feeder.start()
        report = self.report
        try:
            while True:
                item = _get(meta, stop)
                if item[0] == _DONE:
                    break
                if item[0] == _ERROR:
                    raise item[1]
                _, seq, window_ids, emitted, ordinals = item
                results = []
                for outq in outqs:
                    res = _get_mp(outq, procs)
                    if res[0] == _ERROR:
                        raise res[1]
                    if res[0] != seq:
                        raise RuntimeError(f"shard out of sync: chunk {res[0]} != {seq}")
                    results.append(res)
                for k, wid in enumerate(window_ids):
                    done = max(r[3][k] for r in results)
                    report.per_window_latency.append((wid, done - emitted[k]))
                    window_events = [e for r in results for e in r[2][k]]
                    window_events.sort(key=lambda e: e.attribute)
                    self.events.extend(window_events)
                    if self.materialize:
                        cols: list = [None] * arity
                        for attrs, r in zip(shards, results):
                            for j, col in zip(attrs, r[1][k]):
                                cols[j] = col
                        for ordinal, vals in zip(ordinals[k], zip(*cols)):
                            yield NormalizedSample(ordinal, vals)
            end = time.monotonic()
            report.points_processed = counter[0]
            report.elapsed = end - start
        finally:
            stop.set()
            feeder.join(timeout=5)
            for inq in inqs:
                try:
                    inq.put_nowait(None)
                except queue.Full:
                    pass
            for p in procs:
                p.join(timeout=2)
                if p.is_alive():
                    p.terminate()
                    p.join()
            for q in (*inqs, *outqs):
                q.close()
                q.cancel_join_thread()
            report.total_execution_time = time.monotonic() - t0

    def _feed(self, source, shards, inqs, meta, stop, counter) -> None:
        assembler = WindowAssembler(self.config.window_size)
        batch_points = self.config.batch_points
        pending: list[tuple[Window, float]] = []
        pending_points = 0
        seq = 0

        def dispatch() -> None:
            nonlocal seq, pending, pending_points
            window_ids = [w.id for w, _ in pending]
            emitted = [t for _, t in pending]
            ordinals = [[s.ordinal for s in w.samples] for w, _ in pending]
            all_cols = [w.columns() for w, _ in pending]
            for attrs, inq in zip(shards, inqs):
                payload = [[cols[j] for j in attrs] for cols in all_cols]
                _put(inq, (seq, window_ids, payload), stop)
            _put(meta, ("chunk", seq, window_ids, emitted, ordinals), stop)
            seq += 1
            pending = []
            pending_points = 0

        try:
            for sample in source:
                if stop.is_set():
                    return
                counter[0] += 1
                window = assembler.push(sample)
                if window is not None:
                    pending.append((window, time.monotonic()))
                    pending_points += len(window)
                    if pending_points >= batch_points:
                        dispatch()
            tail = assembler.flush()
            if tail is not None:
                pending.append((tail, time.monotonic()))
            if pending:
                dispatch()
            for inq in inqs:
                _put(inq, None, stop)
            _put(meta, (_DONE,), stop)
        except _Stopped:
            pass
        except BaseException as exc:  # surfaced in the consumer
            try:
                _put(meta, (_ERROR, exc), stop)
            except _Stopped:
                pass


class _Stopped(Exception):
    pass


def _put(q, item, stop: threading.Event) -> None:
    while True:
        if stop.is_set():
            raise _Stopped
        try:
            q.put(item, timeout=_POLL)
            return
        except queue.Full:
            continue


def _get(q: queue.Queue, stop: threading.Event):
    while True:
        try:
            return q.get(timeout=_POLL)
        except queue.Empty:
            if stop.is_set():
                raise RuntimeError("pipeline stopped")


def _get_mp(q, procs):
    while True:
        try:
            return q.get(timeout=_POLL)
        except queue.Empty:
            dead = [p for p in procs if not p.is_alive() and p.exitcode not in (0, None)]
            if dead:
                raise RuntimeError(f"worker {dead[0].name} died with exit code {dead[0].exitcode}")


def _mp_context():
    methods = mp.get_all_start_methods()
    return mp.get_context("fork" if "fork" in methods else "spawn")


def _shard_worker(strategy_config, attributes, inq, outq, materialize) -> None:
    strategy = Strategy(strategy_config)
    try:
        while True:
            msg = inq.get()
            if msg is None:
                break
            seq, window_ids, payload = msg
            outs, events, done = [], [], []
            for wid, cols in zip(window_ids, payload):
                out, ev = strategy.process_columns(wid, cols, attributes)
                done.append(time.monotonic())
                outs.append(out if materialize else None)
                events.append(ev)
            outq.put((seq, outs, events, done))
    except BaseException as exc:
        outq.put((_ERROR, exc))


def run(config: PipelineConfig, source: Iterable[Sample]) -> RunResult:
    """Run ``source`` to completion and collect every output."""
    pipe = Pipeline(config, source)
    outputs = list(pipe)
    return RunResult(outputs, pipe.events, pipe.report)


def _session_source(
    source_factory: Callable[[], Iterable[Sample]], deadline: float
) -> Iterator[Sample]:
    # renumbers each pass so ordinals keep increasing across loops
    ordinal = 0
    while True:
        produced = 0
        for s in source_factory():
            if not ordinal & 1023 and time.monotonic() >= deadline:
                return
            yield Sample(ordinal, s.values)
            ordinal += 1
            produced += 1
        if not produced:
            return


def measure_throughput(
    config: PipelineConfig, source_factory: Callable[[], Iterable[Sample]]
) -> BenchReport:
    """Feed the (looped) source for ``config.session_limit`` seconds.

    Normalized values are computed and discarded; the report counts every
    point that went through the strategy.
    """
    if config.session_limit is None:
        raise ConfigError("measure_throughput needs session_limit")
    deadline = time.monotonic() + config.session_limit
    pipe = Pipeline(config, _session_source(source_factory, deadline), materialize=False)
    for _ in pipe:
        pass
    log.info(
        "parallelism=%d: %d points in %.2fs (%.0f pps)",
        config.parallelism, pipe.report.points_processed,
        pipe.report.elapsed, pipe.report.throughput,
    )
    return pipe.report


def measure_scaling(
    config: PipelineConfig,
    sizes: Sequence[int],
    *,
    seed: int = 0,
    repeats: int = 1,
    synthetic: SyntheticSpec | None = None,
) -> list[tuple[int, float]]:
    """Wall-clock of a full run per dataset size (median over ``repeats``).

    Data is generated before the clock starts, so only the pipeline is timed.
    The garbage collector is paused while timing, as ``timeit`` does.
    """
    if list(sizes) != sorted(sizes):
        raise UsageError("sizes must be ascending")
    if repeats < 1:
        raise UsageError("repeats must be >= 1")
    base = synthetic or SyntheticSpec(seed=seed)
    rows = []
    for size in sizes:
        if size < 0:
            raise UsageError(f"negative size {size}")
        samples = (
            list(generate_synthetic(SyntheticSpec(size, base.segments, base.seed)))
            if size else []
        )
        times = []
        for _ in range(repeats):
            # like timeit: collector pauses would make the timing superlinear
            gc.collect()
            gc_was_enabled = gc.isenabled()
            gc.disable()
            try:
                t = time.monotonic()
                run(config, samples)
                times.append(time.monotonic() - t)
            finally:
                if gc_was_enabled:
                    gc.enable()
        rows.append((size, statistics.median(times)))
    return rows
