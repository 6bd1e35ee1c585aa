"""``streamnorm`` command line: gen, normalize, compare, bench, scaling.

Exit codes: 0 on success, 1 for usage or configuration errors, 2 for data
or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path

from streamnorm.core import ConfigError, DataError, StreamNormError, UsageError
from streamnorm.datagen import (
    DEFAULT_SEGMENTS,
    DEFAULT_SIZE,
    CsvIngestSpec,
    SyntheticSpec,
    generate_synthetic,
    generate_synthetic_multi,
    load_csv,
    parse_segments,
    write_synthetic_csv,
)
from streamnorm.evaluation import sweep_csv, sweep_window_sizes, table_csv
from streamnorm.pipeline import Pipeline, PipelineConfig, measure_scaling, measure_throughput
from streamnorm.strategies import DEFAULT_THRESHOLD, Method, StrategyConfig

log = logging.getLogger("streamnorm")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

DEFAULT_SCALING_SIZES = "20000,40000,80000,160000"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _columns(text: str) -> tuple:
    return tuple(int(c) if c.strip().isdigit() else c.strip() for c in text.split(","))


def _add_input(p: argparse.ArgumentParser, required: bool = False) -> None:
    p.add_argument("--input", "-i", type=Path, required=required, help="CSV input file")
    p.add_argument("--columns", type=_columns, default=(),
                   help="columns to keep (indices or header names); default all")
    p.add_argument("--header", action="store_true", help="input has a header row")


def _add_strategy(p: argparse.ArgumentParser, method_default: int = 5) -> None:
    p.add_argument("--method", "-m", type=int, choices=range(1, 6), default=method_default)
    p.add_argument("--threshold", "-d", type=float, default=None,
                   help=f"significance threshold for mean change (default {DEFAULT_THRESHOLD})")
    p.add_argument("--known-min", type=float, action="append", default=None,
                   help="known minimum, once per attribute (method 1)")
    p.add_argument("--known-max", type=float, action="append", default=None,
                   help="known maximum, once per attribute (method 1)")


def _add_output(p: argparse.ArgumentParser, formats: bool = True) -> None:
    p.add_argument("--output", "-o", type=Path, default=None, help="output file (default stdout)")
    if formats:
        p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_synthetic(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--segments", type=parse_segments, default=DEFAULT_SEGMENTS,
                   help="drift segments as lo:hi,lo:hi,...")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="streamnorm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a synthetic drift stream as CSV")
    p.add_argument("--size", type=int, default=DEFAULT_SIZE)
    _add_synthetic(p)
    _add_output(p, formats=False)

    p = sub.add_parser("normalize", help="normalize a CSV stream")
    _add_input(p, required=True)
    _add_strategy(p)
    p.add_argument("--window-size", "-n", type=_positive_int, default=50)
    p.add_argument("--parallelism", "-p", type=_positive_int, default=1)
    p.add_argument("--events", type=Path, default=None,
                   help="adaptation event log (JSON lines); default <output>.events.jsonl")
    _add_output(p, formats=False)

    p = sub.add_parser("compare", help="RMSE of methods 2-5 against method 1")
    _add_input(p)
    _add_synthetic(p)
    p.add_argument("--size", type=int, default=DEFAULT_SIZE, help="synthetic size without --input")
    p.add_argument("--window-size", "-n", type=_int_list, default=[50],
                   help="window size, or a comma list for a sweep")
    p.add_argument("--threshold", "-d", type=float, default=None)
    p.add_argument("--known-min", type=float, action="append", default=None)
    p.add_argument("--known-max", type=float, action="append", default=None)
    p.add_argument("--parallelism", "-p", type=_positive_int, default=1)
    _add_output(p)

    p = sub.add_parser("bench", help="throughput per parallelism level")
    _add_input(p)
    _add_synthetic(p)
    _add_strategy(p)
    p.add_argument("--size", type=int, default=DEFAULT_SIZE, help="synthetic size without --input")
    p.add_argument("--attributes", type=_positive_int, default=1,
                   help="synthetic attribute count without --input")
    p.add_argument("--window-size", "-n", type=_positive_int, default=50)
    p.add_argument("--parallelism", "-p", type=_int_list, default=[1, 2, 4, 8])
    p.add_argument("--duration-seconds", type=float, default=10.0)
    _add_output(p)

    p = sub.add_parser("scaling", help="execution time per dataset size")
    _add_synthetic(p)
    _add_strategy(p)
    p.add_argument("--sizes", type=_int_list, default=_int_list(DEFAULT_SCALING_SIZES))
    p.add_argument("--repeats", type=_positive_int, default=1, help="report the median of N runs")
    p.add_argument("--window-size", "-n", type=_positive_int, default=50)
    p.add_argument("--parallelism", "-p", type=_positive_int, default=1)
    _add_output(p)
    return parser


# -- helpers ----------------------------------------------------------------


def _threshold(args) -> float:
    if args.threshold is None:
        log.warning("threshold not given, using default %s", DEFAULT_THRESHOLD)
        return DEFAULT_THRESHOLD
    return args.threshold


def _known_range(args) -> tuple[tuple[float, float], ...] | None:
    lo, hi = args.known_min, args.known_max
    if lo is None and hi is None:
        return None
    if lo is None or hi is None or len(lo) != len(hi):
        raise UsageError("--known-min and --known-max must be given the same number of times")
    return tuple(zip(lo, hi))


def _strategy(args, threshold: float) -> StrategyConfig:
    return StrategyConfig(Method(args.method), threshold, _known_range(args))


def _read_input(args):
    return load_csv(CsvIngestSpec(args.input, args.columns, args.header))


@contextmanager
def _open_out(path: Path | None):
    if path is None:
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from exc
    with fh:
        yield fh


def _write_rows(args, rows: list[dict], meta: dict) -> None:
    with _open_out(args.output) as fh:
        if args.format == "json":
            json.dump({"config": meta, "rows": rows}, fh, indent=2)
            fh.write("\n")
        else:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]) if rows else [],
                                    lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)


# -- subcommands ------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.size < 1:
        raise UsageError(f"--size must be positive, got {args.size}")
    spec = SyntheticSpec(args.size, args.segments, args.seed)
    if args.output is None:
        sys.stdout.write(f"# {spec.describe()}\n")
        for s in generate_synthetic(spec):
            sys.stdout.write(f"{s.values[0]!r}\n")
        return EXIT_OK
    try:
        n = write_synthetic_csv(spec, args.output)
    except OSError as exc:
        raise DataError(f"cannot write {args.output}: {exc.strerror}") from exc
    log.info("wrote %d samples to %s", n, args.output)
    return EXIT_OK


def cmd_normalize(args) -> int:
    threshold = _threshold(args)
    cfg = PipelineConfig(_strategy(args, threshold), args.window_size, args.parallelism)
    events_path = args.events
    if events_path is None and args.output is not None:
        events_path = args.output.with_name(args.output.name + ".events.jsonl")
    pipe = Pipeline(cfg, _read_input(args))
    with _open_out(args.output) as fh:
        for s in pipe:
            fh.write(",".join(repr(v) for v in s.values))
            fh.write("\n")
    if events_path is not None:
        with _open_out(events_path) as fh:
            for e in pipe.events:
                fh.write(json.dumps(e.to_dict()))
                fh.write("\n")
    log.info(
        "method=%d window_size=%d threshold=%s: %d samples, %d events",
        cfg.strategy.method, cfg.window_size, threshold,
        pipe.report.points_processed, len(pipe.events),
    )
    return EXIT_OK


def cmd_compare(args) -> int:
    threshold = _threshold(args)
    known = _known_range(args)
    if any(n < 1 for n in args.window_size) or not args.window_size:
        raise UsageError("--window-size values must be positive")
    meta = {"threshold": threshold, "window_sizes": args.window_size,
            "parallelism": args.parallelism}
    if args.input is not None:
        samples = list(_read_input(args))
        dataset = args.input.stem
        meta["input"] = str(args.input)
    else:
        if args.size < 1:
            raise UsageError(f"--size must be positive, got {args.size}")
        spec = SyntheticSpec(args.size, args.segments, args.seed)
        samples = list(generate_synthetic(spec))
        dataset = "synthetic"
        if known is None:
            known = (spec.global_range,)
        meta.update(seed=args.seed, size=args.size, generator=spec.describe())
    if not samples:
        raise DataError("input stream is empty")
    reports = sweep_window_sizes(
        samples, args.window_size, threshold, known,
        dataset=dataset, parallelism=args.parallelism,
    )
    with _open_out(args.output) as fh:
        if args.format == "json":
            json.dump({"config": meta, "reports": [r.to_dict() for r in reports]}, fh, indent=2)
            fh.write("\n")
        elif len(reports) == 1:
            fh.write(table_csv(reports))
        else:
            fh.write(sweep_csv(reports))
    for r in reports:
        log.info("N=%d threshold=%s rmse=%s", r.window_size, threshold,
                 {k: round(v, 6) for k, v in r.rmse.items()})
    return EXIT_OK


def cmd_bench(args) -> int:
    if not args.duration_seconds > 0:
        raise UsageError("--duration-seconds must be positive")
    if not args.parallelism or any(p < 1 for p in args.parallelism):
        raise UsageError("--parallelism values must be positive")
    threshold = _threshold(args)
    strategy = _strategy(args, threshold)
    if args.input is not None:
        samples = list(_read_input(args))
        source = str(args.input)
    else:
        if args.size < 1:
            raise UsageError(f"--size must be positive, got {args.size}")
        spec = SyntheticSpec(args.size, args.segments, args.seed)
        samples = list(generate_synthetic_multi(spec, args.attributes))
        source = f"synthetic {spec.describe()} attributes={args.attributes}"
    if not samples:
        raise DataError("input stream is empty")
    rows = []
    for p in args.parallelism:
        cfg = PipelineConfig(strategy, args.window_size, p, session_limit=args.duration_seconds)
        report = measure_throughput(cfg, lambda: samples)
        rows.append({"parallelism": p, "method": int(strategy.method),
                     "window_size": args.window_size, "threshold": threshold,
                     **report.csv_row()})
    meta = {"source": source, "duration_seconds": args.duration_seconds,
            **strategy.to_dict(), "window_size": args.window_size}
    _write_rows(args, rows, meta)
    return EXIT_OK


def cmd_scaling(args) -> int:
    if not args.sizes or any(s < 0 for s in args.sizes):
        raise UsageError("--sizes must be non-negative integers")
    threshold = _threshold(args)
    strategy = _strategy(args, threshold)
    cfg = PipelineConfig(strategy, args.window_size, args.parallelism)
    spec = SyntheticSpec(DEFAULT_SIZE, args.segments, args.seed)
    results = measure_scaling(cfg, sorted(args.sizes), repeats=args.repeats, synthetic=spec)
    rows = [{"size": size, "seconds": f"{secs:.6f}", "method": int(strategy.method),
             "window_size": args.window_size, "threshold": threshold,
             "parallelism": args.parallelism, "repeats": args.repeats, "seed": args.seed}
            for size, secs in results]
    _write_rows(args, rows, {**cfg.to_dict(), "seed": args.seed, "repeats": args.repeats})
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "normalize": cmd_normalize,
    "compare": cmd_compare,
    "bench": cmd_bench,
    "scaling": cmd_scaling,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except StreamNormError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
