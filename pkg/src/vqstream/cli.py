"""Command-line front end: ``analyze``, ``bench`` and ``selftest``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 selftest failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from contextlib import contextmanager

from .engine import FrameMetrics
from .errors import VqError
from .ingest import Resolution, open_raw_source, open_y4m_source
from .lanes import DEFAULT_RESOLUTIONS, LaneConfig, benchmark, run_pipeline
from .selftest import run_selftest

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SELFTEST = 3

COLUMNS = ("frame_index", "blockiness", "exposure", "blackout", "interlace",
           "inter_sum", "intra_sum")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def output_row(m: FrameMetrics) -> dict:
    return {
        "frame_index": m.frame_index,
        "blockiness": m.blockiness,
        "exposure": m.exposure,
        "blackout": int(m.blackout),
        "interlace": m.interlace,
        "inter_sum": m.inter_sum,
        "intra_sum": m.intra_sum,
    }


def _csv_cell(value) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def write_rows(rows, fmt: str, fh, columns=COLUMNS) -> None:
    if fmt == "json":
        json.dump(list(rows), fh, indent=1)
        fh.write("\n")
        return
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row[c]) for c in columns])


@contextmanager
def _destination(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _res_list(text: str) -> list[Resolution]:
    try:
        return [Resolution.parse(t.strip()) for t in text.split(",") if t.strip()]
    except VqError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _detect_format(path: str) -> str:
    return "y4m" if str(path).lower().endswith(".y4m") else "raw"


def cmd_analyze(args) -> int:
    fmt = args.format or _detect_format(args.input)
    if fmt == "raw":
        if args.width is None or args.height is None:
            raise UsageError("raw input needs --width and --height")
        source = open_raw_source(args.input, Resolution(args.width, args.height))
    else:
        source = open_y4m_source(args.input)
    rows = []
    with source:
        run_pipeline(source, LaneConfig(args.lanes, args.queue_capacity),
                     sink=lambda m: rows.append(output_row(m)))
    with _destination(args.out_file) as fh:
        write_rows(rows, args.output, fh)
    return EXIT_OK


def cmd_bench(args) -> int:
    def progress(row):
        print(f"  {row.width}x{row.height} lanes={row.lanes}: {row.fps:.2f} fps",
              file=sys.stderr)

    report = benchmark(args.resolutions, args.lanes, args.frames, seed=args.seed,
                       queue_capacity=args.queue_capacity, progress=progress)
    print(report.format_table())
    if args.out_file is not None:
        rows = [r.as_dict() for r in report.rows]
        with _destination(args.out_file) as fh:
            write_rows(rows, args.output, fh, columns=tuple(rows[0]) if rows else ())
    return EXIT_OK


def cmd_selftest(args) -> int:
    result = run_selftest(args.seed, args.trials)
    if result.passed:
        print(f"selftest passed: {result.trials} frames, engine == oracle "
              f"(seed {args.seed})")
        return EXIT_OK
    print(f"selftest FAILED at {result.failure.describe()}")
    return EXIT_SELFTEST


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vqstream", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="per-frame metrics for a video file")
    a.add_argument("--input", required=True)
    a.add_argument("--format", choices=("raw", "y4m"),
                   help="input container (default: from the file extension)")
    a.add_argument("--width", type=int)
    a.add_argument("--height", type=int)
    a.add_argument("--lanes", type=int, default=6)
    a.add_argument("--queue-capacity", type=int, default=4)
    a.add_argument("--output", choices=("csv", "json"), default="csv")
    a.add_argument("--out-file", help="destination (default: stdout)")
    a.set_defaults(func=cmd_analyze)

    b = sub.add_parser("bench", help="throughput sweep over resolutions and lane counts")
    b.add_argument("--resolutions", type=_res_list, default=list(DEFAULT_RESOLUTIONS),
                   help="comma-separated WxH list")
    b.add_argument("--lanes", type=_int_list, default=[1, 6],
                   help="comma-separated lane counts")
    b.add_argument("--frames", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--queue-capacity", type=int, default=4)
    b.add_argument("--output", choices=("csv", "json"), default="csv",
                   help="format of the rows written to --out-file")
    b.add_argument("--out-file")
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("selftest", help="check the engine against the oracle")
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--trials", type=int, default=100)
    s.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "lanes", None) is not None:
            lanes = args.lanes if isinstance(args.lanes, list) else [args.lanes]
            if not lanes or min(lanes) < 1:
                raise UsageError("--lanes must be >= 1")
        if getattr(args, "frames", 1) < 1 or getattr(args, "trials", 0) < 0:
            raise UsageError("--frames must be >= 1 and --trials >= 0")
        if getattr(args, "queue_capacity", 1) < 1:
            raise UsageError("--queue-capacity must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(f"vqstream: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VqError as exc:
        print(f"vqstream: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
