"""Command-line entry point: ``timehash <subcommand> ...``.

Exit codes: 0 success, 1 verification mismatch, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import Sequence

from . import bench
from .datagen import DistributionConfig, InvalidConfigError, generate
from .hierarchy import HierarchyError, parse_hierarchy
from .index import InvertedIndex, PoiFormatError, Strategy, read_jsonl, write_jsonl
from .keygen import document_terms, parse_hhmm, point_query_terms, split_wrapping

DESKTOP_SCALES = (100_000, 1_000_000)
LARGE_SCALES = (5_000_000, 12_600_000)


class UsageError(Exception):
    pass


def _hierarchy(args):
    try:
        return parse_hierarchy(args.hierarchy)
    except HierarchyError as exc:
        raise UsageError(f"--hierarchy: {exc}") from None


def _minute(text: str, flag: str) -> int:
    try:
        return parse_hhmm(text)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def cmd_keys(args) -> int:
    h = _hierarchy(args)
    start, end = _minute(args.start, "--from"), _minute(args.end, "--to")
    if start == 1440:
        raise UsageError("--from: 2400 is only valid as an end time")
    ranges = split_wrapping(start, end, all_day=args.all_day)
    for key in sorted(document_terms(ranges, h, args.prefix)):
        print(key)
    return 0


def cmd_query(args) -> int:
    h = _hierarchy(args)
    t = _minute(args.at, "--at")
    if t >= 1440:
        raise UsageError("--at: 2400 is not a query minute")
    for key in point_query_terms(t, h):
        print((args.prefix or "") + key)
    return 0


def cmd_serve_batch(args) -> int:
    h = _hierarchy(args)
    try:
        with open(args.pois) as fp:
            pois = list(read_jsonl(fp))
    except PoiFormatError as exc:
        raise UsageError(f"{args.pois}: {exc}") from None
    queries = []
    with open(args.queries) as fp:
        for lineno, line in enumerate(fp, 1):
            text = line.strip()
            if not text:
                continue
            try:
                t = parse_hhmm(text)
            except ValueError as exc:
                raise UsageError(f"{args.queries}: line {lineno}: {exc}") from None
            if t >= 1440:
                raise UsageError(f"{args.queries}: line {lineno}: 2400 is not a query minute")
            queries.append(t)
    idx = InvertedIndex(Strategy.TIMEHASH, h)
    try:
        for poi in pois:
            idx.index_document(poi)
    except Exception as exc:  # duplicate ids and similar input faults
        raise UsageError(f"{args.pois}: {exc}") from None
    idx.freeze()
    out = [" ".join(sorted(idx.point_query(t, args.day).doc_ids)) for t in queries]
    sys.stdout.write("".join(line + "\n" for line in out))
    return 0


def _config(args) -> DistributionConfig:
    base = DistributionConfig()
    if args.config:
        with open(args.config) as fp:
            try:
                base = DistributionConfig.from_text(fp.read())
            except InvalidConfigError as exc:
                raise UsageError(f"{args.config}: {exc}") from None
    updates = {}
    if args.n is not None:
        updates["n"] = args.n
    if args.seed is not None:
        updates["seed"] = args.seed
    try:
        return replace(base, **updates).validate()
    except InvalidConfigError as exc:
        raise UsageError(str(exc)) from None


def cmd_gen(args) -> int:
    pois = generate(_config(args))
    if args.out and args.out != "-":
        with open(args.out, "w", newline="\n") as fp:
            write_jsonl(pois, fp)
    else:
        write_jsonl(pois, sys.stdout)
    return 0


def cmd_bench(args) -> int:
    h = _hierarchy(args)
    exp = args.experiment
    if exp == "keystats":
        rep = bench.key_stats_report(h)
    elif exp == "ablation":
        rep = bench.ablation(h)
    elif exp == "scale":
        scales = DESKTOP_SCALES + (LARGE_SCALES if args.large else ())
        if args.scales:
            scales = tuple(int(s) for s in args.scales.split(","))
        rep = bench.scalability(scales, _config(args), n_queries=args.queries, h=h)
    else:
        pois = generate(_config(args))
        if exp == "indexsize":
            rep = bench.index_size_comparison(pois, queries=bench.sample_queries(args.accuracy_queries, args.seed or 0), h=h)
        elif exp == "e2e":
            rep = bench.end_to_end(pois, n_queries=args.queries, n_accuracy=args.accuracy_queries, seed=args.seed or 0, h=h)
        else:
            rep = bench.hierarchy_sweep(pois)
    text = rep.to_json() + "\n" if args.json else rep.to_csv()
    if args.out:
        with open(args.out, "w") as fp:
            fp.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    h = _hierarchy(args)
    if args.exhaustive:
        result = bench.verify_point_exhaustive(h)
    else:
        result = bench.verify_point_samples(args.samples, args.seed, h)
    print(f"checks={result.checks} mismatches={result.mismatches}")
    for ex in result.examples:
        print("mismatch", *ex)
    return 0 if result.ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="timehash", description="Hierarchical time-range keys for inverted indexes.")
    sub = ap.add_subparsers(dest="command", required=True)

    def hier(p):
        p.add_argument("--hierarchy", default="240,60,15,5,1", help="descending measures in minutes (default %(default)s)")

    p = sub.add_parser("keys", help="index keys for an hhmm range")
    p.add_argument("--from", dest="start", required=True, metavar="HHMM")
    p.add_argument("--to", dest="end", required=True, metavar="HHMM")
    p.add_argument("--all-day", action="store_true", help="ignore --from/--to and key the full day")
    p.add_argument("--prefix", default=None, help="day/date prefix prepended to every key")
    hier(p)
    p.set_defaults(func=cmd_keys)

    p = sub.add_parser("query", help="point-query keys for an hhmm time")
    p.add_argument("--at", required=True, metavar="HHMM")
    p.add_argument("--prefix", default=None)
    hier(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("serve-batch", help="answer a file of hhmm queries against a JSONL POI file")
    p.add_argument("pois", help="POI JSON-lines file")
    p.add_argument("queries", help="one hhmm per line")
    p.add_argument("--day", default=None, help="only match POIs carrying this day tag")
    hier(p)
    p.set_defaults(func=cmd_serve_batch)

    p = sub.add_parser("gen", help="generate synthetic POIs as JSON lines")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", default=None, help="flat key = value config file")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run an experiment and print a CSV report")
    p.add_argument("experiment", choices=["keystats", "ablation", "indexsize", "e2e", "scale", "sweep"])
    p.add_argument("--out", default=None)
    p.add_argument("--json", action="store_true")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--queries", type=int, default=1000, help="latency queries (default %(default)s)")
    p.add_argument("--accuracy-queries", type=int, default=100)
    p.add_argument("--scales", default=None, help="comma-separated POI counts for 'scale'")
    p.add_argument("--large", action="store_true", help="add 5M and 12.6M to 'scale'")
    hier(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="check index/query keys against the brute-force oracle")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exhaustive", action="store_true", help="every range against every minute")
    mode.add_argument("--samples", type=int, help="random (range, minute) pairs")
    p.add_argument("--seed", type=int, default=0)
    hier(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"timehash {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"timehash {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
