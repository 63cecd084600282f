"""Experiment harness: key-count enumeration, ablation, index size/accuracy,
end-to-end latency, scalability, hierarchy sweep and oracle verification.

Every precision/recall figure is computed against :func:`scope_filter`.
Latency fields are wall-clock and vary run to run; everything else is a
deterministic function of the seed and configuration.
"""

from __future__ import annotations

import csv
import gc
import io
import json
import platform
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .datagen import DistributionConfig, generate
from .hierarchy import DEFAULT_HIERARCHY, MINUTES_PER_DAY, Hierarchy, validate_hierarchy
from .index import (
    BitsetIndex,
    InvertedIndex,
    PoiRecord,
    Strategy,
    precision_recall,
    scope_filter,
    strategy_terms,
)
from .keygen import TimeRange, document_terms, index_terms, point_query_terms, range_query_terms

# Range-length buckets (minutes, lower exclusive, upper inclusive).
BUCKETS = (("<1h", 0, 60), ("1-4h", 60, 240), ("4-12h", 240, 720), ("12-24h", 720, 1440))

QUERY_WINDOW = (8 * 60, 22 * 60 - 1)  # 08:00 .. 21:59 inclusive

ABLATION_VARIANTS = (
    ("Full (4h,1h,15m,5m,1m)", (240, 60, 15, 5, 1)),
    ("Remove 4h", (60, 15, 5, 1)),
    ("Remove 15m", (240, 60, 5, 1)),
    ("Remove 5m", (240, 60, 15, 1)),
    ("Remove 1h", (240, 15, 5, 1)),
    ("Remove 1m", (240, 60, 15, 5)),
    ("3-level (4h,1h,1m)", (240, 60, 1)),
    ("4-level (4h,1h,15m,1m)", (240, 60, 15, 1)),
    ("6-level (+30m)", (240, 60, 30, 15, 5, 1)),
)

SWEEP_CONFIGS = (
    (5,),
    (60, 5),
    (60, 30, 5),
    (120, 60, 5),
    (120, 60, 30, 5),
    (120, 60, 30, 15, 5),
)

INDEX_STRATEGIES = (Strategy.MINUTE1, Strategy.MINUTE5, Strategy.HOUR1, Strategy.TIMEHASH)


@dataclass
class BenchReport:
    experiment: str
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, **row) -> dict:
        self.rows.append(row)
        return row

    def row(self, label: str, key: str = "label") -> dict:
        for r in self.rows:
            if r.get(key) == label:
                return r
        raise KeyError(label)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, self.columns, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for r in self.rows:
            writer.writerow({k: _fmt(r.get(k)) for k in self.columns})
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {"experiment": self.experiment, "meta": self.meta, "columns": self.columns, "rows": self.rows},
            indent=2,
            default=str,
        )

    def __str__(self) -> str:
        return self.to_csv()


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return v


def _env(**extra) -> dict:
    return {"python": platform.python_version(), "machine": platform.machine(), **extra}


# --------------------------------------------------------------------------
# Exhaustive key counts


def key_count_matrix(h: Hierarchy, day: int = MINUTES_PER_DAY) -> tuple[np.ndarray, np.ndarray]:
    """Greedy key count and covered minutes for every range ``[s, e)`` in ``[0, day]``.

    Returns ``(count, covered)`` with ``count[s, e]`` defined for ``s < e``.
    Built by a backward recurrence on the greedy cover: from position ``s``
    the greedy step is fixed by ``(s, e)``, so ``count[s, e] = 1 +
    count[s + step, e]``. Cross-checked against ``len(index_terms(...))``
    in the test suite.
    """
    measures = h.measures
    finest = measures[-1]
    aligned = [[m for m in measures if s % m == 0] for s in range(day + 1)]
    count = np.zeros((day + 1, day + 1), dtype=np.int16)
    covered = np.zeros((day + 1, day + 1), dtype=np.int32)
    for e in range(1, day + 1):
        steps = [0] * (e + finest + 1)
        cov = [0] * (e + finest + 1)
        for s in range(e - 1, -1, -1):
            for m in aligned[s]:
                if s + m <= e:
                    steps[s] = 1 + steps[s + m]
                    cov[s] = m + cov[s + m]
                    break
            else:
                nxt = s // finest * finest + finest
                steps[s] = 1 + (steps[nxt] if nxt < e else 0)
                cov[s] = nxt - s + (cov[nxt] if nxt < e else 0) + (s % finest)
        count[:e, e] = steps[:e]
        covered[:e, e] = cov[:e]
    return count, covered


@dataclass
class BucketStats:
    label: str
    ranges: int
    avg: float
    min: int
    max: int
    naive_avg: float  # minute-level terms for the same ranges


def enumerate_key_stats(h: Hierarchy = DEFAULT_HIERARCHY, counts: np.ndarray | None = None) -> dict[str, BucketStats]:
    """Key-count statistics over all non-empty ranges ``0 <= s < e <= 1440``.

    All ranges are weighted equally. Zero-length ranges are excluded (they
    produce no keys). Buckets split range length at 1h, 4h and 12h, upper
    bound inclusive.
    """
    if counts is None:
        counts, _ = key_count_matrix(h)
    n = counts.shape[0]
    s, e = np.triu_indices(n, k=1)
    c = counts[s, e].astype(np.int64)
    length = e - s
    out = {}
    for label, lo, hi in BUCKETS:
        mask = (length > lo) & (length <= hi)
        out[label] = BucketStats(label, int(mask.sum()), float(c[mask].mean()), int(c[mask].min()), int(c[mask].max()), float(length[mask].mean()))
    out["all"] = BucketStats("all", len(c), float(c.mean()), int(c.min()), int(c.max()), float(length.mean()))
    return out


def key_stats_report(h: Hierarchy = DEFAULT_HIERARCHY) -> BenchReport:
    stats = enumerate_key_stats(h)
    rep = BenchReport(
        "keystats",
        ["label", "ranges", "avg", "min", "max", "naive_avg"],
        meta=_env(hierarchy=h.to_csv(), convention="all 0<=s<e<=1440 weighted equally; zero-length excluded"),
    )
    for b in stats.values():
        rep.add(label=b.label, ranges=b.ranges, avg=b.avg, min=b.min, max=b.max, naive_avg=b.naive_avg)
    return rep


def ablation(
    base: Hierarchy = DEFAULT_HIERARCHY,
    variants: Sequence[tuple[str, Sequence[int]]] = ABLATION_VARIANTS,
) -> BenchReport:
    """Exhaustive average key count per variant and the change relative to ``base``.

    ``minute_precision`` is the share of covered minutes that lie inside the
    range; it drops below 1 only when the finest level is coarser than a minute.
    """
    rep = BenchReport(
        "ablation",
        ["label", "hierarchy", "avg_keys", "delta_pct", "max_keys", "minute_precision"],
        meta=_env(base=base.to_csv()),
    )
    base_counts, _ = key_count_matrix(base)
    iu = np.triu_indices(base_counts.shape[0], k=1)
    base_avg = float(base_counts[iu].mean())
    lengths = (iu[1] - iu[0]).sum()
    for label, ms in variants:
        h = validate_hierarchy(ms)
        if h == base:
            counts, covered = base_counts, None
        else:
            counts, covered = key_count_matrix(h)
        avg = float(counts[iu].mean())
        precision = 1.0 if covered is None else float(lengths / covered[iu].astype(np.int64).sum())
        rep.add(
            label=label,
            hierarchy=h.to_csv(),
            avg_keys=avg,
            delta_pct=100.0 * (avg / base_avg - 1.0),
            max_keys=int(counts[iu].max()),
            minute_precision=precision,
        )
    return rep


# --------------------------------------------------------------------------
# Dataset experiments


def sample_queries(n: int, seed: int = 0, window: tuple[int, int] = QUERY_WINDOW) -> list[int]:
    """Whole-minute point queries drawn uniformly from ``window`` (inclusive)."""
    rng = np.random.default_rng(seed)
    return [int(t) for t in rng.integers(window[0], window[1] + 1, size=n)]


def _timed_build(pois: Sequence[PoiRecord], strategy: Strategy, h: Hierarchy) -> tuple[InvertedIndex, float]:
    gc.collect()
    gc.disable()
    try:
        t0 = time.perf_counter()
        idx = InvertedIndex(strategy, h if strategy is Strategy.TIMEHASH else None)
        for poi in pois:
            idx.index_document(poi)
        elapsed = time.perf_counter() - t0
    finally:
        gc.enable()
    return idx.freeze(), elapsed


def _accuracy(query: Callable[[int], set[str]], pois: Sequence[PoiRecord], queries: Iterable[int]) -> tuple[float, float, int, int]:
    """Mean per-query precision and recall, plus total false positives/negatives."""
    ps, rs = [], []
    fp = fn = 0
    for t in queries:
        truth = scope_filter(pois, t)
        got = query(t)
        p, r = precision_recall(got, truth)
        ps.append(p)
        rs.append(r)
        fp += len(got - truth)
        fn += len(truth - got)
    return float(np.mean(ps)), float(np.mean(rs)), fp, fn


def index_size_comparison(
    pois: Sequence[PoiRecord],
    strategies: Sequence[Strategy] = INDEX_STRATEGIES,
    queries: Sequence[int] | None = None,
    h: Hierarchy = DEFAULT_HIERARCHY,
) -> BenchReport:
    """Terms per document, reduction against minute-level indexing, and accuracy."""
    queries = list(queries) if queries is not None else sample_queries(100)
    rep = BenchReport(
        "indexsize",
        ["label", "terms_per_doc", "total_terms", "unique_terms", "reduction_pct", "precision", "recall", "false_pos", "false_neg"],
        meta=_env(n=len(pois), hierarchy=h.to_csv(), queries=len(queries)),
    )
    built = {}
    for s in strategies:
        idx, _ = _timed_build(pois, Strategy(s), h)
        built[Strategy(s)] = idx
    ref = built.get(Strategy.MINUTE1)
    ref_tpd = ref.terms_per_doc() if ref else float(np.mean([p.open_minutes() for p in pois]))
    for s, idx in built.items():
        p, r, fp, fn = _accuracy(lambda t: idx.point_query(t).doc_ids, pois, queries)
        rep.add(
            label=s.value,
            terms_per_doc=idx.terms_per_doc(),
            total_terms=idx.term_total,
            unique_terms=idx.unique_terms,
            reduction_pct=100.0 * (1.0 - idx.terms_per_doc() / ref_tpd),
            precision=p,
            recall=r,
            false_pos=fp,
            false_neg=fn,
        )
    return rep


def _percentiles(samples: Sequence[float]) -> tuple[float, float]:
    us = np.asarray(samples) * 1e6
    return float(np.percentile(us, 50)), float(np.percentile(us, 95))


def end_to_end(
    pois: Sequence[PoiRecord],
    strategies: Sequence[Strategy] = INDEX_STRATEGIES,
    n_queries: int = 1000,
    n_accuracy: int = 100,
    seed: int = 0,
    h: Hierarchy = DEFAULT_HIERARCHY,
    include_scope: bool = True,
) -> BenchReport:
    """Build time, P50/P95 point-query latency and accuracy per strategy.

    Latency covers query-term generation, posting-list union and building the
    result id set. The scope-filter row has no build step.
    """
    queries = sample_queries(n_queries, seed)
    acc_queries = queries[:n_accuracy]
    rep = BenchReport(
        "e2e",
        ["label", "terms_per_doc", "build_s", "p50_us", "p95_us", "precision", "recall"],
        meta=_env(n=len(pois), hierarchy=h.to_csv(), queries=n_queries, accuracy_queries=len(acc_queries), seed=seed),
    )
    if include_scope:
        lat = []
        for t in queries:
            t0 = time.perf_counter()
            scope_filter(pois, t)
            lat.append(time.perf_counter() - t0)
        p50, p95 = _percentiles(lat)
        rep.add(label="scope", terms_per_doc=0.0, build_s=0.0, p50_us=p50, p95_us=p95, precision=1.0, recall=1.0)
    for s in strategies:
        s = Strategy(s)
        idx, build_s = _timed_build(pois, s, h)
        lat = [idx.point_query(t).latency for t in queries]
        p50, p95 = _percentiles(lat)
        p, r, _, _ = _accuracy(lambda t: idx.point_query(t).doc_ids, pois, acc_queries)
        rep.add(label=s.value, terms_per_doc=idx.terms_per_doc(), build_s=build_s, p50_us=p50, p95_us=p95, precision=p, recall=r)
        del idx
    return rep


def scalability(
    scales: Sequence[int] = (100_000, 1_000_000),
    config: DistributionConfig | None = None,
    n_queries: int = 1000,
    n_check: int = 5,
    h: Hierarchy = DEFAULT_HIERARCHY,
) -> BenchReport:
    """Timehash index metrics as the collection grows.

    Latency is measured on the packed-bitset view (ordinals only, no id
    materialization). ``n_check`` queries per scale are checked against the
    scope filter.
    """
    if list(scales) != sorted(scales):
        raise ValueError("scales must be ascending")
    config = config or DistributionConfig()
    queries = sample_queries(n_queries, config.seed)
    rep = BenchReport(
        "scale",
        ["label", "n", "terms_per_doc", "total_terms", "unique_terms", "build_s", "mem_mb", "p50_us", "p95_us", "mismatches"],
        meta=_env(hierarchy=h.to_csv(), seed=config.seed, queries=n_queries),
    )
    for n in scales:
        pois = generate(replace(config, n=n))
        idx, build_s = _timed_build(pois, Strategy.TIMEHASH, h)
        bits = BitsetIndex(idx)
        lat = []
        for t in queries:
            t0 = time.perf_counter()
            bits.point_ordinals(t)
            lat.append(time.perf_counter() - t0)
        p50, p95 = _percentiles(lat)
        mismatches = sum(bits.point_query(t).doc_ids != scope_filter(pois, t) for t in queries[:n_check])
        rep.add(
            label=f"{n}",
            n=n,
            terms_per_doc=idx.terms_per_doc(),
            total_terms=idx.term_total,
            unique_terms=idx.unique_terms,
            build_s=build_s,
            mem_mb=idx.memory_estimate() / 1e6,
            p50_us=p50,
            p95_us=p95,
            mismatches=mismatches,
        )
        del pois, idx, bits
        gc.collect()
    return rep


def hierarchy_sweep(
    pois: Sequence[PoiRecord],
    configs: Sequence[Sequence[int]] = SWEEP_CONFIGS,
    baseline: Sequence[int] = (5,),
) -> BenchReport:
    """Total timehash terms per hierarchy as a share of the single-level baseline."""
    rep = BenchReport("sweep", ["label", "depth", "total_terms", "ratio_pct"], meta=_env(n=len(pois), baseline=",".join(map(str, baseline))))
    # many POIs share a schedule; count each distinct schedule once
    schedules: dict[tuple, int] = {}
    for p in pois:
        key = tuple((r.start, r.end) for r in p.ranges)
        schedules[key] = schedules.get(key, 0) + 1

    def total(ms: Sequence[int]) -> int:
        h = validate_hierarchy(ms)
        return sum(
            mult * len(document_terms([TimeRange(s, e) for s, e in sched], h))
            for sched, mult in schedules.items()
        )

    base_total = total(baseline)
    for ms in configs:
        t = base_total if tuple(ms) == tuple(baseline) else total(ms)
        rep.add(label=",".join(map(str, ms)), depth=len(ms), total_terms=t, ratio_pct=100.0 * t / base_total)
    return rep


# --------------------------------------------------------------------------
# Oracle verification


def _minute_masks(h: Hierarchy, day: int) -> dict[str, int]:
    """For each key, the bitmask of query minutes whose query terms include it."""
    masks: dict[str, int] = {}
    for t in range(day):
        bit = 1 << t
        for k in point_query_terms(t, h):
            masks[k] = masks.get(k, 0) | bit
    return masks


@dataclass
class VerifyResult:
    checks: int
    mismatches: int
    examples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.mismatches == 0


def verify_point_exhaustive(h: Hierarchy = DEFAULT_HIERARCHY, day: int = MINUTES_PER_DAY, max_examples: int = 5) -> VerifyResult:
    """Every non-empty range in ``[0, day]`` against every query minute in ``[0, day)``.

    For each range the set of minutes whose query terms hit its index terms
    is assembled as a bitmask and compared with the true ``[s, e)`` mask.
    """
    masks = _minute_masks(h, day)
    mismatches = 0
    examples = []
    checks = 0
    for s in range(day):
        low = (1 << s) - 1
        for e in range(s + 1, day + 1):
            got = 0
            for k in index_terms(TimeRange(s, e), h):
                got |= masks.get(k, 0)
            want = ((1 << e) - 1) ^ low
            checks += day
            if got != want:
                mismatches += bin(got ^ want).count("1")
                if len(examples) < max_examples:
                    examples.append((s, e))
    return VerifyResult(checks, mismatches, examples)


def verify_point_probes(
    h: Hierarchy = DEFAULT_HIERARCHY,
    random_per_range: int = 32,
    seed: int = 0,
    stride: int = 1,
    max_examples: int = 5,
) -> VerifyResult:
    """Direct term-intersection check at each range's edges plus random minutes.

    Probes ``start``, ``start-1``, ``end-1``, ``end`` (where inside the day)
    and ``random_per_range`` uniform minutes. ``stride`` > 1 visits every
    ``stride``-th range in row-major order.
    """
    qt = [set(point_query_terms(t, h)) for t in range(MINUTES_PER_DAY)]
    rng = np.random.default_rng(seed)
    mismatches = checks = 0
    examples = []
    i = 0
    for s in range(MINUTES_PER_DAY):
        for e in range(s + 1, MINUTES_PER_DAY + 1):
            i += 1
            if (i - 1) % stride:
                continue
            keys = index_terms(TimeRange(s, e), h)
            probes = [t for t in (s, s - 1, e - 1, e) if 0 <= t < MINUTES_PER_DAY]
            probes += rng.integers(0, MINUTES_PER_DAY, size=random_per_range).tolist()
            for t in probes:
                checks += 1
                if keys.isdisjoint(qt[t]) == (s <= t < e):
                    mismatches += 1
                    if len(examples) < max_examples:
                        examples.append((s, e, t))
    return VerifyResult(checks, mismatches, examples)


def verify_point_samples(n: int, seed: int = 0, h: Hierarchy = DEFAULT_HIERARCHY) -> VerifyResult:
    """Random (range, minute) pairs checked by term intersection."""
    rng = np.random.default_rng(seed)
    a = rng.integers(0, MINUTES_PER_DAY + 1, size=(n, 2))
    ts = rng.integers(0, MINUTES_PER_DAY, size=n)
    mismatches = 0
    examples = []
    for (x, y), t in zip(a.tolist(), ts.tolist()):
        s, e = min(x, y), max(x, y)
        hit = not index_terms(TimeRange(s, e), h).isdisjoint(point_query_terms(t, h))
        if hit != (s <= t < e):
            mismatches += 1
            if len(examples) < 5:
                examples.append((s, e, t))
    return VerifyResult(n, mismatches, examples)


def verify_range_exhaustive(h: Hierarchy, day: int, max_examples: int = 5) -> VerifyResult:
    """Every document range against every query range on a ``day``-minute line.

    Documents are indexed into key -> bitmask-of-document-ordinals; a query
    matches the union of the bitmasks of its range-query terms, which must
    equal the set of documents overlapping it.
    """
    docs = [(s, e) for s in range(day) for e in range(s + 1, day + 1)]
    postings: dict[str, int] = {}
    starts_before = [0] * (day + 2)  # bit i set when docs[i].start < x
    ends_after = [0] * (day + 2)  # bit i set when docs[i].end > y
    for i, (s, e) in enumerate(docs):
        bit = 1 << i
        for k in index_terms(TimeRange(s, e), h):
            postings[k] = postings.get(k, 0) | bit
    by_start: list[int] = [0] * (day + 1)
    by_end: list[int] = [0] * (day + 1)
    for i, (s, e) in enumerate(docs):
        by_start[s] |= 1 << i
        by_end[e] |= 1 << i
    acc = 0
    for x in range(day + 1):
        starts_before[x] = acc
        acc |= by_start[x]
    acc = 0
    for y in range(day, -1, -1):
        ends_after[y] = acc
        acc |= by_end[y]
    mismatches = 0
    examples = []
    for qs, qe in docs:
        got = 0
        for k in range_query_terms(TimeRange(qs, qe), h):
            got |= postings.get(k, 0)
        want = starts_before[qe] & ends_after[qs]
        if got != want:
            mismatches += bin(got ^ want).count("1")
            if len(examples) < max_examples:
                examples.append((qs, qe))
    return VerifyResult(len(docs) ** 2, mismatches, examples)
