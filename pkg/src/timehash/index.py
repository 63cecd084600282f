"""In-memory inverted index over time terms, with baseline term schemes.

Strategies:

* ``timehash``: hierarchical keys from :mod:`timehash.keygen`.
* ``minute1``: one ``hhmm`` term per open minute (exact, very large).
* ``minute5``: one term per 5-minute block touching an open minute.
* ``hour1``: one ``hh`` term per hour block touching an open minute.

The block baselines index every block a range touches, so they never miss a
document but may return one whose hours end partway through a block.
"""

from __future__ import annotations

import bisect
import json
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from .hierarchy import DEFAULT_HIERARCHY, MINUTES_PER_DAY, Hierarchy
from .keygen import (
    TimeRange,
    document_terms,
    format_hhmm,
    parse_hhmm,
    point_query_terms,
    range_query_terms,
    split_wrapping,
)

# Rough in-memory cost used for memory estimates: one 4-byte doc ordinal per
# posting plus a fixed per-term overhead for the dictionary entry.
BYTES_PER_POSTING = 4
BYTES_PER_TERM = 64


class IndexingError(Exception):
    """Base class for index errors."""


class DuplicateDocumentError(IndexingError):
    pass


class MixedHierarchyError(IndexingError):
    pass


class UnsupportedStrategyError(IndexingError):
    pass


class FrozenIndexError(IndexingError):
    pass


class PoiFormatError(ValueError):
    pass


class Strategy(str, Enum):
    TIMEHASH = "timehash"
    MINUTE1 = "minute1"
    MINUTE5 = "minute5"
    HOUR1 = "hour1"


@dataclass
class PoiRecord:
    """A business with one or more in-day open ranges."""

    id: str
    ranges: list[TimeRange]
    day_tag: str | None = None

    def is_open(self, t: int) -> bool:
        return any(r.start <= t < r.end for r in self.ranges)

    def open_minutes(self) -> int:
        """Distinct open minutes (ranges may overlap)."""
        return len(_open_minute_set(self.ranges))

    def to_json(self) -> str:
        pairs = [[format_hhmm(r.start), format_hhmm(r.end)] for r in self.ranges]
        obj: dict = {"id": self.id, "ranges": pairs}
        if self.day_tag is not None:
            obj["day"] = self.day_tag
        return json.dumps(obj, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "PoiRecord":
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise PoiFormatError(f"invalid JSON: {exc.msg}") from None
        if not isinstance(obj, dict) or "id" not in obj or "ranges" not in obj:
            raise PoiFormatError("expected an object with 'id' and 'ranges'")
        ranges: list[TimeRange] = []
        for pair in obj["ranges"]:
            if not isinstance(pair, list) or len(pair) != 2:
                raise PoiFormatError(f"range must be a [from, to] pair, got {pair!r}")
            try:
                start, end = parse_hhmm(pair[0]), parse_hhmm(pair[1])
            except (ValueError, TypeError) as exc:
                raise PoiFormatError(str(exc)) from None
            if start == MINUTES_PER_DAY:
                raise PoiFormatError("a range cannot start at 2400")
            ranges.extend(split_wrapping(start, end))
        if not ranges:
            raise PoiFormatError("a POI needs at least one range")
        day = obj.get("day")
        return cls(str(obj["id"]), ranges, None if day is None else str(day))


def read_jsonl(fp: IO[str]) -> Iterator[PoiRecord]:
    """Yield POIs from a JSON-lines stream; blank lines are skipped."""
    for lineno, line in enumerate(fp, 1):
        if not line.strip():
            continue
        try:
            yield PoiRecord.from_json(line)
        except PoiFormatError as exc:
            raise PoiFormatError(f"line {lineno}: {exc}") from None


def write_jsonl(pois: Iterable[PoiRecord], fp: IO[str]) -> int:
    n = 0
    for poi in pois:
        fp.write(poi.to_json())
        fp.write("\n")
        n += 1
    return n


def _open_minute_set(ranges: Iterable[TimeRange]) -> set[int]:
    out: set[int] = set()
    for r in ranges:
        out.update(range(r.start, r.end))
    return out


_MINUTE_TERMS = tuple(format_hhmm(t) for t in range(MINUTES_PER_DAY))


def _block_terms(ranges: Iterable[TimeRange], width: int) -> set[str]:
    out = set()
    for r in ranges:
        if r.empty:
            continue
        for b in range(r.start // width, (r.end - 1) // width + 1):
            out.add(_block_label(b * width, width))
    return out


def _block_label(start: int, width: int) -> str:
    return f"{start // 60:02d}" if width == 60 else _MINUTE_TERMS[start]


def strategy_terms(
    strategy: Strategy,
    ranges: Sequence[TimeRange],
    h: Hierarchy = DEFAULT_HIERARCHY,
    prefix: str | None = None,
) -> set[str]:
    """Document-side term set for ``ranges`` under a given strategy."""
    if strategy is Strategy.TIMEHASH:
        return document_terms(ranges, h, prefix)
    if strategy is Strategy.MINUTE1:
        terms = {_MINUTE_TERMS[t] for t in _open_minute_set(ranges)}
    elif strategy is Strategy.MINUTE5:
        terms = _block_terms(ranges, 5)
    else:
        terms = _block_terms(ranges, 60)
    if prefix:
        return {prefix + k for k in terms}
    return terms


def strategy_query_terms(
    strategy: Strategy, t: int, h: Hierarchy = DEFAULT_HIERARCHY, prefix: str | None = None
) -> list[str]:
    if strategy is Strategy.TIMEHASH:
        terms = point_query_terms(t, h)
    elif not 0 <= t < MINUTES_PER_DAY:
        raise ValueError(f"query minute {t} outside the day")
    elif strategy is Strategy.MINUTE1:
        terms = [_MINUTE_TERMS[t]]
    elif strategy is Strategy.MINUTE5:
        terms = [_MINUTE_TERMS[t // 5 * 5]]
    else:
        terms = [f"{t // 60:02d}"]
    if prefix:
        return [prefix + k for k in terms]
    return terms


@dataclass
class QueryResult:
    doc_ids: set[str]
    terms_probed: int
    latency: float  # seconds

    def __len__(self) -> int:
        return len(self.doc_ids)


class InvertedIndex:
    """Term -> sorted posting list of document ids.

    Mutate with :meth:`index_document`, then :meth:`freeze` before sharing
    across readers.
    """

    def __init__(self, strategy: Strategy | str = Strategy.TIMEHASH, hierarchy: Hierarchy | None = None):
        self.strategy = Strategy(strategy)
        if self.strategy is Strategy.TIMEHASH:
            self.hierarchy = hierarchy or DEFAULT_HIERARCHY
        else:
            self.hierarchy = None
        self.postings: dict[str, list[str]] = {}
        self.doc_count = 0
        self.term_total = 0
        self._ids: set[str] = set()
        self._frozen = False

    def __repr__(self) -> str:
        return (
            f"InvertedIndex({self.strategy.value}, docs={self.doc_count}, "
            f"terms={len(self.postings)}, postings={self.term_total})"
        )

    @property
    def frozen(self) -> bool:
        return self._frozen

    def freeze(self) -> "InvertedIndex":
        self._frozen = True
        return self

    def index_document(self, poi: PoiRecord, hierarchy: Hierarchy | None = None) -> int:
        """Add ``poi`` and return the size of its term set."""
        if self._frozen:
            raise FrozenIndexError("index is frozen")
        if hierarchy is not None and self.strategy is Strategy.TIMEHASH and hierarchy != self.hierarchy:
            raise MixedHierarchyError(f"index uses {self.hierarchy}, document keyed with {hierarchy}")
        if poi.id in self._ids:
            raise DuplicateDocumentError(f"document {poi.id!r} already indexed")
        terms = strategy_terms(self.strategy, poi.ranges, self.hierarchy or DEFAULT_HIERARCHY, poi.day_tag)
        doc = poi.id
        postings = self.postings
        for term in terms:
            plist = postings.get(term)
            if plist is None:
                postings[term] = [doc]
            elif plist[-1] < doc:
                plist.append(doc)
            else:
                bisect.insort(plist, doc)
        self._ids.add(doc)
        self.doc_count += 1
        self.term_total += len(terms)
        return len(terms)

    def index_all(self, pois: Iterable[PoiRecord]) -> int:
        return sum(self.index_document(p) for p in pois)

    def merge(self, other: "InvertedIndex") -> None:
        """Fold another index built with the same strategy into this one."""
        if other.strategy is not self.strategy:
            raise UnsupportedStrategyError(f"cannot merge {other.strategy.value} into {self.strategy.value}")
        if other.hierarchy != self.hierarchy:
            raise MixedHierarchyError(f"index uses {self.hierarchy}, other uses {other.hierarchy}")
        if self._frozen:
            raise FrozenIndexError("index is frozen")
        dup = self._ids & other._ids
        if dup:
            raise DuplicateDocumentError(f"{len(dup)} documents present in both indexes")
        for term, plist in other.postings.items():
            mine = self.postings.get(term)
            self.postings[term] = sorted(mine + plist) if mine else list(plist)
        self._ids |= other._ids
        self.doc_count += other.doc_count
        self.term_total += other.term_total

    def query_terms(self, t: int, day: str | None = None) -> list[str]:
        return strategy_query_terms(self.strategy, t, self.hierarchy or DEFAULT_HIERARCHY, day)

    def lookup(self, terms: Iterable[str]) -> set[str]:
        out: set[str] = set()
        get = self.postings.get
        for term in terms:
            plist = get(term)
            if plist:
                out.update(plist)
        return out

    def point_query(self, t: int, day: str | None = None) -> QueryResult:
        """Documents open at minute ``t``."""
        t0 = time.perf_counter()
        terms = self.query_terms(t, day)
        ids = self.lookup(terms)
        return QueryResult(ids, len(terms), time.perf_counter() - t0)

    def range_query(self, q: TimeRange, day: str | None = None) -> QueryResult:
        """Documents with at least one open minute in ``q`` (timehash only)."""
        if self.strategy is not Strategy.TIMEHASH:
            raise UnsupportedStrategyError(f"range queries need a timehash index, not {self.strategy.value}")
        t0 = time.perf_counter()
        terms = range_query_terms(q, self.hierarchy)
        if day:
            terms = {day + k for k in terms}
        ids = self.lookup(terms)
        return QueryResult(ids, len(terms), time.perf_counter() - t0)

    @property
    def unique_terms(self) -> int:
        return len(self.postings)

    def terms_per_doc(self) -> float:
        return self.term_total / self.doc_count if self.doc_count else 0.0

    def memory_estimate(self) -> int:
        """Bytes for postings plus term dictionary, from cardinalities only."""
        return self.term_total * BYTES_PER_POSTING + len(self.postings) * BYTES_PER_TERM

    def check_postings(self) -> bool:
        """Posting lists sorted, duplicate-free and consistent with ``term_total``."""
        total = 0
        for plist in self.postings.values():
            total += len(plist)
            if any(a >= b for a, b in zip(plist, plist[1:])):
                return False
        return total == self.term_total


class BitsetIndex:
    """Read-only packed-bitset view of a frozen index for large-scale latency runs.

    Each term maps to a bit array over document ordinals; a point query ORs at
    most one array per hierarchy level.
    """

    def __init__(self, index: InvertedIndex):
        if not index.frozen:
            raise IndexingError("freeze the index before building a bitset view")
        self.strategy = index.strategy
        self.hierarchy = index.hierarchy
        ids = sorted(index._ids)
        self.doc_ids = ids
        ordinal = {d: i for i, d in enumerate(ids)}
        n = len(ids)
        self.words = (n + 63) // 64
        self.bits: dict[str, np.ndarray] = {}
        for term, plist in index.postings.items():
            mask = np.zeros(self.words * 64, dtype=bool)
            mask[[ordinal[d] for d in plist]] = True
            self.bits[term] = np.packbits(mask, bitorder="little").view(np.uint64)
        self._n = n

    def point_ordinals(self, t: int, day: str | None = None) -> np.ndarray:
        """Ordinals (into ``doc_ids``) of documents open at ``t``."""
        acc = np.zeros(self.words, dtype=np.uint64)
        for term in strategy_query_terms(self.strategy, t, self.hierarchy or DEFAULT_HIERARCHY, day):
            b = self.bits.get(term)
            if b is not None:
                acc |= b
        hits = np.unpackbits(acc.view(np.uint8), bitorder="little")[: self._n]
        return np.flatnonzero(hits)

    def point_query(self, t: int, day: str | None = None) -> QueryResult:
        t0 = time.perf_counter()
        ords = self.point_ordinals(t, day)
        ids = {self.doc_ids[i] for i in ords}
        k = len(self.hierarchy) if self.strategy is Strategy.TIMEHASH else 1
        return QueryResult(ids, k, time.perf_counter() - t0)

    def memory_bytes(self) -> int:
        return sum(b.nbytes for b in self.bits.values())


def build_index(
    pois: Iterable[PoiRecord],
    strategy: Strategy | str = Strategy.TIMEHASH,
    hierarchy: Hierarchy | None = None,
) -> InvertedIndex:
    idx = InvertedIndex(strategy, hierarchy)
    for poi in pois:
        idx.index_document(poi)
    return idx.freeze()


def scope_filter(pois: Iterable[PoiRecord], t: int, day: str | None = None) -> set[str]:
    """Linear scan: ids of POIs open at ``t``. This is the ground truth."""
    return {
        p.id
        for p in pois
        if p.day_tag == day and any(r.start <= t < r.end for r in p.ranges)
    }


def scope_filter_range(pois: Iterable[PoiRecord], q: TimeRange, day: str | None = None) -> set[str]:
    return {
        p.id
        for p in pois
        if p.day_tag == day and any(r.start < q.end and q.start < r.end for r in p.ranges)
    }


def precision_recall(result: set[str], truth: set[str]) -> tuple[float, float]:
    """Set precision and recall.

    An empty result has precision 1.0 if the truth is also empty, else 0.0.
    An empty truth gives recall 1.0 (nothing was missed).
    """
    hit = len(result & truth)
    if result:
        precision = hit / len(result)
    else:
        precision = 1.0 if not truth else 0.0
    recall = hit / len(truth) if truth else 1.0
    return precision, recall
