"""Timehash key generation.

Times are integer minutes since midnight. Ranges are half-open ``[start, end)``
so a business "open until 21:00" is open through 20:59 and closed at 21:00.

A key concatenates one component per level, coarsest first. Levels whose
measure is at least an hour contribute the two-digit hour of the block start;
sub-hour levels contribute the two-digit minute of the hour. A sub-hour level
sitting directly under a parent longer than an hour (or at the top of the
hierarchy) would repeat its two digits inside that parent, so it contributes
the full four-digit ``hhmm`` instead. The default hierarchy never needs the
wide form.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .hierarchy import DEFAULT_HIERARCHY, MINUTES_PER_DAY, Hierarchy


class TimeFormatError(ValueError):
    """Bad ``hhmm`` string (wrong length or non-digit characters)."""


class TimeOutOfRangeError(ValueError):
    """Time value outside the day."""


class MisalignedError(ValueError):
    """Block start not on the grid of the requested level."""


@dataclass(frozen=True, order=True)
class TimeRange:
    """Half-open daily interval ``[start, end)`` in minutes; empty when equal."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if not 0 <= self.start <= self.end <= MINUTES_PER_DAY:
            raise TimeOutOfRangeError(
                f"need 0 <= start <= end <= {MINUTES_PER_DAY}, got [{self.start}, {self.end})"
            )

    def __len__(self) -> int:
        return self.end - self.start

    @property
    def empty(self) -> bool:
        return self.start == self.end

    def contains(self, t: int) -> bool:
        return self.start <= t < self.end

    def overlaps(self, other: "TimeRange") -> bool:
        return self.start < other.end and other.start < self.end

    def __str__(self) -> str:
        return f"{format_hhmm(self.start)}-{format_hhmm(self.end)}"


def parse_hhmm(s: str) -> int:
    """``"1140"`` -> 700. ``"2400"`` is accepted and means end of day."""
    if len(s) != 4 or not s.isascii() or not s.isdigit():
        raise TimeFormatError(f"expected 4 digits hhmm, got {s!r}")
    hh, mm = int(s[:2]), int(s[2:])
    if hh > 24 or mm > 59 or (hh == 24 and mm > 0):
        raise TimeOutOfRangeError(f"{s!r} is not a time of day")
    return hh * 60 + mm


def format_hhmm(t: int) -> str:
    if not 0 <= t <= MINUTES_PER_DAY:
        raise TimeOutOfRangeError(f"minute {t} outside the day")
    return f"{t // 60:02d}{t % 60:02d}"


def _component(block_start: int, level: int, h: Hierarchy) -> str:
    m = h.measures[level]
    if m >= 60:
        return f"{block_start // 60:02d}"
    parent = h.measures[level - 1] if level else MINUTES_PER_DAY
    if parent <= 60:
        return f"{block_start % 60:02d}"
    return f"{block_start // 60:02d}{block_start % 60:02d}"


def encode(block_start: int, depth: int, h: Hierarchy = DEFAULT_HIERARCHY) -> str:
    """Key of the level-``depth`` block starting at ``block_start`` (depth is 1-based)."""
    if not 1 <= depth <= len(h):
        raise ValueError(f"depth {depth} outside 1..{len(h)}")
    if not 0 <= block_start < MINUTES_PER_DAY:
        raise TimeOutOfRangeError(f"block start {block_start} outside the day")
    if block_start % h.measures[depth - 1]:
        raise MisalignedError(
            f"{format_hhmm(block_start)} is not on the {h.measures[depth - 1]}-minute grid"
        )
    parts = []
    for level in range(depth):
        m = h.measures[level]
        parts.append(_component(block_start // m * m, level, h))
    return "".join(parts)


def key_lengths(h: Hierarchy) -> tuple[int, ...]:
    """Key text length at each depth; distinct and increasing, so length gives depth."""
    return tuple(len(encode(0, d, h)) for d in range(1, len(h) + 1))


@lru_cache(maxsize=64)
def _key_table(h: Hierarchy) -> tuple[tuple[str, ...], ...]:
    # table[level][block_start // m] for every aligned block in the day
    return tuple(
        tuple(encode(s, level + 1, h) for s in range(0, MINUTES_PER_DAY, m))
        for level, m in enumerate(h.measures)
    )


@lru_cache(maxsize=64)
def _key_index(h: Hierarchy) -> dict[str, tuple[int, int]]:
    out = {}
    for level, row in enumerate(_key_table(h)):
        m = h.measures[level]
        for i, key in enumerate(row):
            out[key] = (i * m, level + 1)
    return out


def decode(key: str, h: Hierarchy = DEFAULT_HIERARCHY) -> TimeRange:
    """The block a key stands for."""
    try:
        start, depth = _key_index(h)[key]
    except KeyError:
        raise ValueError(f"{key!r} is not a key of hierarchy {h}") from None
    return TimeRange(start, start + h.measures[depth - 1])


def cover_blocks(start: int, end: int, h: Hierarchy = DEFAULT_HIERARCHY) -> list[tuple[int, int]]:
    """Greedy cover of ``[start, end)`` as ``(block_start, level)`` pairs, level 0-based.

    At each position the largest measure that is grid-aligned there and ends
    no later than ``end`` is taken. When the finest measure is coarser than a
    minute and nothing fits, the finest block containing the position is used,
    which over-covers by less than one finest block.
    """
    measures = h.measures
    finest = measures[-1]
    last = len(measures) - 1
    out = []
    pos = start
    while pos < end:
        for level, m in enumerate(measures):
            if pos % m == 0 and pos + m <= end:
                out.append((pos, level))
                pos += m
                break
        else:
            block = pos // finest * finest
            out.append((block, last))
            pos = block + finest
    return out


def index_terms(r: TimeRange, h: Hierarchy = DEFAULT_HIERARCHY) -> set[str]:
    """Index-side keys for one range."""
    table = _key_table(h)
    measures = h.measures
    return {table[level][s // measures[level]] for s, level in cover_blocks(r.start, r.end, h)}


def index_terms_hhmm(start: str, end: str, h: Hierarchy = DEFAULT_HIERARCHY) -> list[str]:
    """String-level convenience: sorted keys for ``hhmm`` bounds, wrapping past midnight."""
    terms: set[str] = set()
    for r in split_wrapping(parse_hhmm(start), parse_hhmm(end)):
        terms |= index_terms(r, h)
    return sorted(terms)


def point_query_terms(t: int, h: Hierarchy = DEFAULT_HIERARCHY) -> list[str]:
    """One key per level for the blocks containing minute ``t``, coarsest first."""
    if not 0 <= t < MINUTES_PER_DAY:
        raise TimeOutOfRangeError(f"query minute {t} outside 0..{MINUTES_PER_DAY - 1}")
    table = _key_table(h)
    return [table[level][t // m] for level, m in enumerate(h.measures)]


def query_terms_hhmm(at: str, h: Hierarchy = DEFAULT_HIERARCHY) -> list[str]:
    return point_query_terms(parse_hhmm(at), h)


def range_query_terms(q: TimeRange, h: Hierarchy = DEFAULT_HIERARCHY) -> set[str]:
    """Keys of every block, at every level, that shares a minute with ``q``."""
    if q.empty:
        return set()
    table = _key_table(h)
    out = set()
    for level, m in enumerate(h.measures):
        row = table[level]
        out.update(row[q.start // m : (q.end - 1) // m + 1])
    return out


def split_wrapping(start: int, end: int, all_day: bool = False) -> list[TimeRange]:
    """Turn a possibly midnight-spanning ``start -> end`` into in-day ranges."""
    if all_day:
        return [TimeRange(0, MINUTES_PER_DAY)]
    if start <= end:
        return [TimeRange(start, end)]
    return [TimeRange(start, MINUTES_PER_DAY), TimeRange(0, end)]


def document_terms(
    ranges: Iterable[TimeRange],
    h: Hierarchy = DEFAULT_HIERARCHY,
    prefix: str | None = None,
) -> set[str]:
    """Union of index terms over all of a document's ranges, optionally day-prefixed."""
    terms: set[str] = set()
    for r in ranges:
        terms |= index_terms(r, h)
    if prefix:
        return {prefix + k for k in terms}
    return terms


def key_count(r: TimeRange, h: Hierarchy = DEFAULT_HIERARCHY) -> int:
    return len(cover_blocks(r.start, r.end, h))

