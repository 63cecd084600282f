"""Measure hierarchies that parameterize timehash key generation.

A hierarchy is an ordered tuple of block lengths in minutes, coarsest first.
Each finer measure must divide the one above it and the coarsest must tile
the 1440-minute day starting at midnight.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

MINUTES_PER_DAY = 1440
MAX_LEVELS = 6


class HierarchyError(ValueError):
    """Base class for invalid hierarchy configurations."""


class NotDescendingError(HierarchyError):
    pass


class NotDivisibleError(HierarchyError):
    pass


class CoarsestNotDayDivisorError(HierarchyError):
    pass


class TooManyLevelsError(HierarchyError):
    pass


@dataclass(frozen=True)
class Hierarchy:
    """Validated measure hierarchy. Build with :func:`validate_hierarchy`."""

    measures: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.measures)

    def __iter__(self) -> Iterator[int]:
        return iter(self.measures)

    def __getitem__(self, i: int) -> int:
        return self.measures[i]

    @property
    def coarsest(self) -> int:
        return self.measures[0]

    @property
    def finest(self) -> int:
        return self.measures[-1]

    @property
    def exact(self) -> bool:
        """True when every minute boundary is representable (finest level is 1 minute)."""
        return self.finest == 1

    def to_csv(self) -> str:
        return ",".join(str(m) for m in self.measures)

    def __str__(self) -> str:
        return self.to_csv()


def validate_hierarchy(measures: Iterable[int]) -> Hierarchy:
    """Check the divisibility chain and return an immutable :class:`Hierarchy`."""
    ms = tuple(int(m) for m in measures)
    if not ms:
        raise HierarchyError("hierarchy needs at least one measure")
    if len(ms) > MAX_LEVELS:
        raise TooManyLevelsError(f"{len(ms)} levels given, at most {MAX_LEVELS} allowed")
    for m in ms:
        if m < 1 or m > MINUTES_PER_DAY:
            raise HierarchyError(f"measure {m} outside 1..{MINUTES_PER_DAY} minutes")
    for coarse, fine in zip(ms, ms[1:]):
        if fine >= coarse:
            raise NotDescendingError(f"measures must strictly decrease: {coarse} then {fine}")
        if coarse % fine:
            raise NotDivisibleError(f"{fine} does not divide {coarse}")
    if MINUTES_PER_DAY % ms[0]:
        raise CoarsestNotDayDivisorError(
            f"coarsest measure {ms[0]} does not divide {MINUTES_PER_DAY}"
        )
    return Hierarchy(ms)


def parse_hierarchy(text: str) -> Hierarchy:
    """Parse a comma-separated descending minute list such as ``"240,60,15,5,1"``."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise HierarchyError(f"not a comma-separated minute list: {text!r}") from None
    return validate_hierarchy(values)


DEFAULT_HIERARCHY = validate_hierarchy((240, 60, 15, 5, 1))


def default_hierarchy() -> Hierarchy:
    return DEFAULT_HIERARCHY


def boundary_constant(h: Hierarchy) -> int:
    """Hierarchy-only bound on keys spent refining the two range edges.

    Each edge may emit up to ``m[i-1]/m[i] - 1`` whole blocks at every level
    below the coarsest.
    """
    return 2 * sum(coarse // fine - 1 for coarse, fine in zip(h.measures, h.measures[1:]))


def max_key_bound(h: Hierarchy, day_length: int = MINUTES_PER_DAY) -> int:
    """Upper bound on ``|index_terms(r)|`` for any range no longer than ``day_length``."""
    if not 0 <= day_length <= MINUTES_PER_DAY:
        raise ValueError(f"day_length {day_length} outside 0..{MINUTES_PER_DAY}")
    return day_length // h.coarsest + 1 + boundary_constant(h)
