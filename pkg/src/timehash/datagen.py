"""Deterministic synthetic business-hours generator.

The generator draws, per POI, a schedule kind (single range, two ranges with
a break, or open all day), an opening hour and minute, and a total open
duration. Opening and closing minutes share one categorical over minute-of-
hour classes so both cluster at ``:00`` and ``:30``. Closing times past
midnight wrap into a second range starting at ``00:00``.

Draws are vectorized with numpy; a given ``(seed, config)`` always yields the
same POIs and the same JSON-lines bytes.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
import numpy as np

from .hierarchy import DEFAULT_HIERARCHY, MINUTES_PER_DAY, Hierarchy
from .index import PoiRecord
from .keygen import TimeRange, document_terms


class InvalidConfigError(ValueError):
    pass


class UnreachableError(ValueError):
    pass


# Minute-of-hour classes for opening/closing boundaries.
MINUTE_CLASSES = (":00", ":30", "other5", "nonaligned")

# The "other5" class is the quarter hours. Marks such as :10 or :40 would each
# add 5-minute-level keys in every hour they occur in, and the unique-key
# count at millions of POIs stays in the low hundreds only without them.
OTHER5_MINUTES = (15, 45)
OTHER5_WEIGHTS = (0.5, 0.5)
NONALIGNED_MINUTES = tuple(m for m in range(60) if m % 5)

# Opening hours peak in the morning and thin out through the afternoon.
DEFAULT_START_HOURS = (
    0.004, 0.002, 0.001, 0.001, 0.002, 0.006,
    0.040, 0.085, 0.150, 0.200, 0.190, 0.120,
    0.070, 0.030, 0.020, 0.015, 0.018, 0.017,
    0.012, 0.008, 0.005, 0.002, 0.001, 0.001,
)

# Lunch/afternoon break lengths (minutes) and their weights.
BREAK_GAPS = (60, 90, 120, 180)
BREAK_GAP_WEIGHTS = (0.3, 0.2, 0.3, 0.2)

MIN_DURATION = 60
MAX_DURATION = MINUTES_PER_DAY - 60


@dataclass(frozen=True)
class DistributionConfig:
    """Parameters of the synthetic POI distribution.

    ``duration_mean``/``duration_sd`` describe the total open minutes of a
    schedule that is not open all day (a normal clipped to
    [``MIN_DURATION``, ``MAX_DURATION``]). The default mean comes from
    :func:`calibrate` against 609.7 open minutes per POI.
    """

    seed: int = 42
    n: int = 100_000
    start_minute_weights: tuple[float, float, float, float] = (0.837, 0.155, 0.008, 0.0)
    start_hour_weights: tuple[float, ...] = DEFAULT_START_HOURS
    duration_mean: float = 580.78
    duration_sd: float = 120.0
    break_fraction: float = 0.091
    all_day_fraction: float = 0.06

    def validate(self) -> "DistributionConfig":
        if self.n < 0:
            raise InvalidConfigError(f"n must be non-negative, got {self.n}")
        _check_categorical("start_minute_weights", self.start_minute_weights, 4)
        _check_categorical("start_hour_weights", self.start_hour_weights, 24)
        for name in ("break_fraction", "all_day_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidConfigError(f"{name} must be in [0, 1], got {v}")
        if self.break_fraction + self.all_day_fraction > 1.0:
            raise InvalidConfigError("break_fraction + all_day_fraction exceeds 1")
        if self.duration_mean <= 0 or self.duration_sd < 0:
            raise InvalidConfigError("duration_mean must be > 0 and duration_sd >= 0")
        return self

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(repr(x) for x in v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, base: "DistributionConfig | None" = None) -> "DistributionConfig":
        """Parse the flat ``key = value`` format; ``#`` starts a comment."""
        base = base or cls()
        types = {f.name: f.type for f in fields(cls)}
        updates: dict = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = (s.strip() for s in line.partition("="))
            if not sep or key not in types:
                raise InvalidConfigError(f"line {lineno}: cannot parse {raw!r}")
            try:
                if key in ("seed", "n"):
                    updates[key] = int(value)
                elif "weights" in key:
                    updates[key] = tuple(float(x) for x in value.split(",") if x.strip())
                else:
                    updates[key] = float(value)
            except ValueError:
                raise InvalidConfigError(f"line {lineno}: bad value for {key}: {value!r}") from None
        return replace(base, **updates).validate()


def _check_categorical(name: str, weights, size: int) -> None:
    if len(weights) != size:
        raise InvalidConfigError(f"{name} needs {size} weights, got {len(weights)}")
    if any(w < 0 for w in weights):
        raise InvalidConfigError(f"{name} has a negative weight")
    if abs(sum(weights) - 1.0) > 1e-9:
        raise InvalidConfigError(f"{name} sums to {sum(weights)!r}, not 1")


@dataclass
class Schedules:
    """Column form of a generated sample: up to two segments per POI, pre-wrap.

    ``end`` values may exceed 1440; :meth:`ranges` wraps them.
    """

    kind: np.ndarray  # 0 single, 1 break, 2 all day
    start1: np.ndarray
    end1: np.ndarray
    start2: np.ndarray  # -1 when absent
    end2: np.ndarray
    start_minute_class: np.ndarray
    end_minute_class: np.ndarray

    def __len__(self) -> int:
        return len(self.kind)

    def ranges(self, i: int) -> list[TimeRange]:
        if self.kind[i] == 2:
            return [TimeRange(0, MINUTES_PER_DAY)]
        out = _wrap(int(self.start1[i]), int(self.end1[i]))
        if self.start2[i] >= 0:
            out += _wrap(int(self.start2[i]), int(self.end2[i]))
        return out

    def open_minutes(self) -> np.ndarray:
        """Open minutes per POI; segments never overlap so lengths add."""
        total = self.end1 - self.start1
        total = total + np.where(self.start2 >= 0, self.end2 - self.start2, 0)
        return np.where(self.kind == 2, MINUTES_PER_DAY, total)


def _wrap(start: int, end: int) -> list[TimeRange]:
    if end <= MINUTES_PER_DAY:
        return [TimeRange(start, end)]
    if start >= MINUTES_PER_DAY:
        return [TimeRange(start - MINUTES_PER_DAY, end - MINUTES_PER_DAY)]
    return [TimeRange(start, MINUTES_PER_DAY), TimeRange(0, end - MINUTES_PER_DAY)]


def _minutes(rng: np.random.Generator, weights, n: int) -> tuple[np.ndarray, np.ndarray]:
    cls = rng.choice(4, size=n, p=np.asarray(weights, dtype=float))
    other = rng.choice(OTHER5_MINUTES, size=n, p=OTHER5_WEIGHTS)
    odd = rng.choice(NONALIGNED_MINUTES, size=n)
    minute = np.select([cls == 0, cls == 1, cls == 2], [0, 30, other], odd)
    return minute, cls


def _close(start: np.ndarray, raw_end: np.ndarray, minute: np.ndarray) -> np.ndarray:
    # closing snaps into the hour raw_end falls in, at the drawn minute-of-hour
    end = raw_end // 60 * 60 + minute
    return np.where(end - start < 30, end + 60, end)


def sample(config: DistributionConfig, n: int | None = None) -> Schedules:
    """Draw ``n`` (default ``config.n``) schedules in column form.

    Every random draw has a fixed size, so changing only ``duration_mean``
    shifts durations without disturbing any other draw.
    """
    config.validate()
    n = config.n if n is None else n
    rng = np.random.default_rng(config.seed)
    kind = rng.choice(
        3,
        size=n,
        p=[1.0 - config.break_fraction - config.all_day_fraction, config.break_fraction, config.all_day_fraction],
    )
    hour = rng.choice(24, size=n, p=np.asarray(config.start_hour_weights, dtype=float))
    start_min, start_cls = _minutes(rng, config.start_minute_weights, n)
    end_min, end_cls = _minutes(rng, config.start_minute_weights, n)
    z = rng.standard_normal(n)
    split = rng.uniform(0.3, 0.6, size=n)
    gap = rng.choice(BREAK_GAPS, size=n, p=BREAK_GAP_WEIGHTS)

    start = hour * 60 + start_min
    dur = np.clip(np.rint(config.duration_mean + config.duration_sd * z), MIN_DURATION, MAX_DURATION).astype(np.int64)

    end1 = _close(start, start + dur, end_min)

    brk = kind == 1
    dur_b = np.minimum(dur, MINUTES_PER_DAY - gap - 150)
    # first segment: a whole number of half hours, leaving at least an hour after it
    first = np.rint(dur_b * split / 30).astype(np.int64) * 30
    first = np.clip(first, 60, np.maximum(60, (dur_b - 60) // 30 * 30))
    b_end1 = start + first
    b_start2 = b_end1 + gap
    b_end2 = _close(b_start2, start + dur_b + gap, end_min)

    end1 = np.where(brk, b_end1, end1)
    start2 = np.where(brk, b_start2, -1)
    end2 = np.where(brk, b_end2, -1)
    return Schedules(kind, start, end1, start2, end2, start_cls, end_cls)


def generate(config: DistributionConfig | None = None, n: int | None = None) -> list[PoiRecord]:
    """POIs with zero-padded integer ids, deterministic for ``(seed, config)``."""
    config = config or DistributionConfig()
    s = sample(config, n)
    width = max(7, len(str(len(s))))
    return [PoiRecord(f"{i:0{width}d}", s.ranges(i)) for i in range(len(s))]


def calibrate(
    target_minute1_terms: float,
    base: DistributionConfig | None = None,
    sample_size: int = 100_000,
    tolerance: float = 0.01,
) -> DistributionConfig:
    """Bisect ``duration_mean`` until mean open minutes per POI hits the target.

    Uses ``base.seed`` and a fixed sample size, so the result is reproducible.
    Raises :class:`UnreachableError` when the target lies outside what the
    other parameters allow.
    """
    if target_minute1_terms <= 0:
        raise ValueError("target must be positive")
    base = (base or DistributionConfig()).validate()

    def mean_open(mu: float) -> float:
        return float(sample(replace(base, duration_mean=mu), sample_size).open_minutes().mean())

    def close_enough(v: float) -> bool:
        return abs(v - target_minute1_terms) <= tolerance * target_minute1_terms

    if close_enough(mean_open(base.duration_mean)):
        return base
    lo, hi = float(MIN_DURATION), float(MAX_DURATION)
    v_lo, v_hi = mean_open(lo), mean_open(hi)
    if not v_lo - tolerance * target_minute1_terms <= target_minute1_terms <= v_hi + tolerance * target_minute1_terms:
        raise UnreachableError(
            f"target {target_minute1_terms} outside reachable [{v_lo:.1f}, {v_hi:.1f}] "
            "for this all-day/break mix"
        )
    for _ in range(60):
        mid = (lo + hi) / 2
        v = mean_open(mid)
        if close_enough(v) and abs(v - target_minute1_terms) <= 0.1 * tolerance * target_minute1_terms:
            return replace(base, duration_mean=round(mid, 2))
        if v < target_minute1_terms:
            lo = mid
        else:
            hi = mid
    mid = round((lo + hi) / 2, 2)
    if not close_enough(mean_open(mid)):
        raise UnreachableError(f"search did not converge near {target_minute1_terms}")
    return replace(base, duration_mean=mid)


def _boundary_class(minute: int) -> int:
    if minute == 0:
        return 0
    if minute == 30:
        return 1
    return 2 if minute % 5 == 0 else 3


def _segments(poi: PoiRecord) -> list[TimeRange]:
    """Re-join a range split at midnight so each segment is one open period."""
    rs = list(poi.ranges)
    if len(rs) >= 2 and rs[-1].start == 0 and any(r.end == MINUTES_PER_DAY for r in rs[:-1]):
        rs.pop()
    return rs


@dataclass
class DistributionReport:
    n: int
    all_day_fraction: float
    break_fraction: float
    mean_duration: float  # open minutes, POIs not open all day
    mean_open_minutes: float  # all POIs; equals minute1 terms/doc
    start_alignment: dict[str, float]
    end_alignment: dict[str, float]
    minute1_terms_per_doc: float
    timehash_terms_per_doc: float

    def as_dict(self) -> dict:
        return asdict(self)


def distribution_report(pois: list[PoiRecord], h: Hierarchy = DEFAULT_HIERARCHY) -> DistributionReport:
    """Summary statistics of a POI sample.

    Alignment fractions are over POIs that actually open and close, i.e.
    excluding those open all day.
    """
    if not pois:
        raise ValueError("empty POI list")
    n = len(pois)
    start_counts = [0, 0, 0, 0]
    end_counts = [0, 0, 0, 0]
    all_day = brk = 0
    open_total = 0
    open_bounded = 0
    th_total = 0
    for p in pois:
        minutes = p.open_minutes()
        open_total += minutes
        th_total += len(document_terms(p.ranges, h, p.day_tag))
        if minutes == MINUTES_PER_DAY:
            all_day += 1
            continue
        open_bounded += minutes
        segs = _segments(p)
        if len(segs) >= 2:
            brk += 1
        start_counts[_boundary_class(p.ranges[0].start % 60)] += 1
        end_counts[_boundary_class(p.ranges[-1].end % 60)] += 1
    bounded = n - all_day

    def frac(counts: list[int]) -> dict[str, float]:
        return {c: (k / bounded if bounded else 0.0) for c, k in zip(MINUTE_CLASSES, counts)}

    return DistributionReport(
        n=n,
        all_day_fraction=all_day / n,
        break_fraction=brk / n,
        mean_duration=open_bounded / bounded if bounded else float(MINUTES_PER_DAY),
        mean_open_minutes=open_total / n,
        start_alignment=frac(start_counts),
        end_alignment=frac(end_counts),
        minute1_terms_per_doc=open_total / n,
        timehash_terms_per_doc=th_total / n,
    )
