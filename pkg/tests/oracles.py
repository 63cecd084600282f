"""Independent reference implementations used only by the tests."""

from timehash.hierarchy import MINUTES_PER_DAY


def recursive_cover(start, end, measures, level=0, lo=0, hi=MINUTES_PER_DAY):
    """Block decomposition by recursion on the hierarchy tree.

    Inside parent block [lo, hi), emit every level block fully inside
    [start, end) and recurse into partially covered ones. Returns a list of
    (block_start, level) pairs.
    """
    m = measures[level]
    out = []
    b = max(lo, start // m * m)
    while b < min(hi, end):
        bs, be = b, b + m
        if start <= bs and be <= end:
            out.append((bs, level))
        elif level + 1 < len(measures):
            out.extend(recursive_cover(start, end, measures, level + 1, bs, be))
        b += m
    return out


def covered_minutes_by_query(index_keys, point_terms, day=MINUTES_PER_DAY):
    """Minutes t whose query terms intersect the given index keys."""
    return {t for t in range(day) if not index_keys.isdisjoint(point_terms(t))}
