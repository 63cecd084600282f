"""Hierarchical multi-resolution time keys for "open at time t" filtering."""

from .hierarchy import (
    DEFAULT_HIERARCHY,
    MINUTES_PER_DAY,
    Hierarchy,
    HierarchyError,
    boundary_constant,
    default_hierarchy,
    max_key_bound,
    parse_hierarchy,
    validate_hierarchy,
)
from .index import (
    BitsetIndex,
    InvertedIndex,
    PoiRecord,
    QueryResult,
    Strategy,
    build_index,
    precision_recall,
    scope_filter,
)
from .keygen import (
    TimeRange,
    decode,
    document_terms,
    encode,
    format_hhmm,
    index_terms,
    parse_hhmm,
    point_query_terms,
    range_query_terms,
    split_wrapping,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_HIERARCHY",
    "MINUTES_PER_DAY",
    "BitsetIndex",
    "Hierarchy",
    "HierarchyError",
    "InvertedIndex",
    "PoiRecord",
    "QueryResult",
    "Strategy",
    "TimeRange",
    "boundary_constant",
    "build_index",
    "decode",
    "default_hierarchy",
    "document_terms",
    "encode",
    "format_hhmm",
    "index_terms",
    "max_key_bound",
    "parse_hhmm",
    "parse_hierarchy",
    "point_query_terms",
    "precision_recall",
    "range_query_terms",
    "scope_filter",
    "split_wrapping",
    "validate_hierarchy",
]
