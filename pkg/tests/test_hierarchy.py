import pytest
from hypothesis import given, strategies as st

from timehash.hierarchy import (
    DEFAULT_HIERARCHY,
    CoarsestNotDayDivisorError,
    HierarchyError,
    NotDescendingError,
    NotDivisibleError,
    TooManyLevelsError,
    boundary_constant,
    default_hierarchy,
    max_key_bound,
    parse_hierarchy,
    validate_hierarchy,
)


def test_default_hierarchy():
    assert default_hierarchy().measures == (240, 60, 15, 5, 1)
    assert validate_hierarchy((240, 60, 15, 5, 1)) == DEFAULT_HIERARCHY


@pytest.mark.parametrize(
    "measures, error",
    [
        ((60, 240), NotDescendingError),
        ((60, 60), NotDescendingError),
        ((240, 100), NotDivisibleError),
        ((7,), CoarsestNotDayDivisorError),
        ((720, 240, 60, 30, 15, 5, 1), TooManyLevelsError),
        ((), HierarchyError),
        ((0,), HierarchyError),
        ((2880,), HierarchyError),
    ],
)
def test_invalid(measures, error):
    with pytest.raises(error):
        validate_hierarchy(measures)


def test_error_names_offending_values():
    with pytest.raises(NotDivisibleError, match="100 does not divide 240"):
        validate_hierarchy((240, 100))
    with pytest.raises(NotDescendingError, match="60 then 240"):
        validate_hierarchy((60, 240))


def test_parse():
    assert parse_hierarchy("240,60,15,5,1") == DEFAULT_HIERARCHY
    assert parse_hierarchy(" 60, 5 ").measures == (60, 5)
    with pytest.raises(HierarchyError):
        parse_hierarchy("60,x")


def test_boundary_constant():
    assert boundary_constant(DEFAULT_HIERARCHY) == 24
    assert boundary_constant(validate_hierarchy((240,))) == 0
    # 2 * (60/1 - 1)
    assert boundary_constant(validate_hierarchy((60, 1))) == 118


def test_max_key_bound():
    assert max_key_bound(DEFAULT_HIERARCHY, 1440) == 31
    assert max_key_bound(validate_hierarchy((1440,)), 1440) == 2
    assert max_key_bound(validate_hierarchy((60, 1)), 1440) == 24 + 1 + 118
    with pytest.raises(ValueError):
        max_key_bound(DEFAULT_HIERARCHY, 1441)


def test_hierarchy_is_hashable_and_immutable():
    h = validate_hierarchy((60, 5))
    assert {h: 1}[validate_hierarchy([60, 5])] == 1
    with pytest.raises(AttributeError):
        h.measures = (1,)


DIVISORS = [d for d in range(1, 1441) if 1440 % d == 0]


@st.composite
def hierarchies(draw):
    top = draw(st.sampled_from(DIVISORS))
    chain = [top]
    while len(chain) < 6:
        options = [d for d in range(1, chain[-1]) if chain[-1] % d == 0]
        if not options or draw(st.booleans()):
            break
        chain.append(draw(st.sampled_from(options)))
    return validate_hierarchy(chain)


@given(hierarchies())
def test_boundary_constant_ignores_degenerate_ratio(h):
    # a repeated finest level contributes m/m - 1 = 0; computed on the raw list
    ms = h.measures + (h.finest,)
    raw = 2 * sum(a // b - 1 for a, b in zip(ms, ms[1:]))
    assert raw == boundary_constant(h)
