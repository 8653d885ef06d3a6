from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hfregularity.exact import Root, as_level, ceil_times, format_rational, level_str, parse_rational


def test_parse_and_format():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("2") == 2
    assert format_rational(Fraction(6, 8)) == "3/4"
    assert format_rational(Fraction(4, 2)) == "2"
    with pytest.raises(ValueError):
        parse_rational("0.x")


def test_rational_root_collapses_to_fraction():
    assert as_level(Root(Fraction(1, 16), 4)) == Fraction(1, 2)
    assert isinstance(as_level(Root(Fraction(1, 16), 4)), Fraction)
    assert not isinstance(as_level(Root(Fraction(1, 2), 2)), Fraction)


def test_root_comparisons_are_exact():
    r = Root(Fraction(2), 2)
    assert 1 < r < 2
    assert Fraction(141421, 100000) < r < Fraction(141422, 100000)
    assert r * 2 == Root(Fraction(8), 2)
    assert level_str(r) == "(2)^(1/2)"


@given(st.integers(1, 10**6), st.integers(1, 10**6), st.integers(2, 6))
def test_root_matches_float(p, q, n):
    r = Root(Fraction(p, q), n)
    assert math.isclose(float(r), (p / q) ** (1 / n), rel_tol=1e-9)


@given(st.fractions(min_value=0, max_value=4), st.integers(0, 500))
def test_ceil_times_is_least_integer_above(x, m):
    t = ceil_times(x, m)
    assert t >= x * m and (t - 1) < x * m


@given(st.integers(1, 400), st.integers(1, 400), st.integers(0, 300))
def test_ceil_times_root(p, q, m):
    r = Root(Fraction(p, q), 2)
    t = ceil_times(r, m)
    assert t >= r * m
    assert t == 0 or t - 1 < r * m
