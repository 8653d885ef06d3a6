from __future__ import annotations

import itertools
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hfregularity.model import BipartiteGraph, KPartiteGraph, Pattern, PatternPair

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def cross_pairs(sizes):
    offs = list(itertools.accumulate([0, *sizes]))
    return [
        (u, v)
        for i, j in itertools.combinations(range(len(sizes)), 2)
        for u in range(offs[i], offs[i + 1])
        for v in range(offs[j], offs[j + 1])
    ]


@st.composite
def kpartite_graphs(draw, k=st.integers(2, 4), max_size=3):
    k = draw(k) if not isinstance(k, int) else k
    sizes = tuple(draw(st.lists(st.integers(1, max_size), min_size=k, max_size=k)))
    pairs = cross_pairs(sizes)
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return KPartiteGraph(sizes, frozenset(p for p, c in zip(pairs, chosen) if c))


@st.composite
def bipartite_graphs(draw, max_size=4, min_size=1):
    sizes = (draw(st.integers(min_size, max_size)), draw(st.integers(min_size, max_size)))
    pairs = cross_pairs(sizes)
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return BipartiteGraph(sizes, frozenset(p for p, c in zip(pairs, chosen) if c))


@st.composite
def patterns(draw, k):
    pairs = list(itertools.combinations(range(k), 2))
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Pattern(k, frozenset(p for p, c in zip(pairs, chosen) if c))


@st.composite
def pattern_pairs(draw, k=st.integers(2, 4)):
    k = draw(k) if not isinstance(k, int) else k
    pairs = list(itertools.combinations(range(k), 2))
    e = draw(st.sampled_from(pairs))
    others = [p for p in pairs if p != e]
    in_H = draw(st.lists(st.booleans(), min_size=len(others), max_size=len(others)))
    H_rest = [p for p, c in zip(others, in_H) if c]
    in_F = draw(st.lists(st.booleans(), min_size=len(H_rest), max_size=len(H_rest)))
    F = frozenset(p for p, c in zip(H_rest, in_F) if c)
    return PatternPair(Pattern(k, frozenset([e, *H_rest])), Pattern(k, F), e)


def rationals(lo=Fraction(1, 64), hi=Fraction(1)):
    return st.builds(Fraction, st.integers(1, 64), st.integers(1, 64)).filter(lambda x: lo <= x <= hi)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
