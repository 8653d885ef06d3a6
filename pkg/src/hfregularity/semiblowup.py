"""Blowups, semi-blowups H ⊙_e G0 and the transfer maps between densities and coefficients."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .counting import copies_in_pattern
from .model import (
    BipartiteGraph,
    InstanceError,
    KPartiteGraph,
    Pattern,
    PatternPair,
    canon_edge,
    parse_instance,
    parse_pattern,
)


class DomainError(ValueError):
    pass


def build_blowup(H: Pattern, sizes: Sequence[int]) -> KPartiteGraph:
    if len(sizes) != H.k:
        raise InstanceError(f"need {H.k} class sizes, got {len(sizes)}")
    if any(s < 1 for s in sizes):
        raise InstanceError("blowup class sizes must be positive")
    G = KPartiteGraph(tuple(sizes), frozenset())
    cls = G.classes
    edges = frozenset((u, v) for i, j in H.edges for u in cls[i] for v in cls[j])
    return KPartiteGraph(G.sizes, edges)


def build_semi_blowup(
    pp: PatternPair,
    G0: BipartiteGraph,
    rest: Sequence[int] | int = (),
    balanced: bool = False,
) -> KPartiteGraph:
    """H ⊙_e G0: classes 1 and 2 are G0's sides, the pair (1,2) carries G0.

    ``rest`` gives the sizes of classes 3..k (an int means all equal).
    """
    k = pp.k
    if isinstance(rest, int):
        rest = (rest,) * (k - 2)
    rest = tuple(rest)
    if len(rest) != k - 2:
        raise InstanceError(f"need {k - 2} sizes for classes 3..{k}, got {len(rest)}")
    sizes = (*G0.sizes, *rest)
    if any(s < 1 for s in sizes):
        raise InstanceError("semi-blowup class sizes must be positive")
    if balanced and len(set(sizes)) != 1:
        raise InstanceError(f"balanced semi-blowup needs equal class sizes, got {sizes}")
    blow = build_blowup(pp.H_minus, sizes)
    # G0's vertex ids coincide with classes 1 and 2 of the blowup
    edges = blow.edges | G0.edges
    return KPartiteGraph(sizes, edges)


def is_semi_blowup(G: KPartiteGraph, pp: PatternPair) -> bool:
    """True iff every class pair other than e is complete or empty as H dictates."""
    if G.k != pp.k:
        return False
    cls = G.classes
    A = G.adjacency
    for i in range(G.k):
        for j in range(i + 1, G.k):
            if (i, j) == pp.e:
                continue
            block = A[cls[i].start : cls[i].stop, cls[j].start : cls[j].stop]
            want = (i, j) in pp.H.edges
            if not (block.all() if want else not block.any()):
                return False
    return True


def e_pair_graph(G: KPartiteGraph) -> BipartiteGraph:
    """The bipartite graph between classes 1 and 2."""
    n1, n2 = G.sizes[0], G.sizes[1]
    edges = frozenset(e for e in G.edges if e[1] < n1 + n2)
    return BipartiteGraph((n1, n2), edges)


@dataclass(frozen=True)
class SemiBlowupCoefficients:
    a: int
    b: int
    k: int

    def __post_init__(self):
        if self.a < 1:
            raise AssertionError(f"a = {self.a} < 1")
        if self.b < 0:
            raise AssertionError(f"b = {self.b} < 0")
        if self.a + self.b > math.factorial(self.k):
            raise AssertionError(f"a + b = {self.a + self.b} > k!")

    def f(self, x) -> Fraction:
        """Coefficient of a semi-blowup whose e-pair has density x."""
        x = Fraction(x)
        if not 0 <= x <= 1:
            raise DomainError(f"f is defined on [0,1], got {x}")
        return x / (self.a + self.b * x)

    def g(self, x) -> Fraction:
        """Inverse of f: x -> a x / (1 - b x) on [0, 1/b)."""
        x = Fraction(x)
        if x < 0 or self.b * x >= 1:
            raise DomainError(f"g is defined on [0, 1/b) with b={self.b}, got {x}")
        return self.a * x / (1 - self.b * x)

    def f_prime(self, x) -> Fraction:
        x = Fraction(x)
        if not 0 <= x <= 1:
            raise DomainError(f"f' is defined on [0,1], got {x}")
        return Fraction(self.a) / (self.a + self.b * x) ** 2

    def g_prime(self, x) -> Fraction:
        x = Fraction(x)
        if x < 0 or self.b * x >= 1:
            raise DomainError(f"g' is defined on [0, 1/b) with b={self.b}, got {x}")
        return Fraction(self.a) / (1 - self.b * x) ** 2

    def coefficient(self, d) -> Fraction:
        return self.f(d)


TransferFunctions = SemiBlowupCoefficients


def pattern_coefficients(pp: PatternPair) -> SemiBlowupCoefficients:
    """(a, b) with a = n_F(H^-) and a + b = n_F(H)."""
    a = copies_in_pattern(pp.F, pp.H_minus)
    b = copies_in_pattern(pp.F, pp.H) - a
    return SemiBlowupCoefficients(a, b, pp.k)


_TRANSFER = {"f": "f", "g": "g", "f'": "f_prime", "g'": "g_prime"}


def evaluate_transfer(coeffs: SemiBlowupCoefficients, which: str, x) -> Fraction:
    try:
        name = _TRANSFER[which]
    except KeyError:
        raise ValueError(f"unknown transfer function {which!r}") from None
    return getattr(coeffs, name)(x)


def add_isolated_vertices(G: KPartiteGraph, extra: Sequence[int]) -> KPartiteGraph:
    """Append extra[i] isolated vertices to class i; ids of later classes shift."""
    if len(extra) != G.k or any(x < 0 for x in extra):
        raise InstanceError("need one nonnegative count per class")
    shift = []
    acc = 0
    for x in extra:
        shift.append(acc)
        acc += x
    cls = G.class_of
    edges = frozenset(canon_edge(u + shift[cls[u]], v + shift[cls[v]]) for u, v in G.edges)
    sizes = tuple(s + x for s, x in zip(G.sizes, extra))
    return type(G)(sizes, edges) if G.k == 2 else KPartiteGraph(sizes, edges)


# ---------------------------------------------------------------------------
# sidecar descriptor: "semiblowup: pattern=<file> e=(1,2) g0=<file> n=<int>"

_DESC = re.compile(
    r"semiblowup:\s*pattern=(?P<pattern>\S+)\s+e=\((?P<a>\d+),(?P<b>\d+)\)"
    r"\s+g0=(?P<g0>\S+)\s+n=(?P<n>\d+(?:,\d+)*)\s*$"
)


@dataclass(frozen=True)
class SemiBlowupDescriptor:
    pattern: str
    e: tuple[int, int]
    g0: str
    n: tuple[int, ...]

    def __str__(self):
        return (
            f"semiblowup: pattern={self.pattern} e=({self.e[0]},{self.e[1]}) "
            f"g0={self.g0} n={','.join(map(str, self.n))}\n"
        )


def parse_descriptor(text: str) -> SemiBlowupDescriptor:
    m = _DESC.match(text.strip())
    if not m:
        raise InstanceError(f"malformed semi-blowup descriptor {text.strip()!r}", 1)
    return SemiBlowupDescriptor(
        m["pattern"], (int(m["a"]), int(m["b"])), m["g0"], tuple(int(x) for x in m["n"].split(","))
    )


def load_descriptor(path: str | Path) -> tuple[PatternPair, BipartiteGraph, KPartiteGraph]:
    """Rebuild (pp, G0, H ⊙_e G0) from a descriptor; file paths are relative to it."""
    path = Path(path)
    desc = parse_descriptor(path.read_text())
    base = path.parent
    pp = parse_pattern((base / desc.pattern).read_text())
    e = tuple(sorted(x - 1 for x in desc.e))
    if e != tuple(sorted(pp.source_e)):
        raise InstanceError(f"descriptor e={desc.e} does not match the pattern file's e")
    G0 = BipartiteGraph.from_graph(parse_instance((base / desc.g0).read_text()))
    rest = desc.n[0] if len(desc.n) == 1 else desc.n
    return pp, G0, build_semi_blowup(pp, G0, rest)
