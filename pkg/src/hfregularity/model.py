"""Graphs, patterns, partitions and verdicts, plus their text formats.

Vertices of a k-partite graph are the dense integers ``0..n-1``; class ``i``
is the contiguous range fixed by the cumulative class sizes.  Patterns live on
``0..k-1`` internally and are written 1-based in pattern files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import accumulate
from typing import Iterable, Sequence

import numpy as np

from .exact import Level, format_rational, level_str

Edge = tuple[int, int]

_PAIR = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")


class InstanceError(ValueError):
    """Malformed or invalid instance data, optionally tied to an input line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def canon_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


# ---------------------------------------------------------------------------
# patterns


@dataclass(frozen=True)
class Pattern:
    """A graph on the vertex set ``0..k-1``."""

    k: int
    edges: frozenset[Edge]

    def __post_init__(self):
        edges = frozenset(canon_edge(*e) for e in self.edges)
        for u, v in edges:
            if u == v:
                raise InstanceError(f"self-loop at pattern vertex {u + 1}")
            if not (0 <= u < self.k and 0 <= v < self.k):
                raise InstanceError(f"pattern edge ({u + 1},{v + 1}) outside [1,{self.k}]")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def complete(cls, k: int) -> Pattern:
        return cls(k, frozenset((i, j) for i in range(k) for j in range(i + 1, k)))

    @classmethod
    def empty(cls, k: int) -> Pattern:
        return cls(k, frozenset())

    def edge_mask(self) -> int:
        """Edges as a bitmask over the ``pair_index`` ordering of ``0..k-1``."""
        idx = pair_index(self.k)
        return sum(1 << idx[e] for e in self.edges)

    def relabel(self, perm: Sequence[int]) -> Pattern:
        """Image under ``i -> perm[i]``."""
        return Pattern(self.k, frozenset(canon_edge(perm[u], perm[v]) for u, v in self.edges))

    def is_connected(self) -> bool:
        if self.k == 1:
            return True
        adj = {i: set() for i in range(self.k)}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        seen, stack = {0}, [0]
        while stack:
            for w in adj[stack.pop()] - seen:
                seen.add(w)
                stack.append(w)
        return len(seen) == self.k

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)


def pair_index(k: int) -> dict[Edge, int]:
    """Fixed bit position of every unordered pair of ``0..k-1``."""
    out = {}
    for i in range(k):
        for j in range(i + 1, k):
            out[(i, j)] = len(out)
    return out


@dataclass(frozen=True)
class PatternPair:
    """The triple (H, F, e) with F a proper subgraph of H and e in E(H) minus E(F).

    Vertices are relabeled on construction so that e becomes ``(0, 1)``; the
    remaining vertices keep their relative order.  ``source_e`` remembers
    the edge as it was given.
    """

    H: Pattern
    F: Pattern
    e: Edge = (0, 1)
    source_e: Edge | None = field(default=None, compare=False)

    def __post_init__(self):
        k = self.H.k
        if k < 2:
            raise InstanceError("patterns need k >= 2")
        if self.F.k != k:
            raise InstanceError("H and F must share the vertex set [k]")
        e = canon_edge(*self.e)
        if not self.F.edges < self.H.edges:
            raise InstanceError("F must be a proper subgraph of H")
        if e not in self.H.edges or e in self.F.edges:
            raise InstanceError(f"e=({e[0] + 1},{e[1] + 1}) must be an edge of H but not of F")
        if self.source_e is None:
            object.__setattr__(self, "source_e", e)
        if e != (0, 1):
            rest = [i for i in range(k) if i not in e]
            perm = [0] * k
            for new, old in enumerate([e[0], e[1], *rest]):
                perm[old] = new
            object.__setattr__(self, "H", self.H.relabel(perm))
            object.__setattr__(self, "F", self.F.relabel(perm))
            object.__setattr__(self, "e", (0, 1))

    @property
    def k(self) -> int:
        return self.H.k

    @property
    def H_minus(self) -> Pattern:
        return Pattern(self.k, self.H.edges - {self.e})

    @classmethod
    def density(cls) -> PatternPair:
        """(K_2, empty pair): the coefficient is the edge density."""
        return cls(Pattern.complete(2), Pattern.empty(2))

    @classmethod
    def clustering(cls) -> PatternPair:
        """(K_3, P_2) with the path 1-3-2: the clustering coefficient."""
        return cls(Pattern.complete(3), Pattern(3, frozenset({(0, 2), (1, 2)})))


def _pairs_text(edges: Iterable[Edge]) -> str:
    return "".join(f"({u + 1},{v + 1})" for u, v in sorted(edges))


def serialize_pattern(pp: PatternPair) -> str:
    return (
        f"k={pp.k}; H={_pairs_text(pp.H.edges)}; F={_pairs_text(pp.F.edges)}; "
        f"e={_pairs_text([pp.e])}\n"
    )


def parse_pattern(text: str) -> PatternPair:
    fields: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        for chunk in line.split(";"):
            chunk = chunk.strip()
            if not chunk or chunk.startswith("#"):
                continue
            key, sep, value = chunk.partition("=")
            if not sep:
                raise InstanceError(f"expected key=value, got {chunk!r}", lineno)
            fields[key.strip()] = value.strip()
    missing = {"k", "H", "F", "e"} - fields.keys()
    if missing:
        raise InstanceError(f"pattern file missing {sorted(missing)}")
    try:
        k = int(fields["k"])
    except ValueError:
        raise InstanceError(f"bad k: {fields['k']!r}") from None

    def pairs(s: str) -> frozenset[Edge]:
        found = [(int(a) - 1, int(b) - 1) for a, b in _PAIR.findall(s)]
        if _PAIR.sub("", s).strip():
            raise InstanceError(f"unparseable pair list {s!r}")
        return frozenset(canon_edge(u, v) for u, v in found)

    e = pairs(fields["e"])
    if len(e) != 1:
        raise InstanceError("e must be exactly one pair")
    return PatternPair(Pattern(k, pairs(fields["H"])), Pattern(k, pairs(fields["F"])), next(iter(e)))


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True, eq=False)
class KPartiteGraph:
    """A k-partite graph whose classes are consecutive ranges of vertex ids."""

    sizes: tuple[int, ...]
    edges: frozenset[Edge]

    def __eq__(self, other):
        if not isinstance(other, KPartiteGraph):
            return NotImplemented
        return self.sizes == other.sizes and self.edges == other.edges

    def __hash__(self):
        return hash((self.sizes, self.edges))

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "edges", frozenset(canon_edge(*e) for e in self.edges))
        validate(self)

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        return (0, *accumulate(self.sizes))

    @property
    def classes(self) -> tuple[range, ...]:
        o = self.offsets
        return tuple(range(o[i], o[i + 1]) for i in range(self.k))

    @cached_property
    def class_of(self) -> tuple[int, ...]:
        return tuple(c for c, s in enumerate(self.sizes) for _ in range(s))

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        if self.edges:
            us, vs = zip(*self.edges)
            a[list(us), list(vs)] = True
            a[list(vs), list(us)] = True
        return a

    @property
    def members(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(c) for c in self.classes)

    def product_size(self) -> int:
        out = 1
        for s in self.sizes:
            out *= s
        return out


def validate(G: KPartiteGraph) -> None:
    """Check every KPartiteGraph invariant; all constructors route through here."""
    if len(G.sizes) < 1:
        raise InstanceError("a k-partite graph needs at least one class")
    for i, s in enumerate(G.sizes):
        if s < 1:
            raise InstanceError(f"class {i + 1} is empty")
    n = sum(G.sizes)
    bounds = (0, *accumulate(G.sizes))
    cls = [0] * n
    for c in range(len(G.sizes)):
        for v in range(bounds[c], bounds[c + 1]):
            cls[v] = c
    for u, v in G.edges:
        if not (0 <= u < n and 0 <= v < n):
            raise InstanceError(f"unknown vertex in edge ({u},{v})")
        if cls[u] == cls[v]:
            raise InstanceError(f"intra-class edge ({u},{v})")


class BipartiteGraph(KPartiteGraph):
    """The k = 2 case, with side 1 = class 0 and side 2 = class 1."""

    def __post_init__(self):
        super().__post_init__()
        if self.k != 2:
            raise InstanceError(f"bipartite graph needs 2 classes, got {self.k}")

    @classmethod
    def from_graph(cls, G: KPartiteGraph) -> BipartiteGraph:
        if isinstance(G, BipartiteGraph):
            return G
        return cls(G.sizes, G.edges)

    @classmethod
    def from_matrix(cls, matrix) -> BipartiteGraph:
        m = np.asarray(matrix, dtype=bool)
        n1, n2 = m.shape
        return cls((n1, n2), frozenset((int(i), n1 + int(j)) for i, j in zip(*np.nonzero(m))))

    @property
    def sides(self) -> tuple[range, range]:
        return self.classes  # type: ignore[return-value]

    @cached_property
    def biadjacency(self) -> np.ndarray:
        n1 = self.sizes[0]
        return self.adjacency[:n1, n1:]

    @property
    def density(self) -> Fraction:
        return Fraction(len(self.edges), self.sizes[0] * self.sizes[1])


def _relabel_classes(G: KPartiteGraph, parts: Sequence[Sequence[int]]) -> KPartiteGraph:
    new_id = {}
    for part in parts:
        for v in sorted(part):
            new_id[v] = len(new_id)
    edges = frozenset(
        canon_edge(new_id[u], new_id[v]) for u, v in G.edges if u in new_id and v in new_id
    )
    cls = BipartiteGraph if len(parts) == 2 else KPartiteGraph
    return cls(tuple(len(p) for p in parts), edges)


def induced_subgraph(G: KPartiteGraph, U: Sequence[Iterable[int]]) -> KPartiteGraph:
    """G[U_1, ..., U_k], relabeled densely with class and id order preserved."""
    if len(U) != G.k:
        raise InstanceError(f"need {G.k} subsets, got {len(U)}")
    parts = []
    for i, (Ui, Vi) in enumerate(zip(U, G.classes)):
        Ui = sorted(set(Ui))
        if not Ui:
            raise InstanceError(f"subset {i + 1} is empty")
        stray = [v for v in Ui if v not in Vi]
        if stray:
            raise InstanceError(f"subset {i + 1} contains vertices outside class {i + 1}: {stray}")
        parts.append(Ui)
    return _relabel_classes(G, parts)


@dataclass(frozen=True)
class TupleView:
    """Transversal view of G on clusters X_1..X_k: slot i may use X_i ∩ V_i.

    Clusters may repeat or straddle classes; an empty intersection just
    yields no transversals.
    """

    graph: KPartiteGraph
    members: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return self.graph.k

    @property
    def adjacency(self) -> np.ndarray:
        return self.graph.adjacency

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(m) for m in self.members)

    def product_size(self) -> int:
        out = 1
        for s in self.sizes:
            out *= s
        return out

    def transversals(self) -> Iterable[tuple[int, ...]]:
        from itertools import product

        return product(*self.members)

    def as_graph(self) -> KPartiteGraph:
        """The induced k-partite graph; requires every slot nonempty."""
        return induced_subgraph(self.graph, self.members)


def induced_tuple_subgraph(G: KPartiteGraph, X: Sequence[Iterable[int]]) -> TupleView:
    if len(X) != G.k:
        raise InstanceError(f"need {G.k} clusters, got {len(X)}")
    members = tuple(
        tuple(sorted(set(Xi).intersection(Vi))) for Xi, Vi in zip(X, G.classes)
    )
    return TupleView(G, members)


def serialize_graph(G: KPartiteGraph) -> str:
    lines = [f"k={G.k}", "classes " + " ".join(map(str, G.sizes)), "edges"]
    lines.extend(f"({u},{v})" for u, v in sorted(G.edges))
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> KPartiteGraph:
    """Parse the graph file format.

    Statements are separated by newlines or ``;``: ``k=<int>``, then
    ``classes <s_1> ... <s_k>``, then ``edges`` followed by ``(u,v)`` pairs.
    """
    stmts: list[tuple[int, str]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        stmts.extend((lineno, s.strip()) for s in line.split(";") if s.strip())
    if len(stmts) < 2:
        raise InstanceError("expected k=<int> and classes header", 1)

    lineno, head = stmts[0]
    m = re.fullmatch(r"k\s*=\s*(\d+)", head)
    if not m:
        raise InstanceError(f"malformed header {head!r}, expected k=<int>", lineno)
    k = int(m.group(1))

    lineno, head = stmts[1]
    words = head.split()
    if not words or words[0] != "classes":
        raise InstanceError(f"malformed header {head!r}, expected classes ...", lineno)
    try:
        sizes = tuple(int(w) for w in words[1:])
    except ValueError:
        raise InstanceError(f"non-integer class size in {head!r}", lineno) from None
    if len(sizes) != k:
        raise InstanceError(f"k={k} but {len(sizes)} class sizes given", lineno)
    if any(s < 1 for s in sizes):
        raise InstanceError("class sizes must be positive", lineno)

    n = sum(sizes)
    bounds = (0, *accumulate(sizes))
    cls = [c for c in range(k) for _ in range(bounds[c], bounds[c + 1])]
    edges: set[Edge] = set()
    rest = stmts[2:]
    if rest:
        lineno, first = rest[0]
        if not first.startswith("edges"):
            raise InstanceError(f"expected 'edges', got {first!r}", lineno)
        rest[0] = (lineno, first[len("edges"):])
    for lineno, chunk in rest:
        if _PAIR.sub("", chunk).strip():
            raise InstanceError(f"unparseable edge text {chunk!r}", lineno)
        for a, b in _PAIR.findall(chunk):
            u, v = int(a), int(b)
            for w in (u, v):
                if not 0 <= w < n:
                    raise InstanceError(f"unknown vertex {w}", lineno)
            if u == v or cls[u] == cls[v]:
                raise InstanceError(f"intra-class edge ({u},{v})", lineno)
            e = canon_edge(u, v)
            if e in edges:
                raise InstanceError(f"duplicate edge ({u},{v})", lineno)
            edges.add(e)
    if k == 2:
        return BipartiteGraph(sizes, frozenset(edges))
    return KPartiteGraph(sizes, frozenset(edges))


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class VertexPartition:
    clusters: tuple[frozenset[int], ...]
    ground: frozenset[int] = None  # type: ignore[assignment]

    def __post_init__(self):
        clusters = [frozenset(c) for c in self.clusters]
        if not clusters:
            raise InstanceError("a partition needs at least one cluster")
        seen: set[int] = set()
        for c in clusters:
            if not c:
                raise InstanceError("empty cluster")
            if seen & c:
                raise InstanceError(f"clusters overlap on {sorted(seen & c)}")
            seen |= c
        ground = frozenset(seen) if self.ground is None else frozenset(self.ground)
        if seen != ground:
            raise InstanceError("clusters do not cover the ground set exactly")
        object.__setattr__(self, "clusters", tuple(sorted(clusters, key=min)))
        object.__setattr__(self, "ground", ground)

    @property
    def order(self) -> int:
        return len(self.clusters)

    @cached_property
    def cluster_of(self) -> dict[int, int]:
        return {v: i for i, c in enumerate(self.clusters) for v in c}

    @classmethod
    def from_labels(cls, labels: Sequence[int], vertices: Sequence[int] | None = None):
        vertices = range(len(labels)) if vertices is None else vertices
        groups: dict[int, set[int]] = {}
        for v, lab in zip(vertices, labels):
            groups.setdefault(lab, set()).add(v)
        return cls(tuple(frozenset(g) for g in groups.values()))

    @classmethod
    def singletons(cls, vertices: Iterable[int]) -> VertexPartition:
        return cls(tuple(frozenset([v]) for v in vertices))

    @classmethod
    def of_classes(cls, G: KPartiteGraph) -> VertexPartition:
        return cls(tuple(frozenset(c) for c in G.classes))


def serialize_partition(P: VertexPartition) -> str:
    return "".join(" ".join(map(str, sorted(c))) + "\n" for c in P.clusters)


def parse_partition(text: str) -> VertexPartition:
    clusters = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            clusters.append(frozenset(int(w) for w in line.split()))
        except ValueError:
            raise InstanceError(f"non-integer vertex id in {line!r}", lineno) from None
    return VertexPartition(tuple(clusters))


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Witness:
    subsets: tuple[tuple[int, ...], ...]
    reference: Fraction
    observed: Fraction

    @property
    def deviation(self) -> Fraction:
        return abs(self.observed - self.reference)

    def to_json(self) -> dict:
        return {
            "subsets": [list(s) for s in self.subsets],
            "reference": format_rational(self.reference),
            "observed": format_rational(self.observed),
            "deviation": format_rational(self.deviation),
        }


REGULAR, IRREGULAR, UNDEFINED, NO_WITNESS = "regular", "irregular", "undefined", "no_witness"


@dataclass(frozen=True)
class RegularityVerdict:
    """Outcome of a regularity check.

    ``status`` is one of regular / irregular / undefined (the notion does not
    apply, e.g. zero F-copies) / no_witness (a sampled probe found nothing,
    which certifies nothing).
    """

    notion: str
    eps: Level
    status: str
    witness: Witness | None = None
    irregular_mass: Fraction | None = None
    enumerated: int = 0
    details: dict = field(default_factory=dict, compare=False)

    @property
    def regular(self) -> bool | None:
        if self.status == REGULAR:
            return True
        if self.status == IRREGULAR:
            return False
        return None

    def to_json(self, elapsed: float | None = None) -> dict:
        out = {
            "notion": self.notion,
            "eps": level_str(self.eps),
            "status": self.status,
            "regular": self.regular,
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.irregular_mass is not None:
            out["mass"] = format_rational(self.irregular_mass)
        out["enumerated"] = self.enumerated
        if self.details:
            out["details"] = self.details
        out["elapsed"] = elapsed
        return out
