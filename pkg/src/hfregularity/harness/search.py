"""Exhaustive minimum-order search over set partitions (restricted growth strings)."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

from ..model import IRREGULAR, REGULAR, BipartiteGraph, InstanceError, KPartiteGraph, PatternPair, VertexPartition
from ..regularity import EXACT, CheckBudget, check_hf_regular_partition, check_regular_partition

DEFAULT_MAX_N = 12


class SearchTooLarge(InstanceError):
    pass


def restricted_growth_strings(n: int, blocks: int) -> Iterator[tuple[int, ...]]:
    """RGS a_0..a_{n-1} (a_0 = 0, a_i <= 1 + max prefix) with exactly ``blocks``
    distinct values, in lexicographic order."""
    if n == 0:
        if blocks == 0:
            yield ()
        return
    if not 1 <= blocks <= n:
        return
    a = [0] * n

    def rec(i: int, used: int):
        if i == n:
            if used == blocks:
                yield tuple(a)
            return
        remaining = n - i
        for v in range(min(used + 1, blocks)):
            new_used = max(used, v + 1)
            if blocks - new_used > remaining - 1:
                continue
            a[i] = v
            yield from rec(i + 1, new_used)

    yield from rec(1, 1)


def set_partitions(items: Sequence[int], blocks: int) -> Iterator[list[list[int]]]:
    for rgs in restricted_growth_strings(len(items), blocks):
        parts: list[list[int]] = [[] for _ in range(blocks)]
        for x, b in zip(items, rgs):
            parts[b].append(x)
        yield parts


@dataclass(frozen=True)
class SearchResult:
    order: int | None
    partition: VertexPartition | None
    examined: int
    notion: str

    def to_json(self) -> dict:
        return {
            "notion": self.notion,
            "order": self.order,
            "partition": None if self.partition is None else [sorted(c) for c in self.partition.clusters],
            "examined": self.examined,
        }


def _encoding(P: VertexPartition, n: int) -> tuple[int, ...]:
    """Canonical RGS of P over 0..n-1 (clusters numbered by first vertex)."""
    lab = P.cluster_of
    return tuple(lab[v] for v in range(n))


def _side_pure_candidates(G0: BipartiteGraph, order: int) -> list[VertexPartition]:
    V1, V2 = (list(c) for c in G0.classes)
    out = []
    for r1 in range(1, min(order - 1, len(V1)) + 1):
        r2 = order - r1
        if r2 > len(V2):
            continue
        for p1, p2 in product(set_partitions(V1, r1), set_partitions(V2, r2)):
            out.append(VertexPartition(tuple(frozenset(c) for c in p1 + p2)))
    return sorted(out, key=lambda P: _encoding(P, G0.n))


def min_partition_order(
    G: KPartiteGraph,
    notion: str,
    eps,
    pp: PatternPair | None = None,
    max_n: int = DEFAULT_MAX_N,
    budget: CheckBudget = EXACT,
) -> SearchResult:
    """Smallest-order partition passing the exact partition checker.

    Orders are tried in increasing order and, within an order, partitions
    in lexicographic RGS order; the first passing one is returned.  The
    bipartite notion ranges over side-pure partitions only.  ``order`` is
    None when nothing passes (e.g. the hf notion is undefined for n_H = 0).
    """
    if G.n > max_n:
        raise SearchTooLarge(f"{G.n} vertices exceed the exhaustive-search limit {max_n}")
    examined = 0
    if notion == "bipartite":
        G0 = BipartiteGraph.from_graph(G)
        for order in range(2, G0.n + 1):
            for P in _side_pure_candidates(G0, order):
                examined += 1
                if check_regular_partition(G0, P, eps, budget).status == REGULAR:
                    return SearchResult(order, P, examined, notion)
        return SearchResult(None, None, examined, notion)
    if notion != "hf":
        raise ValueError(f"unknown notion {notion!r}")
    if pp is None:
        raise ValueError("the hf notion needs a pattern pair")
    cache: dict = {}
    vertices = list(range(G.n))
    for order in range(1, G.n + 1):
        for parts in set_partitions(vertices, order):
            examined += 1
            P = VertexPartition(tuple(frozenset(c) for c in parts))
            v = check_hf_regular_partition(G, P, pp, eps, budget, cache=cache)
            if v.status == REGULAR:
                return SearchResult(order, P, examined, notion)
            if v.status not in (REGULAR, IRREGULAR):
                return SearchResult(None, None, examined, notion)
    return SearchResult(None, None, examined, notion)
