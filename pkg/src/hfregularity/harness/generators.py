"""Bipartite and k-partite instance generators; random kinds are seeded."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from ..model import BipartiteGraph, InstanceError, KPartiteGraph

KINDS = ("complete", "empty", "matching", "half_graph", "random_bipartite", "random_kpartite")
RANDOM_KINDS = ("random_bipartite", "random_kpartite")


def _coin(rng: np.random.Generator, shape, p: Fraction) -> np.ndarray:
    # exact Bernoulli(p): uniform integer below the denominator
    return rng.integers(0, p.denominator, size=shape) < p.numerator


def complete_bipartite(n1: int, n2: int) -> BipartiteGraph:
    return BipartiteGraph.from_matrix(np.ones((n1, n2), dtype=bool))


def empty_bipartite(n1: int, n2: int) -> BipartiteGraph:
    return BipartiteGraph((n1, n2), frozenset())


def matching(m: int) -> BipartiteGraph:
    return BipartiteGraph.from_matrix(np.eye(m, dtype=bool))


def half_graph(m: int) -> BipartiteGraph:
    """Edges (i, j) for i <= j on m + m vertices."""
    return BipartiteGraph.from_matrix(np.triu(np.ones((m, m), dtype=bool)))


def random_bipartite(n1: int, n2: int, p, seed: int) -> BipartiteGraph:
    rng = np.random.default_rng(seed)
    return BipartiteGraph.from_matrix(_coin(rng, (n1, n2), Fraction(p)))


def random_kpartite(sizes: Sequence[int], p, seed: int) -> KPartiteGraph:
    rng = np.random.default_rng(seed)
    p = Fraction(p)
    G = KPartiteGraph(tuple(sizes), frozenset())
    cls = G.classes
    edges = set()
    for i in range(G.k):
        for j in range(i + 1, G.k):
            hit = _coin(rng, (len(cls[i]), len(cls[j])), p)
            edges.update((cls[i][a], cls[j][b]) for a, b in zip(*np.nonzero(hit)))
    edges = frozenset((int(u), int(v)) for u, v in edges)
    return BipartiteGraph(G.sizes, edges) if G.k == 2 else KPartiteGraph(G.sizes, edges)


def generate(kind: str, params: dict | None = None, seed: int | None = None):
    """Dispatch on ``kind``.

    params: ``sizes`` (list) or ``m``; ``p`` for the random kinds, which also
    require ``seed``.
    """
    params = dict(params or {})
    if kind not in KINDS:
        raise InstanceError(f"unknown generator kind {kind!r}; choose from {', '.join(KINDS)}")
    if kind in RANDOM_KINDS and seed is None:
        raise InstanceError(f"generator {kind!r} needs a seed")

    def sizes(n: int | None = None) -> list[int]:
        if "sizes" in params:
            out = [int(s) for s in params["sizes"]]
        elif "m" in params:
            out = [int(params["m"])] * (n or 2)
        else:
            raise InstanceError(f"generator {kind!r} needs 'sizes' or 'm'")
        if any(s < 1 for s in out) or (n is not None and len(out) != n):
            raise InstanceError(f"invalid sizes {out} for {kind!r}")
        return out

    if kind == "complete":
        return complete_bipartite(*sizes(2))
    if kind == "empty":
        return empty_bipartite(*sizes(2))
    if kind in ("matching", "half_graph"):
        n1, n2 = sizes(2)
        if n1 != n2:
            raise InstanceError(f"{kind} needs equal sides")
        return matching(n1) if kind == "matching" else half_graph(n1)
    p = Fraction(str(params.get("p", "1/2")))
    if not 0 <= p <= 1:
        raise InstanceError("p must lie in [0, 1]")
    if kind == "random_bipartite":
        return random_bipartite(*sizes(2), p, seed)
    return random_kpartite(sizes(), p, seed)
