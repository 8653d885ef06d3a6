"""Exact transversal copy counts and (H,F)-coefficients.

A transversal copy of a k-vertex pattern P uses one vertex from each class.
Which copies live on a transversal ``(v_1, ..., v_k)`` depends only on the
set of class pairs ``{i, j}`` with ``v_i ~ v_j``, so every transversal is
reduced to a bitmask over class pairs and the per-mask copy numbers are
looked up in a small table.  Everything is integer or Fraction arithmetic.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Union

import numpy as np

from .model import BipartiteGraph, KPartiteGraph, Pattern, PatternPair, TupleView, pair_index

Host = Union[KPartiteGraph, TupleView]

DEFAULT_TRANSVERSAL_BUDGET = 10**9
_CHUNK_CELLS = 1 << 20


class ZeroDenominator(ZeroDivisionError):
    """n_F(G) = 0: the (H,F)-coefficient is undefined."""


class BudgetExceeded(RuntimeError):
    """The requested exact enumeration is larger than the configured budget."""


@dataclass(frozen=True)
class CopyCount:
    value: int
    convention: str = "unlabeled"

    def __int__(self):
        return self.value


@dataclass(frozen=True)
class Coefficient:
    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise ZeroDenominator("n_F(G) = 0, coefficient undefined")

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)


# ---------------------------------------------------------------------------
# pattern-level tables


@lru_cache(maxsize=None)
def _image_masks(P: Pattern) -> tuple[int, ...]:
    """Edge mask of sigma(P) for every permutation sigma, in itertools order."""
    idx = pair_index(P.k)
    out = []
    for perm in permutations(range(P.k)):
        m = 0
        for u, v in P.edges:
            a, b = perm[u], perm[v]
            m |= 1 << idx[(a, b) if a < b else (b, a)]
        out.append(m)
    return tuple(out)


def automorphism_count(P: Pattern) -> int:
    """|Aut(P)|, by checking every permutation of the vertex set."""
    own = P.edge_mask()
    return sum(1 for m in _image_masks(P) if m == own)


@lru_cache(maxsize=None)
def labeled_in_mask(P: Pattern, host_mask: int) -> int:
    """Bijections [k] -> classes mapping P's edges into the host pair set."""
    return sum(1 for m in _image_masks(P) if m & ~host_mask == 0)


@lru_cache(maxsize=None)
def copies_in_mask(P: Pattern, host_mask: int) -> int:
    """Unlabeled copies of P spanning a k-vertex host with the given pair set."""
    labeled = labeled_in_mask(P, host_mask)
    aut = automorphism_count(P)
    q, r = divmod(labeled, aut)
    assert r == 0, "labeled count not divisible by |Aut|"
    return q


def copies_in_pattern(P: Pattern, host: Pattern) -> int:
    """Copies of P inside the k-vertex graph ``host`` (the host as its own 1-blowup)."""
    if P.k != host.k:
        raise ValueError("pattern and host need the same vertex count")
    return copies_in_mask(P, host.edge_mask())


# ---------------------------------------------------------------------------
# graph-level enumeration


def _check_host(P: Pattern, G: Host, budget: int) -> None:
    if P.k != G.k:
        raise ValueError(f"pattern has {P.k} vertices but the graph has {G.k} classes")
    total = G.product_size()
    if total > budget:
        raise BudgetExceeded(f"{total} transversals exceed the budget of {budget}")


def _mask_block(G: Host, rows: slice) -> np.ndarray:
    """Class-pair masks for transversals whose class-0 vertex is in ``rows``."""
    members = [np.asarray(m, dtype=np.intp) for m in G.members]
    members[0] = members[0][rows]
    k = len(members)
    shape = tuple(len(m) for m in members)
    out = np.zeros(shape, dtype=np.int64)
    if 0 in shape:
        return out
    A = G.adjacency
    for (i, j), bit in pair_index(k).items():
        block = A[np.ix_(members[i], members[j])].astype(np.int64) << bit
        view = [1] * k
        view[i], view[j] = shape[i], shape[j]
        out |= block.reshape(view)
    return out


def _row_chunks(G: Host) -> list[slice]:
    sizes = G.sizes
    n0 = sizes[0]
    if n0 == 0:
        return [slice(0, 0)]
    rest = max(1, math.prod(sizes[1:]))
    step = max(1, _CHUNK_CELLS // rest)
    return [slice(s, min(n0, s + step)) for s in range(0, n0, step)]


def _weights(P: Pattern, masks: np.ndarray, labeled: bool = False) -> np.ndarray:
    uniq, inv = np.unique(masks, return_inverse=True)
    fn = labeled_in_mask if labeled else copies_in_mask
    table = np.array([fn(P, int(m)) for m in uniq], dtype=np.int64)
    return table[inv].reshape(masks.shape)


def transversal_weights(P: Pattern, G: Host, budget: int = DEFAULT_TRANSVERSAL_BUDGET) -> np.ndarray:
    """Tensor of shape ``G.sizes``: copies of P on each transversal."""
    _check_host(P, G, budget)
    if G.product_size() == 0:
        return np.zeros(G.sizes, dtype=np.int64)
    return _weights(P, _mask_block(G, slice(None)))


def count_copies(
    P: Pattern,
    G: Host,
    convention: str = "unlabeled",
    workers: int = 1,
    budget: int = DEFAULT_TRANSVERSAL_BUDGET,
) -> CopyCount:
    """Number of transversal copies of P in G.

    The labeled count is accumulated per transversal and divided by |Aut(P)|
    for the unlabeled convention.  The outermost vertex choice is split into
    chunks; with ``workers > 1`` chunks run concurrently and the integer sum
    is the same for any schedule.
    """
    if convention not in ("unlabeled", "labeled"):
        raise ValueError(f"unknown convention {convention!r}")
    _check_host(P, G, budget)
    if G.product_size() == 0:
        return CopyCount(0, convention)

    def run(rows: slice) -> int:
        return int(_weights(P, _mask_block(G, rows), labeled=True).sum(dtype=object))

    chunks = _row_chunks(G)
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            labeled = sum(pool.map(run, chunks))
    else:
        labeled = sum(map(run, chunks))
    if convention == "labeled":
        return CopyCount(labeled, "labeled")
    q, r = divmod(labeled, automorphism_count(P))
    assert r == 0
    return CopyCount(q, "unlabeled")


def n_copies(P: Pattern, G: Host, **kw) -> int:
    return count_copies(P, G, **kw).value


def density(G0: BipartiteGraph) -> Fraction:
    """|E| / (|V_1| |V_2|)."""
    if G0.k != 2:
        raise ValueError("density is defined for bipartite graphs")
    return Fraction(len(G0.edges), G0.sizes[0] * G0.sizes[1])


def hf_coefficient(pp: PatternPair, G: Host, **kw) -> Coefficient:
    """n_H(G) / n_F(G); raises ZeroDenominator when G has no F-copy."""
    nF = n_copies(pp.F, G, **kw)
    if nF == 0:
        raise ZeroDenominator("n_F(G) = 0, the (H,F)-coefficient is undefined")
    return Coefficient(n_copies(pp.H, G, **kw), nF)
