"""Exact and sampled checkers for epsilon-regularity and epsilon-(H,F)-regularity.

Exact mode enumerates every tuple of nonempty subsets, one per class, in
lexicographic order of their bitmasks (bit ``j`` of a class mask is the
class's ``j``-th vertex).  Subset sums are formed for all tuples at once by
contracting the per-transversal weight tensor with 0/1 indicator matrices,
then the acceptance predicates are evaluated exactly: size thresholds
through :func:`ceil_times`, deviations as Fractions (or against a
:class:`Root` level by powering both sides).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .counting import BudgetExceeded, n_copies, transversal_weights
from .exact import Level, as_level, ceil_times
from .model import (
    IRREGULAR,
    NO_WITNESS,
    REGULAR,
    UNDEFINED,
    BipartiteGraph,
    InstanceError,
    KPartiteGraph,
    PatternPair,
    RegularityVerdict,
    TupleView,
    VertexPartition,
    Witness,
    induced_subgraph,
)

DEFAULT_MAX_ENUMERATIONS = 1 << 24
_CHUNK_CELLS = 1 << 18


@dataclass(frozen=True)
class CheckBudget:
    """Exact mode ignores the sampling fields; sampled mode never certifies regularity."""

    mode: str = "exact"
    max_enumerations: int = DEFAULT_MAX_ENUMERATIONS
    sample_count: int = 10_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"unknown mode {self.mode!r}")


EXACT = CheckBudget()


def _positive(eps) -> Level:
    eps = as_level(eps)
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return eps


def subset_indicators(n: int) -> np.ndarray:
    """Row r is the 0/1 indicator of the subset with bitmask r + 1."""
    masks = np.arange(1, 1 << n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.int64)


def _decode(mask: int, members: Sequence[int]) -> tuple[int, ...]:
    return tuple(v for j, v in enumerate(members) if mask >> j & 1)


def _first_hit(
    n_rows: int,
    row_cells: int,
    scan: Callable[[int, int], tuple[int | None, int]],
    workers: int,
) -> tuple[int | None, int]:
    """Lexicographically first hit over row chunks.

    ``scan(lo, hi)`` returns (flat index of its first hit or None, cells
    counted before that hit, inclusive).  The earliest chunk wins no matter
    how chunks were scheduled.
    """
    step = max(1, _CHUNK_CELLS // max(1, row_cells))
    chunks = [(lo, min(n_rows, lo + step)) for lo in range(0, n_rows, step)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: scan(*c), chunks))
    else:
        results = []
        for c in chunks:
            results.append(scan(*c))
            if results[-1][0] is not None:
                break
    counted = 0
    for (lo, _), (hit, seen) in zip(chunks, results):
        counted += seen
        if hit is not None:
            return lo * row_cells + hit, counted
    return None, counted


# ---------------------------------------------------------------------------
# bipartite regularity


def _bipartite_table(n1: int, n2: int, d: Fraction, eps: Level) -> np.ndarray:
    """bad[s1, s2, E]: an admissible s1 x s2 subgraph with E edges deviates by more than eps."""
    lo1, lo2 = max(1, ceil_times(eps, n1)), max(1, ceil_times(eps, n2))
    bad = np.zeros((n1 + 1, n2 + 1, n1 * n2 + 1), dtype=bool)
    for s1 in range(lo1, n1 + 1):
        for s2 in range(lo2, n2 + 1):
            area = s1 * s2
            for E in range(area + 1):
                bad[s1, s2, E] = abs(Fraction(E, area) - d) > eps
    return bad


def check_bipartite_regular(
    G0: BipartiteGraph, eps, budget: CheckBudget = EXACT
) -> RegularityVerdict:
    """Is every S_1 x S_2 with |S_i| >= eps |V_i| within eps of d(G0)?"""
    eps = _positive(eps)
    G0 = BipartiteGraph.from_graph(G0)
    if budget.mode == "sampled":
        return sampled_irregularity_probe(G0, None, eps, budget)
    n1, n2 = G0.sizes
    rows, cols = (1 << n1) - 1, (1 << n2) - 1
    if rows * cols > budget.max_enumerations:
        raise BudgetExceeded(
            f"{rows * cols} subset pairs exceed max_enumerations={budget.max_enumerations}"
        )
    d = G0.density
    bad = _bipartite_table(n1, n2, d, eps)
    A = G0.biadjacency.astype(np.int64)
    M1, M2 = subset_indicators(n1), subset_indicators(n2)
    pop2 = M2.sum(axis=1)
    right = A @ M2.T  # n1 x cols

    def scan(lo: int, hi: int):
        block = M1[lo:hi]
        E = block @ right
        hits = bad[block.sum(axis=1)[:, None], pop2[None, :], E].ravel()
        if hits.any():
            first = int(hits.argmax())
            return first, first + 1
        return None, hits.size

    hit, counted = _first_hit(rows, cols, scan, budget.workers)
    if hit is None:
        return RegularityVerdict("bipartite", eps, REGULAR, enumerated=counted)
    r1, r2 = divmod(hit, cols)
    S1 = _decode(r1 + 1, G0.members[0])
    S2 = _decode(r2 + 1, G0.members[1])
    observed = Fraction(int(A[np.ix_([s for s in S1], [s - n1 for s in S2])].sum()), len(S1) * len(S2))
    return RegularityVerdict(
        "bipartite", eps, IRREGULAR, Witness((S1, S2), d, observed), enumerated=counted
    )


# ---------------------------------------------------------------------------
# (H,F)-regularity


def _subset_sums(W: np.ndarray, indicators: list[np.ndarray]) -> np.ndarray:
    """Contract every axis of W with its indicator matrix (rows = subsets)."""
    T = W
    for axis, M in enumerate(indicators):
        T = np.moveaxis(np.tensordot(T, M, axes=([axis], [1])), -1, axis)
    return T


def check_hf_regular(
    G: KPartiteGraph | TupleView, pp: PatternPair, eps, budget: CheckBudget = EXACT
) -> RegularityVerdict:
    """(H,F)-regularity: every induced G' with n_F(G') >= eps n_F(G) has
    coefficient within eps of G's.  Undefined when n_F(G) = 0."""
    eps = _positive(eps)
    if pp.k != G.k:
        raise ValueError("pattern and graph disagree on k")
    if budget.mode == "sampled":
        return sampled_irregularity_probe(G, pp, eps, budget)
    return hf_scan(G, pp, eps, eps, budget)


def hf_scan(
    G: KPartiteGraph | TupleView,
    pp: PatternPair,
    survive,
    tolerance,
    budget: CheckBudget = EXACT,
) -> RegularityVerdict:
    """Exact scan with separate levels: subgraphs with n_F(G') >= survive * n_F(G)
    must have coefficient within ``tolerance`` of G's."""
    eps = _positive(tolerance)
    survive = _positive(survive)
    members = G.members
    sizes = tuple(len(m) for m in members)
    n_tuples = math.prod((1 << s) - 1 for s in sizes)
    if n_tuples > budget.max_enumerations:
        raise BudgetExceeded(
            f"{n_tuples} subset tuples exceed max_enumerations={budget.max_enumerations}"
        )
    WH = transversal_weights(pp.H, G)
    WF = transversal_weights(pp.F, G)
    nH, nF = int(WH.sum(dtype=object)), int(WF.sum(dtype=object))
    if nF == 0:
        return RegularityVerdict("hf", eps, UNDEFINED, details={"reason": "n_F(G) = 0"})
    if math.factorial(G.k) * math.prod(sizes) >= 1 << 62:
        raise BudgetExceeded("counts would overflow 64-bit subset sums")
    ref = Fraction(nH, nF)
    need = ceil_times(survive, nF)
    inds = [subset_indicators(s) for s in sizes]
    row_cells = n_tuples // inds[0].shape[0]
    verdict_cache: dict[tuple[int, int], bool] = {}

    def deviates(h: int, f: int) -> bool:
        key = (h, f)
        if key not in verdict_cache:
            verdict_cache[key] = abs(Fraction(h, f) - ref) > eps
        return verdict_cache[key]

    def scan(lo: int, hi: int):
        sub = [inds[0][lo:hi], *inds[1:]]
        SF = _subset_sums(WF, sub).ravel()
        idx = np.flatnonzero(SF >= need)
        if idx.size:
            SH = _subset_sums(WH, sub).ravel()
            pairs = np.stack([SH[idx], SF[idx]], axis=1)
            uniq, inv = np.unique(pairs, axis=0, return_inverse=True)
            bad_u = np.array([deviates(int(h), int(f)) for h, f in uniq], dtype=bool)
            bad = bad_u[inv.ravel()]
            if bad.any():
                first = int(idx[int(bad.argmax())])
                return first, first + 1
        return None, SF.size

    hit, counted = _first_hit(inds[0].shape[0], row_cells, scan, budget.workers)
    if hit is None:
        return RegularityVerdict("hf", eps, REGULAR, enumerated=counted)
    coords = np.unravel_index(hit, tuple(M.shape[0] for M in inds))
    U = tuple(_decode(int(r) + 1, m) for r, m in zip(coords, members))
    loc = tuple(np.flatnonzero(inds[i][int(r)]) for i, r in enumerate(coords))
    h = int(WH[np.ix_(*loc)].sum())
    f = int(WF[np.ix_(*loc)].sum())
    return RegularityVerdict(
        "hf", eps, IRREGULAR, Witness(U, ref, Fraction(h, f)), enumerated=counted,
        details={"n_F": f, "n_F_threshold": need},
    )


# ---------------------------------------------------------------------------
# partitions


def is_side_pure(G0: KPartiteGraph, Q: VertexPartition) -> bool:
    cls = G0.class_of
    return all(len({cls[v] for v in X}) == 1 for X in Q.clusters)


def _require_partition_of(G: KPartiteGraph, P: VertexPartition) -> None:
    if P.ground != frozenset(range(G.n)):
        raise InstanceError("partition does not cover the graph's vertex set exactly")


def check_regular_partition(
    G0: BipartiteGraph, Q: VertexPartition, eps, budget: CheckBudget = EXACT
) -> RegularityVerdict:
    """Sum |Y_1||Y_2| over cross-side cluster pairs that are not eps-regular;
    regular iff the sum is at most eps n^2 with n = |V(G0)|."""
    eps = _positive(eps)
    G0 = BipartiteGraph.from_graph(G0)
    _require_partition_of(G0, Q)
    if not is_side_pure(G0, Q):
        raise InstanceError("partition is not side-pure")
    side = G0.class_of
    Q1 = [X for X in Q.clusters if side[min(X)] == 0]
    Q2 = [X for X in Q.clusters if side[min(X)] == 1]
    mass = 0
    enumerated = 0
    bad_pairs = []
    exact = CheckBudget(max_enumerations=budget.max_enumerations, workers=budget.workers)
    for i, Y1 in enumerate(Q1):
        for j, Y2 in enumerate(Q2):
            v = check_bipartite_regular(induced_subgraph(G0, [Y1, Y2]), eps, exact)
            enumerated += v.enumerated
            if v.status == IRREGULAR:
                mass += len(Y1) * len(Y2)
                bad_pairs.append([sorted(Y1), sorted(Y2)])
    n = G0.n
    ok = mass <= eps * (n * n)
    return RegularityVerdict(
        "bipartite-partition",
        eps,
        REGULAR if ok else IRREGULAR,
        irregular_mass=Fraction(mass),
        enumerated=enumerated,
        details={"n": n, "irregular_pairs": bad_pairs, "order": Q.order},
    )


def tuple_copy_counts(G: KPartiteGraph, P: VertexPartition, pattern) -> dict[tuple[int, ...], int]:
    """H-copies of G grouped by the cluster of each class's vertex."""
    W = transversal_weights(pattern, G)
    lab = P.cluster_of
    inds = []
    for m in G.members:
        C = np.zeros((P.order, len(m)), dtype=np.int64)
        for j, v in enumerate(m):
            C[lab[v], j] = 1
        inds.append(C)
    T = _subset_sums(W, inds)
    return {tuple(int(c) for c in idx): int(T[idx]) for idx in zip(*np.nonzero(T))}


def check_hf_regular_partition(
    G: KPartiteGraph,
    P: VertexPartition,
    pp: PatternPair,
    eps,
    budget: CheckBudget = EXACT,
    cache: dict | None = None,
) -> RegularityVerdict:
    """(H,F)-regular partition: at most eps n_H(G) copies may lie in cluster tuples
    whose view is not eps-(H,F)-regular (undefined views count as bad)."""
    eps = _positive(eps)
    _require_partition_of(G, P)
    counts = tuple_copy_counts(G, P, pp.H)
    nH = sum(counts.values())
    if nH == 0:
        return RegularityVerdict("hf-partition", eps, UNDEFINED, details={"reason": "n_H(G) = 0"})
    cache = {} if cache is None else cache
    exact = CheckBudget(max_enumerations=budget.max_enumerations, workers=budget.workers)
    mass = 0
    enumerated = 0
    bad = []
    for tup in sorted(counts):
        X = [P.clusters[c] for c in tup]
        members = tuple(tuple(sorted(Xi.intersection(Vi))) for Xi, Vi in zip(X, G.classes))
        if members not in cache:
            v = check_hf_regular(TupleView(G, members), pp, eps, exact)
            cache[members] = (v.status, v.enumerated)
        status, seen = cache[members]
        enumerated += seen
        if status != REGULAR:
            mass += counts[tup]
            bad.append({"clusters": list(tup), "copies": counts[tup], "status": status})
    ok = mass <= eps * nH
    return RegularityVerdict(
        "hf-partition",
        eps,
        REGULAR if ok else IRREGULAR,
        irregular_mass=Fraction(mass),
        enumerated=enumerated,
        details={"n_H": nH, "bad_tuples": bad, "order": P.order},
    )


# ---------------------------------------------------------------------------
# sampling

_SAMPLE_BLOCK = 256


def sampled_irregularity_probe(
    G, pp: PatternPair | None, eps, budget: CheckBudget
) -> RegularityVerdict:
    """Draw random subset tuples; report the first violating one.

    ``pp=None`` probes bipartite regularity.  Sample block ``b`` uses the
    stream ``default_rng([seed, b])`` so the transcript is independent of
    the worker count.  Finding nothing is reported as ``no_witness``.
    """
    eps = _positive(eps)
    notion = "bipartite" if pp is None else "hf"
    members = G.members
    sizes = [len(m) for m in members]
    if pp is None:
        G = BipartiteGraph.from_graph(G)
        A = G.biadjacency.astype(np.int64)
        ref = G.density
        lo = [max(1, ceil_times(eps, s)) for s in sizes]
        if any(l > s for l, s in zip(lo, sizes)):
            return RegularityVerdict(notion, eps, NO_WITNESS, details=_probe_details(budget, 0))
    else:
        WH = transversal_weights(pp.H, G)
        WF = transversal_weights(pp.F, G)
        nF = int(WF.sum())
        if nF == 0:
            return RegularityVerdict(notion, eps, UNDEFINED, details={"reason": "n_F(G) = 0"})
        ref = Fraction(int(WH.sum()), nF)
        need = ceil_times(eps, nF)
        lo = [1] * len(sizes)

    def draw(rng):
        locs = []
        for l, s in zip(lo, sizes):
            size = int(rng.integers(l, s + 1))
            locs.append(np.sort(rng.permutation(s)[:size]))
        return locs

    def test(locs):
        if pp is None:
            e = int(A[np.ix_(*locs)].sum())
            obs = Fraction(e, len(locs[0]) * len(locs[1]))
            return abs(obs - ref) > eps, obs
        f = int(WF[np.ix_(*locs)].sum())
        if f < need:
            return False, None
        obs = Fraction(int(WH[np.ix_(*locs)].sum()), f)
        return abs(obs - ref) > eps, obs

    def run_block(b: int):
        rng = np.random.default_rng([budget.seed, b])
        start = b * _SAMPLE_BLOCK
        for i in range(start, min(budget.sample_count, start + _SAMPLE_BLOCK)):
            locs = draw(rng)
            hit, obs = test(locs)
            if hit:
                return i, locs, obs
        return None

    n_blocks = -(-budget.sample_count // _SAMPLE_BLOCK)
    if budget.workers > 1:
        with ThreadPoolExecutor(max_workers=budget.workers) as pool:
            found = [r for r in pool.map(run_block, range(n_blocks)) if r is not None]
        found = found[:1]
    else:
        found = []
        for b in range(n_blocks):
            r = run_block(b)
            if r is not None:
                found = [r]
                break
    if not found:
        return RegularityVerdict(
            notion, eps, NO_WITNESS, details=_probe_details(budget, budget.sample_count)
        )
    i, locs, obs = found[0]
    U = tuple(tuple(members[c][int(j)] for j in loc) for c, loc in enumerate(locs))
    return RegularityVerdict(
        notion, eps, IRREGULAR, Witness(U, ref, obs), enumerated=i + 1,
        details=_probe_details(budget, i + 1),
    )


def _probe_details(budget: CheckBudget, drawn: int) -> dict:
    return {"mode": "sampled", "seed": budget.seed, "samples_drawn": drawn}


def verify_witness(G, pp: PatternPair | None, eps, witness: Witness) -> bool:
    """Recompute a witness from scratch with the plain counting routines."""
    eps = as_level(eps)
    if pp is None:
        G = BipartiteGraph.from_graph(G)
        S1, S2 = witness.subsets
        if not (len(S1) >= eps * G.sizes[0] and len(S2) >= eps * G.sizes[1]):
            return False
        sub = induced_subgraph(G, [S1, S2])
        observed = Fraction(len(sub.edges), len(S1) * len(S2))
        return (
            observed == witness.observed
            and G.density == witness.reference
            and abs(observed - G.density) > eps
        )
    parent = G.graph if isinstance(G, TupleView) else G
    nF, nH = n_copies(pp.F, G), n_copies(pp.H, G)
    sub = induced_subgraph(parent, witness.subsets)
    f, h = n_copies(pp.F, sub), n_copies(pp.H, sub)
    if f == 0 or nF == 0 or not (f >= eps * nF):
        return False
    ref, obs = Fraction(nH, nF), Fraction(h, f)
    return ref == witness.reference and obs == witness.observed and abs(obs - ref) > eps
