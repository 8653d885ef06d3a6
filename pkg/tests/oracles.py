"""Slow, obviously-correct reference implementations used as test oracles.

Nothing here touches numpy or the library's enumeration code: copies are
found by trying every bijection onto every transversal, and regularity by
looping over all subset tuples in lexicographic mask order.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


def _edge(u, v):
    return (u, v) if u < v else (v, u)


def _subsets(members):
    """Nonempty subsets of ``members`` in bitmask order 1, 2, 3, ..."""
    for mask in range(1, 1 << len(members)):
        yield [v for j, v in enumerate(members) if mask >> j & 1]


def copies(pattern_edges, k, members, edges, labeled=False):
    """Transversal copies of a k-vertex pattern; ``members`` lists each class."""
    edges = set(edges)
    total = 0
    for t in itertools.product(*members):
        images, lab = set(), 0
        for perm in itertools.permutations(t):
            img = frozenset(_edge(perm[u], perm[v]) for u, v in pattern_edges)
            if img <= edges:
                lab += 1
                images.add(img)
        total += lab if labeled else len(images)
    return total


def graph_copies(P, G, labeled=False):
    return copies(P.edges, P.k, G.members, G.edges, labeled)


def automorphisms(P):
    return sum(
        1
        for perm in itertools.permutations(range(P.k))
        if frozenset(_edge(perm[u], perm[v]) for u, v in P.edges) == P.edges
    )


def bipartite_witness(side1, side2, edges, eps):
    """Lex-first (S1, S2) with |S_i| >= eps |V_i| and density off by more than eps."""
    edges = set(edges)

    def dens(A, B):
        return Fraction(sum(_edge(a, b) in edges for a in A for b in B), len(A) * len(B))

    d = dens(side1, side2)
    for S1 in _subsets(side1):
        if not len(S1) >= eps * len(side1):
            continue
        for S2 in _subsets(side2):
            if not len(S2) >= eps * len(side2):
                continue
            if abs(dens(S1, S2) - d) > eps:
                return tuple(S1), tuple(S2), d, dens(S1, S2)
    return None


def hf_witness(pp, members, edges, eps):
    """Lex-first subset tuple violating the (H,F) condition; 'undefined' if n_F = 0."""
    nF = copies(pp.F.edges, pp.k, members, edges)
    if nF == 0:
        return "undefined"
    ref = Fraction(copies(pp.H.edges, pp.k, members, edges), nF)
    for U in itertools.product(*[list(_subsets(m)) for m in members]):
        f = copies(pp.F.edges, pp.k, U, edges)
        if f == 0 or not f >= eps * nF:
            continue
        obs = Fraction(copies(pp.H.edges, pp.k, U, edges), f)
        if abs(obs - ref) > eps:
            return tuple(map(tuple, U)), ref, obs
    return None


def partition_mass(G0, clusters, eps):
    """Irregular cross-side mass and the regular/irregular decision."""
    V1, V2 = set(G0.members[0]), set(G0.members[1])
    mass = 0
    for X in clusters:
        for Y in clusters:
            if set(X) <= V1 and set(Y) <= V2:
                if bipartite_witness(sorted(X), sorted(Y), G0.edges, eps) is not None:
                    mass += len(X) * len(Y)
    return mass, mass <= eps * G0.n**2


def rgs_partitions(n):
    """Every set partition of range(n), via brute force over label vectors."""
    seen = set()
    for labels in itertools.product(range(n), repeat=n):
        blocks = {}
        for v, lab in enumerate(labels):
            blocks.setdefault(lab, []).append(v)
        key = frozenset(frozenset(b) for b in blocks.values())
        seen.add(key)
    return seen


def bell(n):
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def tower(n):
    out = 1
    for _ in range(n):
        out = 2**out
    return out


def k2k(k):
    return k ** (2 * k)


def fact(k):
    return math.factorial(k)
