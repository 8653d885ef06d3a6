from __future__ import annotations

from fractions import Fraction

import oracles
import pytest
from conftest import bipartite_graphs, kpartite_graphs, pattern_pairs, rationals
from hypothesis import assume, given
from hypothesis import strategies as st

from hfregularity.counting import BudgetExceeded, n_copies
from hfregularity.exact import Root
from hfregularity.harness.generators import complete_bipartite, matching, random_bipartite
from hfregularity.model import (
    IRREGULAR,
    NO_WITNESS,
    REGULAR,
    UNDEFINED,
    BipartiteGraph,
    InstanceError,
    PatternPair,
    VertexPartition,
    parse_instance,
)
from hfregularity.regularity import (
    CheckBudget,
    check_bipartite_regular,
    check_hf_regular,
    check_hf_regular_partition,
    check_regular_partition,
    subset_indicators,
    verify_witness,
)
from hfregularity.semiblowup import build_blowup, build_semi_blowup

CLUSTER = PatternPair.clustering()
DENSITY = PatternPair.density()
ONE_EDGE_44 = BipartiteGraph((4, 4), frozenset({(0, 4)}))


def test_subset_indicator_order():
    M = subset_indicators(3)
    assert M.shape == (7, 3)
    assert [int("".join(map(str, r[::-1])), 2) for r in M] == list(range(1, 8))


# -- bipartite ---------------------------------------------------------------


@pytest.mark.parametrize("eps", [Fraction(1, 100), Fraction(1, 4), Fraction(1)])
def test_complete_is_regular(eps):
    assert check_bipartite_regular(complete_bipartite(3, 4), eps).status == REGULAR


def test_matching_witness():
    v = check_bipartite_regular(matching(4), Fraction(1, 4))
    assert v.status == IRREGULAR
    assert v.witness.subsets == ((0,), (4,))
    assert v.witness.observed == 1 and v.witness.reference == Fraction(1, 4)
    assert v.witness.deviation > Fraction(1, 4)


def test_sparse_graph_regular():
    assert check_bipartite_regular(ONE_EDGE_44, Fraction(2, 5)).status == REGULAR


@given(bipartite_graphs(), rationals())
def test_bipartite_matches_oracle(G, eps):
    v = check_bipartite_regular(G, eps)
    w = oracles.bipartite_witness(G.members[0], G.members[1], G.edges, eps)
    if w is None:
        assert v.status == REGULAR and v.witness is None
    else:
        assert v.status == IRREGULAR
        assert v.witness.subsets == w[:2]
        assert (v.witness.reference, v.witness.observed) == w[2:]
        assert verify_witness(G, None, eps, v.witness)


@given(bipartite_graphs(), st.integers(1, 400), st.integers(1, 400))
def test_bipartite_root_level_matches_oracle(G, p, q):
    eps = Root(Fraction(p, q), 2)
    assume(eps <= 1)
    v = check_bipartite_regular(G, eps)
    w = oracles.bipartite_witness(G.members[0], G.members[1], G.edges, eps)
    assert (v.status == REGULAR) == (w is None)


@given(bipartite_graphs(), rationals(), rationals())
def test_bipartite_eps_monotone(G, e1, e2):
    lo, hi = min(e1, e2), max(e1, e2)
    if check_bipartite_regular(G, lo).status == REGULAR:
        assert check_bipartite_regular(G, hi).status == REGULAR


@given(bipartite_graphs(max_size=5), rationals(), st.integers(2, 4))
def test_bipartite_workers_agree(G, eps, workers):
    one = check_bipartite_regular(G, eps, CheckBudget(workers=1))
    many = check_bipartite_regular(G, eps, CheckBudget(workers=workers))
    assert one == many


def test_bipartite_budget_guard():
    with pytest.raises(BudgetExceeded):
        check_bipartite_regular(matching(12), Fraction(1, 4), CheckBudget(max_enumerations=1000))


# -- (H,F) ---------------------------------------------------------------


@pytest.mark.parametrize("eps", [Fraction(1, 100), Fraction(1, 3), Fraction(1)])
def test_full_blowup_is_regular(eps):
    G = build_blowup(CLUSTER.H, (2, 2, 2))
    assert check_hf_regular(G, CLUSTER, eps).status == REGULAR


def test_matching_semi_blowup_irregular():
    G = build_semi_blowup(CLUSTER, matching(2), 2)
    v = check_hf_regular(G, CLUSTER, Fraction(1, 100))
    assert v.status == IRREGULAR
    assert verify_witness(G, CLUSTER, Fraction(1, 100), v.witness)
    S1, S2 = v.witness.subsets[:2]
    # the witness pins down G0 to a single edge or a single non-edge
    assert len(S1) == len(S2) == 1


def test_undefined_when_no_f_copies():
    G = parse_instance("k=3; classes 1 1 1; edges (0,1)")
    assert check_hf_regular(G, CLUSTER, Fraction(1, 2)).status == UNDEFINED


@given(st.data())
def test_eps_one_always_regular(data):
    pp = data.draw(pattern_pairs(k=st.integers(2, 3)))
    G = data.draw(kpartite_graphs(k=pp.k, max_size=2))
    v = check_hf_regular(G, pp, 1)
    assert v.status == (UNDEFINED if n_copies(pp.F, G) == 0 else REGULAR)


@given(st.data())
def test_hf_matches_oracle(data):
    pp = data.draw(pattern_pairs(k=st.integers(2, 3)))
    G = data.draw(kpartite_graphs(k=pp.k, max_size=3 if pp.k == 2 else 2))
    eps = data.draw(rationals())
    v = check_hf_regular(G, pp, eps)
    w = oracles.hf_witness(pp, G.members, G.edges, eps)
    if w == "undefined":
        assert v.status == UNDEFINED
    elif w is None:
        assert v.status == REGULAR
    else:
        assert v.status == IRREGULAR
        assert v.witness.subsets == w[0]
        assert (v.witness.reference, v.witness.observed) == w[1:]
        assert verify_witness(G, pp, eps, v.witness)


@given(st.data())
def test_hf_eps_monotone(data):
    pp = data.draw(pattern_pairs(k=st.integers(2, 3)))
    G = data.draw(kpartite_graphs(k=pp.k, max_size=2))
    e1, e2 = data.draw(rationals()), data.draw(rationals())
    if check_hf_regular(G, pp, min(e1, e2)).status == REGULAR:
        assert check_hf_regular(G, pp, max(e1, e2)).status == REGULAR


@given(st.integers(1, 5), st.data())
def test_density_pair_coherence(n1, data):
    # with one side of size 1 both notions impose the same subset threshold
    pairs = [(u, n1) for u in range(n1)]
    chosen = data.draw(st.lists(st.booleans(), min_size=n1, max_size=n1))
    G = BipartiteGraph((n1, 1), frozenset(p for p, c in zip(pairs, chosen) if c))
    eps = data.draw(rationals())
    b = check_bipartite_regular(G, eps)
    h = check_hf_regular(G, DENSITY, eps)
    assert b.status == h.status
    if b.witness:
        assert b.witness.subsets == h.witness.subsets


@given(st.data())
def test_hf_workers_agree(data):
    G = data.draw(kpartite_graphs(k=3, max_size=3))
    eps = data.draw(rationals())
    one = check_hf_regular(G, CLUSTER, eps, CheckBudget(workers=1))
    many = check_hf_regular(G, CLUSTER, eps, CheckBudget(workers=3))
    assert one == many


# -- partitions ------------------------------------------------------------


def test_partition_examples():
    K = complete_bipartite(3, 3)
    v = check_regular_partition(K, VertexPartition.of_classes(K), Fraction(1, 10))
    assert v.status == REGULAR and v.irregular_mass == 0
    M = matching(4)
    v = check_regular_partition(M, VertexPartition.singletons(range(8)), Fraction(1, 100))
    assert v.status == REGULAR and v.irregular_mass == 0
    v = check_regular_partition(M, VertexPartition.of_classes(M), Fraction(1, 5))
    assert v.status == IRREGULAR and v.irregular_mass == 16
    # at eps = 1/4 the mass equals the allowance eps n^2 = 16 exactly
    v = check_regular_partition(M, VertexPartition.of_classes(M), Fraction(1, 4))
    assert v.status == REGULAR and v.irregular_mass == 16


def test_partition_must_be_side_pure():
    M = matching(2)
    with pytest.raises(InstanceError):
        check_regular_partition(M, VertexPartition((frozenset({0, 2}), frozenset({1, 3}))), Fraction(1, 2))


@given(bipartite_graphs(max_size=3), rationals(), st.randoms(use_true_random=False))
def test_partition_matches_oracle(G, eps, rnd):
    labels = [rnd.randint(0, 2) + 3 * G.class_of[v] for v in range(G.n)]
    Q = VertexPartition.from_labels(labels)
    v = check_regular_partition(G, Q, eps)
    mass, ok = oracles.partition_mass(G, [sorted(X) for X in Q.clusters], eps)
    assert v.irregular_mass == mass
    assert (v.status == REGULAR) == ok


def test_hf_partition_examples():
    G = build_blowup(CLUSTER.H, (2, 2, 2))
    v = check_hf_regular_partition(G, VertexPartition.of_classes(G), CLUSTER, Fraction(1, 10))
    assert v.status == REGULAR and v.irregular_mass == 0
    S = build_semi_blowup(CLUSTER, matching(2), 2)
    v = check_hf_regular_partition(S, VertexPartition.of_classes(S), CLUSTER, Fraction(1, 100))
    assert v.status == IRREGULAR and v.irregular_mass == 4 == n_copies(CLUSTER.H, S)


@given(st.data())
def test_hf_partition_eps_one(data):
    G = data.draw(kpartite_graphs(k=3, max_size=2))
    rnd = data.draw(st.randoms(use_true_random=False))
    P = VertexPartition.from_labels([rnd.randint(0, 2) for _ in range(G.n)])
    v = check_hf_regular_partition(G, P, CLUSTER, 1)
    assert v.status == (UNDEFINED if n_copies(CLUSTER.H, G) == 0 else REGULAR)


# -- sampled ---------------------------------------------------------------


def test_sampled_never_certifies():
    v = check_bipartite_regular(complete_bipartite(4, 4), Fraction(1, 4), CheckBudget("sampled", sample_count=500))
    assert v.status == NO_WITNESS and v.regular is None


def test_sampled_finds_matching_witness():
    G = matching(8)
    budget = CheckBudget("sampled", sample_count=10_000, seed=11)
    v = check_bipartite_regular(G, Fraction(1, 4), budget)
    assert v.status == IRREGULAR
    assert verify_witness(G, None, Fraction(1, 4), v.witness)
    assert check_bipartite_regular(G, Fraction(1, 4), budget) == v
    assert check_bipartite_regular(G, Fraction(1, 4), CheckBudget("sampled", 2**24, 10_000, 11, 4)) == v


def test_sampled_hf_witness_verifies():
    G = build_semi_blowup(CLUSTER, random_bipartite(3, 3, Fraction(1, 2), 5), 2)
    v = check_hf_regular(G, CLUSTER, Fraction(1, 50), CheckBudget("sampled", sample_count=2000, seed=3))
    assert v.status in (IRREGULAR, NO_WITNESS)
    if v.witness:
        assert verify_witness(G, CLUSTER, Fraction(1, 50), v.witness)


def test_sixteen_matching_is_quarter_regular():
    # S_1 x S_2 holds at most min(|S_1|, |S_2|) matching edges, and both sides
    # have at least 4 vertices, so the deviation is at most 4/16 - 1/16 = 3/16
    d = Fraction(1, 16)
    worst = max(
        max(abs(Fraction(e, s1 * s2) - d) for e in range(min(s1, s2) + 1))
        for s1 in range(4, 17)
        for s2 in range(4, 17)
    )
    assert worst == Fraction(3, 16) <= Fraction(1, 4)
    v = check_bipartite_regular(matching(16), Fraction(1, 4), CheckBudget("sampled", sample_count=10_000, seed=1))
    assert v.status == NO_WITNESS
