"""Executable versions of the reduction from (H,F)-regular partitions of a
semi-blowup to regular partitions of the embedded bipartite graph.

Each step reports the inequalities it relies on, evaluated on the concrete
instance, rather than only a final yes/no.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .counting import density, hf_coefficient, n_copies
from .exact import Level, Root, as_level, format_rational, level_str
from .model import (
    IRREGULAR,
    REGULAR,
    BipartiteGraph,
    InstanceError,
    KPartiteGraph,
    PatternPair,
    RegularityVerdict,
    VertexPartition,
    induced_subgraph,
)
from .regularity import (
    EXACT,
    CheckBudget,
    check_bipartite_regular,
    check_hf_regular,
    check_hf_regular_partition,
    check_regular_partition,
    hf_scan,
)
from .semiblowup import DomainError, build_semi_blowup, is_semi_blowup, pattern_coefficients


class PreconditionError(ValueError):
    pass


def _k2k(k: int) -> int:
    return k ** (2 * k)


def lift_level(eps, k: int) -> Level:
    """sqrt(eps) * k^(2k)."""
    return as_level(Root(Fraction(eps) * _k2k(k) ** 2, 2))


def reduction_level(eps, k: int) -> Level:
    """eps^(1/4) * k^(2k)."""
    return as_level(Root(Fraction(eps) * _k2k(k) ** 4, 4))


# ---------------------------------------------------------------------------
# approximate restriction


@dataclass(frozen=True)
class RestrictionParams:
    alpha: Fraction
    delta: Fraction


@dataclass(frozen=True)
class Restriction:
    kept: tuple[frozenset[int], ...]
    coverage: int
    params: RestrictionParams


def restrict_partition(P: VertexPartition, V: Iterable[int], alpha) -> Restriction:
    """Keep the clusters X with |X ∩ V| >= delta |X|, delta = alpha |V| / |U|."""
    V = frozenset(V)
    alpha = Fraction(alpha)
    if not V:
        raise InstanceError("V must be nonempty")
    if not V <= P.ground:
        raise InstanceError("V must be a subset of the partition's ground set")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    delta = alpha * len(V) / len(P.ground)
    kept = filter_clusters(P.clusters, V, delta)
    return Restriction(kept, sum(len(X & V) for X in kept), RestrictionParams(alpha, delta))


def filter_clusters(clusters, V: frozenset[int], delta) -> tuple[frozenset[int], ...]:
    return tuple(X for X in clusters if len(X & V) >= delta * len(X))


def side_refinement(P: VertexPartition, sides: Sequence[Iterable[int]]) -> VertexPartition:
    """Q_1 ∪ Q_2 with Q_i = {X ∩ V_i : X in P, X ∩ V_i nonempty}."""
    V1, V2 = (frozenset(s) for s in sides)
    if V1 & V2:
        raise InstanceError("sides must be disjoint")
    if not (V1 | V2) <= P.ground:
        raise InstanceError("sides must lie inside the partition's ground set")
    parts = [X & V for V in (V1, V2) for X in P.clusters if X & V]
    return VertexPartition(tuple(parts), V1 | V2)


# ---------------------------------------------------------------------------
# witness lifting


@dataclass
class LiftResult:
    vacuous: bool
    subsets: tuple[tuple[int, ...], ...] | None = None
    checks: dict[str, bool] = field(default_factory=dict)
    values: dict[str, str] = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return not self.vacuous and bool(self.checks) and all(self.checks.values())


def lift_irregularity_witness(
    pp: PatternPair,
    G0: BipartiteGraph,
    S1: Iterable[int],
    S2: Iterable[int],
    eps,
    rest: Sequence[int] | int | None = None,
) -> LiftResult:
    """Turn a bipartite witness at level sqrt(eps) k^(2k) into a k-partite
    witness (S_1, S_2, V_3, ..., V_k) against eps-(H,F)-regularity of H ⊙_e G0.

    ``rest`` sizes classes 3..k (default: |V_1|).
    """
    eps = Fraction(eps)
    k = pp.k
    G0 = BipartiteGraph.from_graph(G0)
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if eps > Fraction(1, _k2k(k)):
        return LiftResult(vacuous=True, values={"reason": "eps > 1/k^(2k)"})
    S1, S2 = tuple(sorted(set(S1))), tuple(sorted(set(S2)))
    level = lift_level(eps, k)
    n1, n2 = G0.sizes
    if not S1 or not S2 or not set(S1) <= set(G0.classes[0]) or not set(S2) <= set(G0.classes[1]):
        raise PreconditionError("S_1, S_2 must be nonempty subsets of the two sides")
    if not (len(S1) >= level * n1 and len(S2) >= level * n2):
        raise PreconditionError("subsets are below the size threshold sqrt(eps) k^(2k) |V_i|")
    d = density(G0)
    d_star = density(induced_subgraph(G0, [S1, S2]))
    if not abs(d_star - d) > level:
        raise PreconditionError("(S_1, S_2) is not an irregularity witness at level sqrt(eps) k^(2k)")

    rest = n1 if rest is None else rest
    G = build_semi_blowup(pp, G0, rest)
    W = (S1, S2, *(tuple(c) for c in G.classes[2:]))
    GW = induced_subgraph(G, W)
    nF_W, nF = n_copies(pp.F, GW), n_copies(pp.F, G)
    prod_rest = math.prod(G.sizes[2:])
    prod_all = math.prod(G.sizes)
    lvl_sq = eps * _k2k(k) ** 2
    fact = math.factorial(k)
    coeffs = pattern_coefficients(pp)
    f_d, f_ds = coeffs.f(d), coeffs.f(d_star)
    checks = {
        "nF_W >= |S1||S2||V3|...|Vk|": nF_W >= len(S1) * len(S2) * prod_rest,
        "|S1||S2||V3|...|Vk| >= eps'^2 |V1|...|Vk|": len(S1) * len(S2) * prod_rest >= lvl_sq * prod_all,
        "eps'^2 |V1|...|Vk| >= (eps'^2/k!) nF(G)": lvl_sq * prod_all >= lvl_sq / fact * nF,
        "(eps'^2/k!) nF(G) >= eps nF(G)": lvl_sq / fact * nF >= eps * nF,
        "nF_W >= eps nF(G)": nF_W >= eps * nF,
        "coeff(G) = f(d)": hf_coefficient(pp, G).value == f_d,
        "coeff(W) = f(d*)": hf_coefficient(pp, GW).value == f_ds,
        "|f(d*) - f(d)| > eps": abs(f_ds - f_d) > eps,
    }
    if coeffs.b > 0:
        checks["eps <= a/(2b(a+b))"] = eps <= Fraction(coeffs.a, 2 * coeffs.b * (coeffs.a + coeffs.b))
    try:
        checks["g'(f(d)+eps) <= k^(2k)"] = coeffs.g_prime(f_d + eps) <= _k2k(k)
    except DomainError:
        checks["g'(f(d)+eps) <= k^(2k)"] = False
    values = {
        "level": level_str(level),
        "d": format_rational(d),
        "d_star": format_rational(d_star),
        "f(d)": format_rational(f_d),
        "f(d_star)": format_rational(f_ds),
        "nF_W": str(nF_W),
        "nF_G": str(nF),
    }
    return LiftResult(False, W, checks, values)


# ---------------------------------------------------------------------------
# slicing


@dataclass
class SliceCertificate:
    eps: Fraction
    eps_prime: Fraction
    deltas: tuple[Fraction, ...]
    vacuous: bool
    T_verdict: RegularityVerdict
    checks: dict[str, bool]

    @property
    def holds(self) -> bool:
        return all(self.checks.values())


def slice_check(
    T: KPartiteGraph,
    Y: Sequence[Iterable[int]],
    pp: PatternPair,
    eps,
    deltas: Sequence | None = None,
    budget: CheckBudget = EXACT,
) -> SliceCertificate:
    """Check the slicing estimates on T and its slice G = T[Y_1, ..., Y_k]."""
    eps = Fraction(eps)
    Y = [tuple(sorted(set(y))) for y in Y]
    X = T.classes
    if deltas is None:
        deltas = tuple(Fraction(len(y), len(x)) for y, x in zip(Y, X))
    deltas = tuple(Fraction(d) for d in deltas)
    for i, (y, x, dl) in enumerate(zip(Y, X, deltas)):
        if not set(y) <= set(x):
            raise InstanceError(f"Y_{i + 1} exceeds its class")
        if not len(y) >= dl * len(x):
            raise InstanceError(f"|Y_{i + 1}| < delta_{i + 1} |X_{i + 1}|")
    G = induced_subgraph(T, Y)
    if not is_semi_blowup(G, pp):
        raise InstanceError("T[Y_1, ..., Y_k] is not a semi-blowup of H")
    Delta = math.prod(deltas)
    fact = math.factorial(pp.k)
    eps_prime = eps * fact / Delta
    nF_G, nF_T = n_copies(pp.F, G), n_copies(pp.F, T)
    T_verdict = check_hf_regular(T, pp, eps, budget)
    checks = {"nF(G) >= (Delta/k!) nF(T)": nF_G >= Delta / fact * nF_T, "2 eps <= eps'": 2 * eps <= eps_prime}
    # taking S = Y needs n_F(G) >= eps' n_F(G), i.e. eps' <= 1
    if T_verdict.status == REGULAR and eps_prime <= 1:
        checks["coeff(G) = coeff(T) ± eps"] = (
            abs(hf_coefficient(pp, G).value - hf_coefficient(pp, T).value) <= eps
        )
        checks["survivors within 2 eps of coeff(G)"] = (
            hf_scan(G, pp, eps_prime, 2 * eps, budget).status == REGULAR
        )
        checks["G is eps'-(H,F)-regular"] = check_hf_regular(G, pp, eps_prime, budget).status == REGULAR
    return SliceCertificate(eps, eps_prime, deltas, eps_prime >= 1, T_verdict, checks)


# ---------------------------------------------------------------------------
# partition reduction


@dataclass
class ReductionReport:
    input_order: int
    output_order: int
    eps_in: Fraction
    eps_out: Level
    vacuous: bool
    verdict: RegularityVerdict
    input_verdict: RegularityVerdict | None
    output_partition: VertexPartition
    diagnostics: dict

    def to_json(self) -> dict:
        return {
            "input_order": self.input_order,
            "output_order": self.output_order,
            "eps_in": format_rational(self.eps_in),
            "eps_out": level_str(self.eps_out),
            "eps_out_float": float(self.eps_out),
            "vacuous": self.vacuous,
            "input_verdict": None if self.input_verdict is None else self.input_verdict.to_json(),
            "verdict": self.verdict.to_json(),
            "output_partition": [sorted(c) for c in self.output_partition.clusters],
            "diagnostics": self.diagnostics,
        }


def reduce_partition(
    pp: PatternPair,
    G0: BipartiteGraph,
    P: VertexPartition,
    eps,
    budget: CheckBudget = EXACT,
    trusted: bool = False,
    deltas: Sequence | None = None,
) -> ReductionReport:
    """Common refinement of P with {V_1, V_2} and its regularity at eps^(1/4) k^(2k).

    Unless ``trusted``, P is first verified to be eps-(H,F)-regular on the
    balanced semi-blowup and a PreconditionError is raised otherwise.
    """
    eps = Fraction(eps)
    G0 = BipartiteGraph.from_graph(G0)
    k = pp.k
    n = G0.sizes[0]
    G = build_semi_blowup(pp, G0, n, balanced=True)
    if P.ground != frozenset(range(G.n)):
        raise InstanceError("P is not a partition of the semi-blowup's vertex set")
    input_verdict = None
    if not trusted:
        input_verdict = check_hf_regular_partition(G, P, pp, eps, budget)
        if input_verdict.status != REGULAR:
            raise PreconditionError(f"P is not eps-(H,F)-regular (status {input_verdict.status})")

    eps_out = reduction_level(eps, k)
    vacuous = eps_out >= 1
    V = [frozenset(c) for c in G.classes]
    Q = side_refinement(P, (V[0], V[1]))
    verdict = check_regular_partition(G0, Q, eps_out, budget)

    if deltas is None:
        half = eps_out * Fraction(1, 2)
        deltas = [half, half] + [Fraction(1, 2 * k)] * (k - 2)
    deltas = [as_level(dl) for dl in deltas]
    fam = [filter_clusters(P.clusters, V[i], deltas[i]) for i in range(k)]
    star = [[X & V[i] for X in fam[i]] for i in range(k)]

    pair_cache: dict = {}

    def irregular(Y1, Y2) -> bool:
        key = (Y1, Y2)
        if key not in pair_cache:
            v = check_bipartite_regular(induced_subgraph(G0, [Y1, Y2]), eps_out, budget)
            pair_cache[key] = v.status == IRREGULAR
        return pair_cache[key]

    def edges_between(Y1, Y2) -> int:
        return sum(1 for u, w in G0.edges if u in Y1 and w in Y2)

    cover = math.prod(sum(len(Y) for Y in star[i]) for i in range(2, k))
    star_edges = sum(edges_between(Y1, Y2) for Y1 in star[0] for Y2 in star[1] if irregular(Y1, Y2))
    star_mass = sum(len(Y1) * len(Y2) for Y1 in star[0] for Y2 in star[1] if irregular(Y1, Y2))
    Q1 = [Y for Y in Q.clusters if Y <= V[0]]
    Q2 = [Y for Y in Q.clusters if Y <= V[1]]
    s1, s2 = set(star[0]), set(star[1])
    outside = sum(len(Y1) * len(Y2) for Y1 in Q1 for Y2 in Q2 if not (Y1 in s1 and Y2 in s2))
    irregular_mass = verdict.irregular_mass or Fraction(0)
    diagnostics = {
        "deltas": [level_str(dl) for dl in deltas],
        "family_sizes": [len(f) for f in fam],
        "star_coverage": [sum(len(Y) for Y in s) for s in star],
        "approx_cover_product": cover,
        "approx_cover_holds": cover >= Fraction(n, 2) ** (k - 2),
        "star_irregular_edges": star_edges,
        "star_irregular_edges_bound": format_rational(eps * 2**k * len(G0.edges)),
        "star_irregular_edges_holds": star_edges <= eps * 2**k * len(G0.edges),
        "star_irregular_mass": star_mass,
        "outside_star_mass": outside,
        "outside_star_bound_holds": outside <= deltas[0] * (n * n),
        "class_size_bound_holds": irregular_mass <= eps_out * (n * n),
        "output_order_bound_holds": Q.order <= 2 * P.order,
    }
    return ReductionReport(
        P.order, Q.order, eps, eps_out, bool(vacuous), verdict, input_verdict, Q, diagnostics
    )
