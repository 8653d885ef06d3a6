"""Seeded property suites for the identities and reductions behind the lower bound.

Every suite draws its instances from ``random.Random(seed)`` and reports one
pass/fail entry per trial.  Failing trials are written as JSON counterexample
files when an output directory is given.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

from ..counting import density, hf_coefficient, n_copies
from ..exact import format_rational
from ..model import (
    IRREGULAR,
    REGULAR,
    BipartiteGraph,
    KPartiteGraph,
    Pattern,
    PatternPair,
    VertexPartition,
    Witness,
    induced_subgraph,
    serialize_graph,
    serialize_pattern,
)
from ..reduction import (
    lift_level,
    lift_irregularity_witness,
    reduce_partition,
    restrict_partition,
    side_refinement,
    slice_check,
    reduction_level,
)
from ..regularity import (
    check_bipartite_regular,
    check_hf_regular,
    check_hf_regular_partition,
    check_regular_partition,
    verify_witness,
)
from ..semiblowup import add_isolated_vertices, build_semi_blowup, pattern_coefficients
from .generators import complete_bipartite, half_graph, matching, random_bipartite, random_kpartite
from .search import min_partition_order

SUITES = ("lemma3", "obs2", "transfer", "claim4", "claim5", "claim6", "fact7", "theorem2", "sparse_obs")


class SuiteError(ValueError):
    pass


@dataclass
class SuiteReport:
    suite: str
    seed: int
    results: list[bool] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def trials(self) -> int:
        return len(self.results)

    @property
    def passed(self) -> int:
        return sum(self.results)

    @property
    def ok(self) -> bool:
        return self.trials > 0 and all(self.results)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "trials": self.trials,
            "passed": self.passed,
            "failed": self.trials - self.passed,
            "results": ["pass" if r else "fail" for r in self.results],
            "failures": self.failures,
            "notes": self.notes,
        }


# ---------------------------------------------------------------------------
# random instances


def random_pattern_pair(rng: random.Random, k: int, connected_F: bool = False) -> PatternPair:
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    if connected_F:
        if k < 3:
            raise SuiteError("a connected F strictly inside H needs k >= 3")
        order = list(range(k))
        rng.shuffle(order)
        tree = {tuple(sorted((order[i], order[rng.randrange(i)]))) for i in range(1, k)}
        spare = [p for p in pairs if p not in tree]
        keep = rng.randrange(len(spare))
        rng.shuffle(spare)
        F = tree | set(spare[:keep])
        extra = spare[keep:]
        H = F | set(rng.sample(extra, rng.randint(1, len(extra))))
    else:
        H = set(rng.sample(pairs, rng.randint(1, len(pairs))))
        Hs = sorted(H)
        F = set(rng.sample(Hs, rng.randrange(len(Hs))))
    e = rng.choice(sorted(H - F))
    return PatternPair(Pattern(k, frozenset(H)), Pattern(k, frozenset(F)), e)


def _random_G0(rng: random.Random, n1: int, n2: int) -> BipartiteGraph:
    p = rng.choice([Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)])
    return random_bipartite(n1, n2, p, rng.getrandbits(32))


def random_partition(rng: random.Random, vertices, max_blocks: int | None = None) -> VertexPartition:
    vertices = list(vertices)
    r = rng.randint(1, max_blocks or len(vertices))
    return VertexPartition.from_labels([rng.randrange(r) for _ in vertices], vertices)


def _instance_json(pp: PatternPair | None = None, **graphs) -> dict:
    out = {}
    if pp is not None:
        out["pattern"] = serialize_pattern(pp)
    for name, g in graphs.items():
        if isinstance(g, KPartiteGraph):
            out[name] = serialize_graph(g)
        elif isinstance(g, VertexPartition):
            out[name] = [sorted(c) for c in g.clusters]
        else:
            out[name] = g if isinstance(g, (int, str, list, dict)) else str(g)
    return out


# ---------------------------------------------------------------------------
# suites


def _semi_blowup_instances(rng: random.Random, trials: int):
    for _ in range(trials):
        k = rng.choice([2, 3, 4])
        pp = random_pattern_pair(rng, k)
        G0 = _random_G0(rng, rng.randint(1, 4), rng.randint(1, 4))
        rest = [rng.randint(1, 4) for _ in range(k - 2)]
        yield pp, G0, build_semi_blowup(pp, G0, rest)


def _lemma3(rng, trials, report):
    for pp, G0, G in _semi_blowup_instances(rng, trials):
        c = pattern_coefficients(pp)
        d = density(G0)
        prod = math.prod(G.sizes)
        ok = (
            c.a >= 1
            and c.a + c.b <= math.factorial(pp.k)
            and n_copies(pp.F, G) == (c.a + c.b * d) * prod
        )
        yield ok, (lambda pp=pp, G0=G0, G=G: _instance_json(pp, G0=G0, G=G))


def _obs2(rng, trials, report):
    for pp, G0, G in _semi_blowup_instances(rng, trials):
        c = pattern_coefficients(pp)
        d = density(G0)
        prod = math.prod(G.sizes)
        nF = n_copies(pp.F, G)
        ok = (
            n_copies(pp.H, G) == d * prod
            and nF >= prod
            and hf_coefficient(pp, G).value == d / (c.a + c.b * d)
        )
        yield ok, (lambda pp=pp, G0=G0, G=G: _instance_json(pp, G0=G0, G=G))


def _random_unit_rational(rng: random.Random) -> Fraction:
    q = rng.randint(1, 1000)
    return Fraction(rng.randint(0, q), q)


def _transfer(rng, trials, report, points: int = 100):
    """g(f(x)) = x, f increasing, f(1) = 1/(a+b), and the g' bound near f's range."""
    seen = set()
    for pp, G0, G in _semi_blowup_instances(rng, trials):
        c = pattern_coefficients(pp)
        seen.add((c.a, c.b))
        xs = sorted({_random_unit_rational(rng) for _ in range(points)})
        fx = [c.f(x) for x in xs]
        bound = pp.k ** (2 * pp.k)
        ok = (
            all(c.g(y) == x for x, y in zip(xs, fx))
            and all(y1 < y2 for y1, y2 in zip(fx, fx[1:]))
            and c.f(1) == Fraction(1, c.a + c.b)
        )
        if c.b > 0:
            eps_max = Fraction(c.a, 2 * c.b * (c.a + c.b))
            for eps in (eps_max, eps_max * _random_unit_rational(rng)):
                ok = ok and all(c.g_prime(y + eps) <= bound for y in fx)
        else:
            ok = ok and all(c.g_prime(y + Fraction(1, 2)) <= bound for y in fx)
        yield ok, (lambda pp=pp, c=c: _instance_json(pp, a=c.a, b=c.b))
    report.notes["distinct_ab"] = len(seen)


_LIFT_EPS_K2 = [Fraction(1, 2**10), Fraction(1, 2**12), Fraction(1, 2**14), Fraction(1, 2**16)]


def _claim4(rng, trials, report):
    found = attempts = 0
    per_k = {2: 0, 3: 0}
    while found < trials and attempts < 50 * max(trials, 1):
        attempts += 1
        if rng.random() < 0.75:
            pp, eps = PatternPair.density(), rng.choice(_LIFT_EPS_K2)
        else:
            pp, eps = random_pattern_pair(rng, 3), Fraction(1, 729**4)
        n = rng.randint(2, 4)
        G0 = _random_G0(rng, n, rng.randint(2, 4))
        v = check_bipartite_regular(G0, lift_level(eps, pp.k))
        if v.status != IRREGULAR:
            continue
        found += 1
        per_k[pp.k] += 1
        S1, S2 = v.witness.subsets
        lift = lift_irregularity_witness(pp, G0, S1, S2, eps)
        G = build_semi_blowup(pp, G0, G0.sizes[0])
        hf = check_hf_regular(G, pp, eps)
        ok = lift.certified and hf.status == IRREGULAR
        if ok:
            sub = induced_subgraph(G, lift.subsets)
            w = Witness(lift.subsets, hf_coefficient(pp, G).value, hf_coefficient(pp, sub).value)
            ok = verify_witness(G, pp, eps, w)
        yield ok, (
            lambda pp=pp, G0=G0, eps=eps, lift=lift: _instance_json(
                pp, G0=G0, eps=format_rational(eps), checks={k: v for k, v in lift.checks.items()}
            )
        )
    report.notes.update({"attempts": attempts, "witnesses_by_k": {str(k): v for k, v in per_k.items()}})


def _claim5(rng, trials, report):
    for _ in range(trials):
        n = rng.randint(1, 20)
        P = random_partition(rng, range(n))
        V = [v for v in range(n) if rng.random() < 0.5] or [rng.randrange(n)]
        q = rng.randint(1, 10)
        alpha = Fraction(rng.randint(1, q), q)
        r = restrict_partition(P, V, alpha)
        ok = r.coverage >= (1 - alpha) * len(V)
        yield ok, (lambda P=P, V=V, alpha=alpha: _instance_json(P=P, V=V, alpha=format_rational(alpha)))


def _claim6(rng, trials, report):
    regular_T = non_vacuous = 0
    for _ in range(trials):
        k = rng.choice([2, 3])
        pp = random_pattern_pair(rng, k)
        G0 = _random_G0(rng, rng.randint(1, 3), rng.randint(1, 3))
        T = build_semi_blowup(pp, G0, [rng.randint(1, 3) for _ in range(k - 2)])
        Y = []
        for c in T.classes:
            pick = [v for v in c if rng.random() < 0.6] or [rng.choice(list(c))]
            Y.append(pick)
        eps = rng.choice([Fraction(1, 2), Fraction(1, 4), Fraction(1, 10), Fraction(1, 50)])
        if n_copies(pp.F, T) == 0:
            yield False, (lambda: {"error": "semi-blowup without F-copies"})
            continue
        cert = slice_check(T, Y, pp, eps)
        regular_T += cert.T_verdict.status == REGULAR
        non_vacuous += cert.T_verdict.status == REGULAR and not cert.vacuous
        yield cert.holds, (
            lambda pp=pp, T=T, Y=Y, eps=eps, cert=cert: _instance_json(
                pp, T=T, Y=[list(y) for y in Y], eps=format_rational(eps), checks=cert.checks
            )
        )
    report.notes.update(T_regular=regular_T, T_regular_non_vacuous=non_vacuous)


SPARSE_EPS = (Fraction(1, 2), Fraction(2, 5), Fraction(1, 4))


def _fact7(rng, trials, report):
    nonempty = 0
    for _ in range(trials):
        eps = rng.choice(SPARSE_EPS)
        n1, n2 = rng.randint(1, 8), rng.randint(1, 8)
        cap = math.floor(eps**3 * n1 * n2)
        m = rng.randint(0, cap)
        cells = rng.sample(range(n1 * n2), m)
        G0 = BipartiteGraph((n1, n2), frozenset((c // n2, n1 + c % n2) for c in cells))
        nonempty += m > 0
        ok = density(G0) <= eps**3 and check_bipartite_regular(G0, eps).status == REGULAR
        yield ok, (lambda G0=G0, eps=eps: _instance_json(G0=G0, eps=format_rational(eps)))
    report.notes["nonempty_graphs"] = nonempty


# partition reduction end to end ---------------------------------------------


def _block_instance(rng: random.Random, n: int):
    """Balanced n+n graph made of complete/empty blocks, with a partition whose
    clusters merge side-1 and side-2 blocks (so they straddle the sides)."""
    r1, r2 = rng.randint(1, n), rng.randint(1, n)
    lab1 = [rng.randrange(r1) for _ in range(n)]
    lab2 = [rng.randrange(r2) for _ in range(n)]
    blocks = {(i, j): rng.random() < 0.5 for i in range(r1) for j in range(r2)}
    edges = frozenset(
        (u, n + w) for u in range(n) for w in range(n) if blocks[(lab1[u], lab2[w])]
    )
    if not edges:
        edges = frozenset({(0, n)})
        lab1[0], lab2[0] = r1, r2  # isolate the forced edge in its own complete block
    G0 = BipartiteGraph((n, n), edges)
    labels = lab1 + [l2 for l2 in lab2]
    P = VertexPartition.from_labels(labels)
    return G0, P


def curated_reduction_cases() -> list[dict]:
    """At least 20 balanced semi-blowups with partitions to be certified regular."""
    clustering = PatternPair.clustering()
    dens = PatternPair.density()
    tiny_k3 = Fraction(1, 2**40)  # eps^(1/4) k^(2k) = 729/1024
    cases = []
    graphs = {
        "complete3": complete_bipartite(3, 3),
        "matching3": matching(3),
        "half3": half_graph(3),
        "complete4": complete_bipartite(4, 4),
        "matching4": matching(4),
        "half4": half_graph(4),
        "random4a": random_bipartite(4, 4, Fraction(1, 2), 11),
        "random4b": random_bipartite(4, 4, Fraction(1, 2), 12),
    }
    for name, G0 in graphs.items():
        n = G0.sizes[0]
        singles = VertexPartition.singletons(range(3 * n))
        cases.append(dict(label=f"K3/{name}/singletons/1/4", pp=clustering, G0=G0, P=singles, eps=Fraction(1, 4)))
        cases.append(dict(label=f"K3/{name}/singletons/2^-40", pp=clustering, G0=G0, P=singles, eps=tiny_k3))
    for name in ("complete3", "complete4"):
        G0 = graphs[name]
        G = build_semi_blowup(clustering, G0, G0.sizes[0])
        cases.append(
            dict(label=f"K3/{name}/classes/1/100", pp=clustering, G0=G0, P=VertexPartition.of_classes(G), eps=Fraction(1, 100))
        )
    for name, eps in (("half3", Fraction(1, 2)), ("half4", Fraction(1, 8))):
        G0 = graphs[name]
        found = min_partition_order(build_semi_blowup(clustering, G0, G0.sizes[0]), "hf", eps, clustering)
        if found.partition is not None:
            label = f"K3/{name}/min-order/{format_rational(eps)}"
            cases.append(dict(label=label, pp=clustering, G0=G0, P=found.partition, eps=eps))
    rng = random.Random(2024)
    for i, eps in enumerate([Fraction(1, 2**20), Fraction(1, 2**24), Fraction(1, 2**32)] * 2):
        G0, P = _block_instance(rng, 3 + i % 2)
        cases.append(dict(label=f"K2/blocks{i}/{format_rational(eps)}", pp=dens, G0=G0, P=P, eps=eps))
    return cases


def reduction_case(case: dict) -> dict:
    """Certify P exhaustively, reduce, and check the output partition."""
    pp, G0, P, eps = case["pp"], case["G0"], case["P"], case["eps"]
    G = build_semi_blowup(pp, G0, G0.sizes[0], balanced=True)
    cert = check_hf_regular_partition(G, P, pp, eps)
    out = {"label": case["label"], "k": pp.k, "certified": cert.status == REGULAR}
    if not out["certified"]:
        out.update(passed=False, vacuous=None)
        return out
    rep = reduce_partition(pp, G0, P, eps, trusted=True)
    out.update(
        passed=rep.verdict.status == REGULAR,
        vacuous=rep.vacuous,
        eps_out=str(rep.eps_out),
        input_order=rep.input_order,
        output_order=rep.output_order,
        mass=format_rational(rep.verdict.irregular_mass),
    )
    return out


def contrapositive_instance(rng: random.Random) -> dict:
    """Random (pp, G0, P, eps): if Q fails at eps' then P must fail at eps."""
    if rng.random() < 0.8:
        pp = PatternPair.density()
        c = rng.choice([1, 2, 4, 8, 12, 15])
        eps = Fraction(c, 256) ** 4  # eps' = c/16
        n = rng.randint(2, 4)
    else:
        pp = PatternPair.clustering()
        eps = Fraction(1, 2**40)
        n = rng.randint(2, 3)
    G0 = random_bipartite(n, n, Fraction(1, 2), rng.getrandbits(32))
    G = build_semi_blowup(pp, G0, n, balanced=True)
    P = random_partition(rng, range(G.n))
    Q = side_refinement(P, G.classes[:2])
    level = reduction_level(eps, pp.k)
    q_fail = check_regular_partition(G0, Q, level).status == IRREGULAR
    p_fail = check_hf_regular_partition(G, P, pp, eps).status != REGULAR
    return {"ok": (not q_fail) or p_fail, "q_fail": q_fail, "p_fail": p_fail, "pp": pp, "G0": G0, "P": P, "eps": eps}


def _theorem2(rng, trials, report):
    cases = curated_reduction_cases()
    rows = []
    for case in cases:
        row = reduction_case(case)
        rows.append(row)
        yield row["passed"], (lambda row=row: row)
    q_failures = 0
    for _ in range(trials):
        inst = contrapositive_instance(rng)
        q_failures += inst["q_fail"]
        yield inst["ok"], (
            lambda inst=inst: _instance_json(inst["pp"], G0=inst["G0"], P=inst["P"], eps=format_rational(inst["eps"]))
        )
    report.notes.update(
        curated=rows,
        curated_count=len(rows),
        non_vacuous_k2=sum(1 for r in rows if r["k"] == 2 and r["vacuous"] is False),
        non_vacuous=sum(1 for r in rows if r["vacuous"] is False),
        contrapositive_trials=trials,
        contrapositive_q_failures=q_failures,
    )


def _sparse_obs(rng, trials, report, pp: PatternPair | None = None):
    if pp is not None and not pp.F.is_connected():
        raise SuiteError("sparse_obs needs a connected F")
    regular_pads = 0
    for _ in range(trials):
        q = pp or random_pattern_pair(rng, rng.choice([3, 4]), connected_F=True)
        cap = 3 if q.k == 3 else 2
        for _attempt in range(100):
            G0 = random_kpartite([rng.randint(1, cap) for _ in range(q.k)], Fraction(3, 4), rng.getrandbits(32))
            if n_copies(q.F, G0) > 0:
                break
        extra = [rng.randint(0, 1) for _ in range(q.k)]
        if not any(extra):
            extra[rng.randrange(q.k)] = 1
        G = add_isolated_vertices(G0, extra)
        eps = rng.choice([Fraction(1, 2), Fraction(1, 4), Fraction(1, 10)])
        same = n_copies(q.F, G) == n_copies(q.F, G0) and n_copies(q.H, G) == n_copies(q.H, G0)
        ok = same
        if same and n_copies(q.F, G0) > 0:
            if check_hf_regular(G, q, eps).status == REGULAR:
                regular_pads += 1
                ok = check_hf_regular(G0, q, eps).status == REGULAR
        yield ok, (lambda q=q, G0=G0, G=G, eps=eps: _instance_json(q, G0=G0, G=G, eps=format_rational(eps)))
    report.notes["regular_padded"] = regular_pads


_RUNNERS: dict[str, Callable] = {
    "lemma3": _lemma3,
    "obs2": _obs2,
    "transfer": _transfer,
    "claim4": _claim4,
    "claim5": _claim5,
    "claim6": _claim6,
    "fact7": _fact7,
    "theorem2": _theorem2,
    "sparse_obs": _sparse_obs,
}


def verify_suite(
    suite: str,
    trials: int,
    seed: int = 0,
    out_dir: str | Path | None = None,
    pp: PatternPair | None = None,
) -> SuiteReport:
    if suite not in _RUNNERS:
        raise SuiteError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    rng = random.Random(seed)
    report = SuiteReport(suite, seed)
    runner = _RUNNERS[suite]
    gen = runner(rng, trials, report, pp) if suite == "sparse_obs" else runner(rng, trials, report)
    for i, (ok, describe) in enumerate(gen):
        report.results.append(bool(ok))
        if not ok:
            info = {"trial": i, **describe()}
            report.failures.append(info)
            if out_dir is not None:
                path = Path(out_dir)
                path.mkdir(parents=True, exist_ok=True)
                (path / f"{suite}_trial{i}.json").write_text(json.dumps(info, indent=2, sort_keys=True) + "\n")
    return report
