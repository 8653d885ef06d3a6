"""Command-line entry point (``hfreg``).

Exit codes: 0 regular/pass, 1 irregular/fail (with witness), 2 undefined,
vacuous or inconclusive, 3 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

from .counting import BudgetExceeded, ZeroDenominator, count_copies, density, hf_coefficient
from .exact import format_rational, parse_rational
from .harness.experiment import load_config, run_experiment
from .harness.search import DEFAULT_MAX_N, min_partition_order
from .harness.suites import SUITES, SuiteError, verify_suite
from .harness.tower import tower
from .model import (
    IRREGULAR,
    REGULAR,
    BipartiteGraph,
    InstanceError,
    parse_instance,
    parse_partition,
    parse_pattern,
    serialize_graph,
    serialize_partition,
)
from .reduction import PreconditionError, reduce_partition, side_refinement
from .regularity import (
    DEFAULT_MAX_ENUMERATIONS,
    CheckBudget,
    check_bipartite_regular,
    check_hf_regular,
    check_hf_regular_partition,
    check_regular_partition,
)
from .semiblowup import (
    SemiBlowupDescriptor,
    build_blowup,
    build_semi_blowup,
    load_descriptor,
)

EXIT_OK, EXIT_FAIL, EXIT_UNDEFINED, EXIT_ERROR = 0, 1, 2, 3


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _emit(args, report: dict, rows: list[dict] | None = None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    if args.out:
        prefix = Path(args.out)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        Path(f"{prefix}.json").write_text(text)
        rows = rows if rows is not None else [_flat(report)]
        cols = sorted({c for r in rows for c in r})
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        Path(f"{prefix}.csv").write_text(buf.getvalue())


def _flat(report: dict) -> dict:
    return {k: v for k, v in report.items() if not isinstance(v, (dict, list))}


def _elapsed(args, t0: float):
    return round(time.perf_counter() - t0, 6) if args.timing else None


def _budget(args) -> CheckBudget:
    return CheckBudget(
        mode=args.mode,
        max_enumerations=args.max_enumerations,
        sample_count=args.samples,
        seed=args.seed,
        workers=args.workers,
    )


def _status_code(status: str) -> int:
    return {REGULAR: EXIT_OK, IRREGULAR: EXIT_FAIL}.get(status, EXIT_UNDEFINED)


# ---------------------------------------------------------------------------
# commands


def cmd_count(args) -> int:
    G = parse_instance(_read(args.graph))
    pp = parse_pattern(_read(args.pattern))
    conv = "labeled" if args.labeled else "unlabeled"
    report = {
        "convention": conv,
        "n_H": str(count_copies(pp.H, G, conv, workers=args.workers).value),
        "n_F": str(count_copies(pp.F, G, conv, workers=args.workers).value),
    }
    _emit(args, report)
    return EXIT_OK


def cmd_coeff(args) -> int:
    G = parse_instance(_read(args.graph))
    pp = parse_pattern(_read(args.pattern))
    try:
        c = hf_coefficient(pp, G, workers=args.workers)
    except ZeroDenominator:
        _emit(args, {"coefficient": None, "status": "undefined", "n_F": "0"})
        return EXIT_UNDEFINED
    _emit(args, {"n_H": str(c.numerator), "n_F": str(c.denominator),
                 "coefficient": format_rational(c.value), "status": "defined"})
    return EXIT_OK


def cmd_density(args) -> int:
    G = BipartiteGraph.from_graph(parse_instance(_read(args.graph)))
    _emit(args, {"edges": len(G.edges), "sizes": list(G.sizes), "density": format_rational(density(G))})
    return EXIT_OK


def _write_graph(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_blowup(args) -> int:
    pp = parse_pattern(_read(args.pattern))
    sizes = [int(s) for s in args.sizes.split(",")]
    _write_graph(args, serialize_graph(build_blowup(pp.H if args.graph == "H" else pp.F, sizes)))
    return EXIT_OK


def cmd_semiblowup(args) -> int:
    if args.descriptor:
        _, _, G = load_descriptor(args.descriptor)
    else:
        if not (args.pattern and args.g0 and args.n):
            raise InstanceError("semiblowup needs --descriptor or all of --pattern, --g0, --n")
        pp = parse_pattern(_read(args.pattern))
        G0 = BipartiteGraph.from_graph(parse_instance(_read(args.g0)))
        G = build_semi_blowup(pp, G0, args.n, balanced=args.balanced)
        if args.write_descriptor:
            a, b = (x + 1 for x in pp.source_e)
            desc = SemiBlowupDescriptor(args.pattern, (a, b), args.g0, (args.n,))
            Path(args.write_descriptor).write_text(str(desc))
    _write_graph(args, serialize_graph(G))
    return EXIT_OK


def cmd_check(args) -> int:
    t0 = time.perf_counter()
    G = parse_instance(_read(args.graph))
    eps = parse_rational(args.eps)
    budget = _budget(args)
    P = parse_partition(_read(args.partition)) if args.partition else None
    if args.notion == "hf":
        if not args.pattern:
            raise InstanceError("--notion hf needs --pattern")
        pp = parse_pattern(_read(args.pattern))
        if P is None:
            v = check_hf_regular(G, pp, eps, budget)
        else:
            v = check_hf_regular_partition(G, P, pp, eps, budget)
    else:
        G0 = BipartiteGraph.from_graph(G)
        v = check_bipartite_regular(G0, eps, budget) if P is None else check_regular_partition(G0, P, eps, budget)
    _emit(args, v.to_json(_elapsed(args, t0)))
    return _status_code(v.status)


def cmd_refine(args) -> int:
    G = parse_instance(_read(args.graph))
    P = parse_partition(_read(args.partition))
    Q = side_refinement(P, G.classes[:2])
    text = serialize_partition(Q)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_reduce(args) -> int:
    t0 = time.perf_counter()
    G0 = BipartiteGraph.from_graph(parse_instance(_read(args.g0)))
    pp = parse_pattern(_read(args.pattern))
    P = parse_partition(_read(args.partition))
    eps = parse_rational(args.eps)
    try:
        rep = reduce_partition(pp, G0, P, eps, _budget(args), trusted=args.trusted)
    except PreconditionError as exc:
        _emit(args, {"status": "precondition_failed", "reason": str(exc)})
        return EXIT_UNDEFINED
    report = rep.to_json()
    report["elapsed"] = _elapsed(args, t0)
    row = {"eps_in": report["eps_in"], "eps_out": report["eps_out"], "input_order": rep.input_order,
           "output_order": rep.output_order, "vacuous": rep.vacuous, "status": rep.verdict.status,
           "mass": format_rational(rep.verdict.irregular_mass)}
    _emit(args, report, [row])
    if rep.verdict.status != REGULAR:
        return EXIT_FAIL
    return EXIT_UNDEFINED if rep.vacuous else EXIT_OK


def cmd_search_min(args) -> int:
    t0 = time.perf_counter()
    G = parse_instance(_read(args.graph))
    pp = parse_pattern(_read(args.pattern)) if args.pattern else None
    res = min_partition_order(G, args.notion, parse_rational(args.eps), pp, args.max_n, _budget(args))
    report = res.to_json()
    report["eps"] = args.eps
    report["elapsed"] = _elapsed(args, t0)
    _emit(args, report)
    return EXIT_OK if res.order is not None else EXIT_UNDEFINED


def cmd_verify(args) -> int:
    pp = parse_pattern(_read(args.pattern)) if args.pattern else None
    rep = verify_suite(args.suite, args.trials, args.seed, args.counterexamples, pp=pp)
    report = rep.to_json()
    rows = [{"trial": i, "result": r} for i, r in enumerate(report["results"])]
    _emit(args, report, rows)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_experiment(args) -> int:
    result = run_experiment(load_config(args.config), timing=args.timing)
    sys.stdout.write(json.dumps(result["rows"], indent=2, sort_keys=True) + "\n")
    return EXIT_UNDEFINED if result["report"]["truncated"] else EXIT_OK


def cmd_tower(args) -> int:
    value = tower(args.n)
    report = {"n": args.n, "bit_length": value.bit_length()}
    if args.n >= 1:
        report["expression"] = f"2^{tower(args.n - 1)}"
    # tower(5) has 19729 decimal digits, more than int -> str allows by default
    report["value"] = str(value) if args.n <= 4 else None
    _emit(args, report)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hfreg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, checks: bool = False):
        p.add_argument("--out", help="also write <OUT>.json and <OUT>.csv")
        p.add_argument("--timing", action="store_true", help="record wall-clock time (breaks byte-identical reruns)")
        p.add_argument("--workers", type=int, default=1)
        if checks:
            p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--samples", type=int, default=10_000)
            p.add_argument("--max-enumerations", type=int, default=DEFAULT_MAX_ENUMERATIONS)

    p = sub.add_parser("count", help="transversal copies of H and F")
    p.add_argument("graph")
    p.add_argument("--pattern", required=True)
    p.add_argument("--labeled", action="store_true")
    common(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("coeff", help="(H,F)-coefficient")
    p.add_argument("graph")
    p.add_argument("--pattern", required=True)
    common(p)
    p.set_defaults(func=cmd_coeff)

    p = sub.add_parser("density", help="edge density of a bipartite graph")
    p.add_argument("graph")
    common(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("blowup", help="blowup of H (or F) with the given class sizes")
    p.add_argument("--pattern", required=True)
    p.add_argument("--sizes", required=True, help="comma-separated class sizes")
    p.add_argument("--graph", choices=("H", "F"), default="H")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_blowup)

    p = sub.add_parser("semiblowup", help="H ⊙_e G0")
    p.add_argument("--pattern")
    p.add_argument("--g0")
    p.add_argument("--n", type=int, help="size of classes 3..k")
    p.add_argument("--balanced", action="store_true")
    p.add_argument("--descriptor", help="sidecar descriptor file to rebuild from")
    p.add_argument("--write-descriptor")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_semiblowup)

    p = sub.add_parser("check", help="regularity of a graph or a partition")
    p.add_argument("graph")
    p.add_argument("--notion", choices=("bipartite", "hf"), required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--pattern")
    p.add_argument("--partition", help="check a partition instead of the whole graph")
    common(p, checks=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("refine", help="common refinement of a partition with classes 1 and 2")
    p.add_argument("graph")
    p.add_argument("--partition", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("reduce", help="reduce an (H,F)-regular partition of H ⊙_e G0 to G0")
    p.add_argument("g0")
    p.add_argument("--pattern", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--trusted", action="store_true", help="skip verifying the input partition")
    common(p, checks=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("search-min", help="exhaustive minimum-order regular partition")
    p.add_argument("graph")
    p.add_argument("--notion", choices=("bipartite", "hf"), required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--pattern")
    p.add_argument("--max-n", type=int, default=DEFAULT_MAX_N)
    common(p, checks=True)
    p.set_defaults(func=cmd_search_min)

    p = sub.add_parser("verify", help="run a seeded property suite")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pattern", help="pattern pair for suites that accept one (sparse_obs)")
    p.add_argument("--counterexamples", help="directory for failing-trial files")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="run an experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("tower", help="exact tower function value")
    p.add_argument("n", type=int)
    common(p)
    p.set_defaults(func=cmd_tower)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, SuiteError, BudgetExceeded, ValueError, OSError) as exc:
        print(f"hfreg: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
