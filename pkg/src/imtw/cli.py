"""Command line front end.

Every command prints one JSON report to stdout. Reports are byte-identical
for identical inputs and seed; wall-clock timing is only included when
--timing is passed. Exit codes: 0 success, 1 infeasible, 2 input error,
3 invariant violation, 4 resource cap exceeded.
"""

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .bits import popcount, to_tuple
from .boundaried import builtin_type_algebra, generic_structured_dp, ramsey_upper
from .decomp import (
    decomposition_metrics,
    heuristic_decomposition,
    make_nice,
    parse_td,
    serialize_td,
    validate_decomposition,
)
from .errors import InputError, InvariantError, ResourceLimitError
from .forest import mwif_dp
from .graphs import (
    GENERATORS,
    WeightMap,
    corona,
    forked_version,
    generate,
    graph_power,
    line_graph_square,
    parse_graph,
    parse_weights,
    serialize_graph,
)
from .oracles import exact_width_parameters, recognize_imtw_at_most_1
from .packing import (
    blob_graph,
    is_valid_packing,
    max_weight_distance_packing,
    max_weight_independent_packing,
    parse_subgraph_family,
    packing_distance,
    ptas_bounded_treewidth_subgraph,
)
from .traces import mwis_dp
from .verify import SUITES, run_suites


@dataclass
class SolverConfig:
    """Free parameters shared by the solver commands."""

    k: int = None
    r: int = None
    eps: Fraction = None
    d: int = None
    family: str = "paper"
    budget: int = 10**7
    seed: int = 42
    max_n: int = 8
    workers: int = 1

    def validate(self):
        if self.budget <= 0:
            raise InputError("budget must be positive")
        if self.eps is not None and not 0 < self.eps < 1:
            raise InputError(f"eps must satisfy 0 < eps < 1, got {self.eps}")
        if self.d is not None and self.d < 2:
            raise InputError(f"packing distance must be at least 2, got {self.d}")
        if self.workers < 1:
            raise InputError("worker count must be positive")


def _digest(text):
    return "sha256:" + hashlib.sha256(text.encode()).hexdigest()[:16]


def _read(path, inputs):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    inputs[path] = _digest(text)
    return text


def _write_output(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
        return {"written": path}
    return {"text": text}


def _vertices(mask):
    return [v + 1 for v in to_tuple(mask)]


def _load_instance(args, inputs, need_weights=True):
    graph = parse_graph(_read(args.graph, inputs))
    td = parse_td(_read(args.td, inputs))
    problems = validate_decomposition(graph, td)
    if problems:
        raise InputError("invalid decomposition: " + "; ".join(problems[:3]))
    weights = None
    if need_weights:
        if getattr(args, "weights", None):
            weights = parse_weights(_read(args.weights, inputs), graph.n)
        else:
            weights = WeightMap.unit(graph.n)
    return graph, td, weights


def _solver_k(args, graph, td):
    """The matching bound in force: measured unless overridden."""
    if args.k is not None:
        return args.k, {"k": args.k, "source": "flag"}
    met = decomposition_metrics(graph, td, budget_limit=args.budget)
    return met.mu, {"k": met.mu, "source": "measured-mu", "alpha": met.alpha}


def cmd_gen(args, inputs):
    params = []
    for raw in args.params:
        try:
            params.append(float(raw) if "." in raw else int(raw))
        except ValueError:
            raise InputError(f"bad generator parameter {raw!r}") from None
    if args.kind == "random":
        if len(params) == 2:
            params.append(args.seed)
    graph = generate(args.kind, *params)
    out = _write_output(serialize_graph(graph), args.output)
    return 0, {"kind": args.kind, "n": graph.n, "m": graph.m, **out}, {}


def cmd_decompose(args, inputs):
    graph = parse_graph(_read(args.graph, inputs))
    td = heuristic_decomposition(graph, args.strategy)
    met = decomposition_metrics(graph, td, budget_limit=args.budget)
    out = _write_output(serialize_td(td), args.output)
    report = {
        "strategy": args.strategy,
        "bags": td.size,
        "width": td.width(),
        "alpha": met.alpha,
        "mu": met.mu,
        **out,
    }
    return 0, report, {"valid": validate_decomposition(graph, td) == []}


def cmd_metrics(args, inputs):
    graph, td, _ = _load_instance(args, inputs, need_weights=False)
    met = decomposition_metrics(graph, td, budget_limit=args.budget)
    report = {
        "alpha": met.alpha,
        "mu": met.mu,
        "width": td.width(),
        "alpha_witness": {"node": met.alpha_witness[0] + 1, "vertices": _vertices(met.alpha_witness[1])},
        "mu_witness": {
            "node": met.mu_witness[0] + 1,
            "edges": [[u + 1, v + 1] for u, v in met.mu_witness[1]],
        },
    }
    return 0, report, {}


def cmd_exact(args, inputs):
    graph = parse_graph(_read(args.graph, inputs))
    widths = exact_width_parameters(graph, cap=args.max_n if args.max_n > 9 else 9)
    report = {
        "tree_alpha": widths.tree_alpha,
        "tree_mu": widths.tree_mu,
        "treewidth": widths.treewidth,
        "witness_ordering": {
            "tree_alpha": [v + 1 for v in widths.alpha_ordering],
            "tree_mu": [v + 1 for v in widths.mu_ordering],
            "treewidth": [v + 1 for v in widths.treewidth_ordering],
        },
    }
    return 0, report, {}


def cmd_solve_mwis(args, inputs):
    graph, td, weights = _load_instance(args, inputs)
    k, k_info = _solver_k(args, graph, td)
    nice = make_nice(graph, td)
    weight, solution = mwis_dp(graph, nice, weights, k, state_budget=args.budget)
    report = {"optimum": str(weight), "solution": _vertices(solution), **k_info}
    verdicts = {"independent": graph.is_independent(solution), "weight_matches": weights.of_set(solution) == weight}
    return 0, report, verdicts


def cmd_solve_forest(args, inputs):
    from .oracles import is_induced_forest

    graph, td, weights = _load_instance(args, inputs)
    k, k_info = _solver_k(args, graph, td)
    nice = make_nice(graph, td)
    weight, solution = mwif_dp(
        graph, nice, weights, provider=args.family, k=k, state_budget=args.budget
    )
    report = {
        "optimum": str(weight),
        "solution": _vertices(solution),
        "family": args.family,
        **k_info,
    }
    verdicts = {
        "induces_forest": is_induced_forest(graph, solution),
        "weight_matches": weights.of_set(solution) == weight,
    }
    return 0, report, verdicts


def cmd_solve_pack(args, inputs):
    graph, td, _ = _load_instance(args, inputs, need_weights=False)
    family = parse_subgraph_family(_read(args.family_file, inputs))
    sol = max_weight_independent_packing(graph, td, family, k=args.k, state_budget=args.budget)
    report = {"optimum": str(sol.weight), "chosen": list(sol.chosen)}
    verdicts = {"packing_valid": is_valid_packing(graph, family, sol.chosen) is None}
    return 0, report, verdicts


def cmd_solve_dpack(args, inputs):
    if args.d is None:
        raise InputError("dpack needs -d")
    graph, td, _ = _load_instance(args, inputs, need_weights=False)
    family = parse_subgraph_family(_read(args.family_file, inputs))
    sol = max_weight_distance_packing(graph, td, family, args.d, k=args.k, state_budget=args.budget)
    dist_ok = (
        len(sol.chosen) < 2 or packing_distance(graph, family, sol.chosen) >= args.d
    )
    report = {"optimum": str(sol.weight), "chosen": list(sol.chosen), "d": args.d}
    return 0, report, {"distance_respected": dist_ok}


def cmd_solve_ptas(args, inputs):
    from .packing import component_size_cap, treewidth_at_most

    if args.r is None or args.eps is None:
        raise InputError("ptas needs -r and --eps")
    graph, td, _ = _load_instance(args, inputs, need_weights=False)
    solution = ptas_bounded_treewidth_subgraph(
        graph, td, args.r, args.eps, k=args.k, state_budget=args.budget
    )
    cap = component_size_cap(args.r, args.eps)
    comps = graph.components_within(solution)
    report = {
        "size": popcount(solution),
        "solution": _vertices(solution),
        "r": args.r,
        "eps": str(args.eps),
        "piece_cap": cap,
    }
    verdicts = {
        "pieces_small": all(popcount(c) <= cap for c in comps),
        "treewidth_ok": all(treewidth_at_most(graph, c, args.r) for c in comps),
    }
    return 0, report, verdicts


def cmd_solve_generic(args, inputs):
    if args.r is None:
        raise InputError("generic needs -r")
    graph, td, weights = _load_instance(args, inputs)
    algebra = builtin_type_algebra(args.property)
    if args.k is not None:
        k, k_info = args.k, {"k": args.k, "source": "flag"}
    else:
        met = decomposition_metrics(graph, td, budget_limit=args.budget)
        k, k_info = met.alpha, {"k": met.alpha, "source": "measured-alpha"}
    nice = make_nice(graph, td)
    result = generic_structured_dp(
        graph, nice, weights, algebra, args.r, k, state_budget=args.budget
    )
    if result is None:
        return 1, {"feasible": False, "property": algebra.name, **k_info}, {}
    weight, solution = result
    report = {
        "optimum": str(weight),
        "solution": _vertices(solution),
        "property": algebra.name,
        "r": args.r,
        "state_vertex_cap": ramsey_upper(k + 1, args.r + 1),
        **k_info,
    }
    return 0, report, {"weight_matches": weights.of_set(solution) == weight}


def cmd_transform(args, inputs):
    graph = parse_graph(_read(args.graph, inputs))
    if args.what == "power":
        if args.k is None:
            raise InputError("power transform needs -k")
        result = graph_power(graph, args.k)
        extra = {"k": args.k}
    elif args.what == "corona":
        result = corona(graph)
        extra = {}
    elif args.what == "l2":
        result, edge_map = line_graph_square(graph)
        extra = {"edge_of_vertex": {i + 1: [u + 1, v + 1] for i, (u, v) in enumerate(edge_map)}}
    elif args.what == "blob":
        family = parse_subgraph_family(_read(args.family_file, inputs))
        result = blob_graph(graph, family)
        extra = {"members": len(family)}
    elif args.what == "forked":
        marked = []
        if args.marked:
            marked = [int(x) - 1 for x in args.marked.split(",")]
        result, roles = forked_version(graph, marked)
        extra = {"roles": list(roles)}
    else:
        raise InputError(f"unknown transform {args.what!r}")
    out = _write_output(serialize_graph(result), args.output)
    return 0, {"transform": args.what, "n": result.n, "m": result.m, **extra, **out}, {}


def cmd_recognize(args, inputs):
    graph = parse_graph(_read(args.graph, inputs))
    answer = recognize_imtw_at_most_1(graph)
    return 0, {"imtw_at_most_1": answer}, {}


def cmd_verify(args, inputs):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in SUITES:
            raise InputError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or all")
    ok, results = run_suites(names, args.seed, args.max_n)
    return (0 if ok else 3), {"suites": results, "all_ok": ok}, {}


def cmd_bench(args, inputs):
    from .decomp import single_bag_decomposition
    from .graphs import complete_bipartite

    report = {}
    g = complete_bipartite(20, 20)
    nice = make_nice(g, single_bag_decomposition(g))
    t0 = time.perf_counter()
    weight, _ = mwis_dp(g, nice, WeightMap.unit(40), k=1)
    report["mwis_K20_20"] = {"optimum": str(weight), "seconds": round(time.perf_counter() - t0, 3)}
    g = complete_bipartite(8, 8)
    td = heuristic_decomposition(g)
    met = decomposition_metrics(g, td)
    nice = make_nice(g, td)
    t0 = time.perf_counter()
    weight, _ = mwif_dp(g, nice, WeightMap.unit(16), provider="paper", k=met.mu)
    report["forest_K8_8"] = {"optimum": str(weight), "seconds": round(time.perf_counter() - t0, 3)}
    return 0, report, {}


def build_parser():
    parser = argparse.ArgumentParser(prog="imtw", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-k", type=int, default=None, help="matching/independence bound override")
        p.add_argument("-r", type=int, default=None, help="treewidth or clique bound")
        p.add_argument("--eps", type=Fraction, default=None, help="accuracy, e.g. 1/4")
        p.add_argument("-d", type=int, default=None, help="packing distance")
        p.add_argument("--family", choices=("paper", "exhaustive"), default="paper")
        p.add_argument("--strategy", choices=("min-fill", "min-degree"), default="min-fill")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--max-n", type=int, default=8)
        p.add_argument("--budget", type=int, default=10**7)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("-o", "--output", default=None, help="write the artifact to a file")
        p.add_argument("--json", action="store_true", help="accepted for compatibility; output is always JSON")
        p.add_argument("--timing", action="store_true", help="include wall time in the report")

    p = sub.add_parser("gen", help="generate a named graph")
    p.add_argument("kind", choices=sorted(GENERATORS))
    p.add_argument("params", nargs="*")
    common(p)

    p = sub.add_parser("decompose", help="heuristic tree decomposition")
    p.add_argument("graph")
    common(p)

    p = sub.add_parser("metrics", help="exact alpha and mu of a decomposition")
    p.add_argument("graph")
    p.add_argument("td")
    common(p)

    p = sub.add_parser("exact", help="exact width parameters (small graphs)")
    p.add_argument("graph")
    common(p)

    solve = sub.add_parser("solve", help="run a solver").add_subparsers(
        dest="problem", required=True
    )
    for name, needs_family, needs_w in (
        ("mwis", False, True),
        ("forest", False, True),
        ("pack", True, False),
        ("dpack", True, False),
        ("ptas", False, False),
        ("generic", False, True),
    ):
        p = solve.add_parser(name)
        p.add_argument("graph")
        p.add_argument("td")
        if needs_family:
            p.add_argument("family_file")
        if needs_w:
            p.add_argument("-w", "--weights", default=None)
        if name == "generic":
            p.add_argument("--property", default="forest", help="forest | bipartite | max-degree:<d>")
        common(p)

    p = sub.add_parser("transform", help="graph transformations")
    p.add_argument("what", choices=("power", "corona", "l2", "blob", "forked"))
    p.add_argument("graph")
    p.add_argument("family_file", nargs="?", default=None)
    p.add_argument("--marked", default=None, help="comma separated 1-based vertices")
    common(p)

    p = sub.add_parser("recognize-imtw1", help="is induced matching treewidth at most 1")
    p.add_argument("graph")
    common(p)

    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("--suite", default="all")
    common(p)

    p = sub.add_parser("bench", help="timing smoke tests")
    common(p)

    return parser


HANDLERS = {
    "gen": cmd_gen,
    "decompose": cmd_decompose,
    "metrics": cmd_metrics,
    "exact": cmd_exact,
    ("solve", "mwis"): cmd_solve_mwis,
    ("solve", "forest"): cmd_solve_forest,
    ("solve", "pack"): cmd_solve_pack,
    ("solve", "dpack"): cmd_solve_dpack,
    ("solve", "ptas"): cmd_solve_ptas,
    ("solve", "generic"): cmd_solve_generic,
    "transform": cmd_transform,
    "recognize-imtw1": cmd_recognize,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    key = (args.command, args.problem) if args.command == "solve" else args.command
    handler = HANDLERS[key]
    inputs = {}
    started = time.perf_counter()
    report = {"command": ["imtw"] + argv, "inputs": inputs, "error": None}
    try:
        config = SolverConfig(
            k=getattr(args, "k", None),
            r=getattr(args, "r", None),
            eps=getattr(args, "eps", None),
            d=getattr(args, "d", None),
            family=getattr(args, "family", "paper"),
            budget=getattr(args, "budget", 10**7),
            seed=getattr(args, "seed", 42),
            max_n=getattr(args, "max_n", 8),
            workers=getattr(args, "workers", 1),
        )
        config.validate()
        code, result, verification = handler(args, inputs)
        report["result"] = result
        report["verification"] = verification
        if verification and not all(verification.values()):
            code = 3
    except InputError as exc:
        report["error"] = {"type": "input", "message": str(exc)}
        code = 2
    except ResourceLimitError as exc:
        report["error"] = {"type": "resource", "message": str(exc)}
        code = 4
    except InvariantError as exc:
        report["error"] = {"type": "invariant", "message": str(exc)}
        code = 3
    except Exception as exc:  # the report stays complete JSON even on bugs
        report["error"] = {"type": "internal", "message": f"{type(exc).__name__}: {exc}"}
        code = 3
    if getattr(args, "timing", False):
        report["wall_time_ms"] = round(1000 * (time.perf_counter() - started), 1)
    print(json.dumps(report, sort_keys=True, indent=1))
    return code


if __name__ == "__main__":
    sys.exit(main())
