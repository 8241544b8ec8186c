"""Invariant suites behind the ``verify`` command.

Each suite runs a batch of seeded, quantified checks and reports one line per
check. The suites revisit the package's central claims at desk scale: oracle
equivalences, coverage of trace and signature families, transfer inequalities,
structural identities, and the recognition procedure.
"""

import logging
from fractions import Fraction
from itertools import combinations
from random import Random

from .bits import bit, bits, popcount, submasks, to_tuple
from .boundaried import (
    BipartiteAlgebra,
    BoundariedGraph,
    ForestAlgebra,
    MaxDegreeAlgebra,
    forget_label,
    glue,
)
from .corpus import random_corpus, sparse_corpus
from .decomp import (
    blob_decomposition,
    closed_neighborhood_expansion,
    decomposition_metrics,
    find_bag_dominated_vertex,
    heuristic_decomposition,
    induced_minor_decomposition,
    make_nice,
    odd_power_decomposition,
    validate_decomposition,
)
from .forest import forest_anatomy, mwif_dp, signature_family_paper, signature_in
from .graphs import (
    Graph,
    ball_mask,
    complete_bipartite,
    corona,
    graph_power,
    hypercube_graph,
    line_graph_square,
    matching_join,
    random_graph,
)
from .oracles import (
    brute_max_weight_induced_forest,
    brute_mwis,
    enumerate_maximal_induced_forests,
    exact_width_parameters,
    recognize_imtw_at_most_1,
)
from .packing import (
    SubgraphFamily,
    blob_graph,
    enumerate_small_connected_subgraphs,
    is_valid_packing,
    max_weight_distance_packing,
    max_weight_independent_packing,
    ptas_bounded_treewidth_subgraph,
    treewidth_at_most,
)
from .traces import enumerate_maximal_independent_sets, mwis_dp, trace_family_for_bag

logger = logging.getLogger(__name__)


class Check:
    def __init__(self, name):
        self.name = name
        self.instances = 0
        self.failures = []

    def record(self, ok, witness=None):
        self.instances += 1
        if not ok:
            self.failures.append(witness)

    @property
    def ok(self):
        return not self.failures and self.instances > 0

    def as_dict(self):
        return {
            "check": self.name,
            "instances": self.instances,
            "ok": self.ok,
            "failures": [str(w) for w in self.failures[:5]],
        }


def _prepared(graph, strategy="min-fill"):
    td = heuristic_decomposition(graph, strategy)
    met = decomposition_metrics(graph, td)
    nice = make_nice(graph, td)
    return td, met, nice


def suite_graphs(seed, max_n):
    rng = Random(seed)
    checks = [Check("parse-serialize round trip"), Check("power definition"), Check("corona keeps original"), Check("fork decode round trip")]
    from .graphs import distance_matrix, forked_version, decode_forked, parse_graph, serialize_graph, induced_subgraph

    for _ in range(60):
        n = rng.randint(1, max_n)
        g = random_graph(n, rng.choice([0.2, 0.5]), seed=rng.randrange(2**32))
        text = serialize_graph(g)
        checks[0].record(parse_graph(text) == g and serialize_graph(parse_graph(text)) == text, text)
        k = rng.randint(1, 3)
        power = graph_power(g, k) if n else None
        dist = distance_matrix(g)
        ok = all(
            power.has_edge(u, v) == (1 <= dist[u][v] <= k)
            for u in range(n)
            for v in range(u + 1, n)
        )
        checks[1].record(ok, (n, k))
        cg = corona(g)
        sub, _ = induced_subgraph(cg, range(n))
        checks[2].record(sub == g, n)
        marked = {v for v in range(n) if rng.random() < 0.5 or g.degree(v) == 0}
        forked, _ = forked_version(g, marked)
        back_g, back_m = decode_forked(forked)
        checks[3].record(back_g == g and set(back_m) == marked, (n, sorted(marked)))
    return checks


def suite_decomp(seed, max_n):
    rng = Random(seed)
    checks = [
        Check("heuristic decompositions validate"),
        Check("nice form validates, bags shrink"),
        Check("metrics match matching oracle"),
        Check("closed neighborhood degree bound"),
        Check("bag-dominated vertex exists"),
        Check("induced-minor mu monotone"),
    ]
    from .oracles import brute_induced_matching_touching

    for _ in range(40):
        n = rng.randint(2, max_n)
        g = random_graph(n, rng.choice([0.2, 0.5]), seed=rng.randrange(2**32))
        strategy = rng.choice(["min-fill", "min-degree"])
        td = heuristic_decomposition(g, strategy)
        checks[0].record(validate_decomposition(g, td) == [], (n, strategy))
        nice = make_nice(g, td)
        as_td = nice.to_tree_decomposition()
        ok = validate_decomposition(g, as_td) == [] and all(
            any(b & ~orig == 0 for orig in td.bags) for b in as_td.bags
        )
        checks[1].record(ok, n)
        met = decomposition_metrics(g, td)
        oracle_mu = max(brute_induced_matching_touching(g, b)[0] for b in td.bags)
        checks[2].record(met.mu == oracle_mu, (met.mu, oracle_mu))
        if g.m:
            expanded = closed_neighborhood_expansion(g, td)
            met_exp = decomposition_metrics(g, expanded)
            bound = 2 * met.mu * g.max_degree() ** 2
            checks[3].record(
                validate_decomposition(g, expanded) == [] and met_exp.alpha <= bound,
                (met_exp.alpha, bound),
            )
        v, t = find_bag_dominated_vertex(g, td)
        checks[4].record(g.closed_mask(v) & ~td.bags[t] == 0, (v, t))
        if n >= 3:
            if g.m and rng.random() < 0.5:
                u, w = g.edges[rng.randrange(g.m)]
                op = ("contract", u, w)
            else:
                op = ("delete", rng.randrange(n))
            h, td2, _ = induced_minor_decomposition(g, td, op)
            met2 = decomposition_metrics(h, td2)
            checks[5].record(
                validate_decomposition(h, td2) == [] and met2.mu <= met.mu, (op, met2.mu, met.mu)
            )
    return checks


def suite_traces(seed, max_n):
    rng = Random(seed)
    checks = [Check("mwis equals oracle"), Check("trace coverage"), Check("family size bound")]
    for g, w in random_corpus(seed, 40, max_n):
        td, met, nice = _prepared(g)
        got, _ = mwis_dp(g, nice, w, met.mu)
        expected, _ = brute_mwis(g, w)
        checks[0].record(got == expected, (g.n, got, expected))
        maximal = enumerate_maximal_independent_sets(g)
        n_bound = max(g.n, 1) ** (3 * met.mu)
        for i, node in enumerate(nice.nodes):
            fam = trace_family_for_bag(g, node.bag, met.mu, node=i)
            members = set(fam.members)
            checks[1].record(all(ind & node.bag in members for ind in maximal), (g.n, i))
            checks[2].record(len(fam) <= n_bound, (len(fam), n_bound))
    return checks


def suite_forest(seed, max_n):
    rng = Random(seed)
    checks = [
        Check("forest optimum equals oracle, both providers"),
        Check("signature coverage"),
        Check("skeleton bag bound 8k"),
        Check("anatomy partitions maximal forests"),
    ]
    for g, w in random_corpus(seed, 18, min(max_n, 8), n_min=3):
        td, met, nice = _prepared(g)
        expected, _ = brute_max_weight_induced_forest(g, w)
        w_ex, _ = mwif_dp(g, nice, w, provider="exhaustive")
        w_pa, _ = mwif_dp(g, nice, w, provider="paper", k=met.mu)
        checks[0].record(w_ex == w_pa == expected, (g.n, w_ex, w_pa, expected))
        forests = enumerate_maximal_induced_forests(g)
        vt = nice.subtree_vertex_masks()
        for i, node in enumerate(nice.nodes):
            traces = trace_family_for_bag(g, node.bag, met.mu, node=i).members
            fam = signature_family_paper(g, node.bag, vt[i], met.mu, traces, node=i)
            for f in forests:
                checks[1].record(signature_in(g, f, node.bag, vt[i]) in fam, (g.n, i, f))
                anatomy = forest_anatomy(g, f)
                checks[2].record(
                    popcount(anatomy.skeleton & node.bag) <= 8 * met.mu, (g.n, i, f)
                )
        for f in forests:
            anatomy = forest_anatomy(g, f)
            parts_ok = (
                anatomy.skeleton | anatomy.leaves | anatomy.trivial == f
                and anatomy.skeleton & anatomy.leaves == 0
                and anatomy.skeleton & anatomy.trivial == 0
                and anatomy.leaves & anatomy.trivial == 0
                and g.is_independent(anatomy.leaves | anatomy.trivial)
            )
            checks[3].record(parts_ok, (g.n, f))
    return checks


def suite_packing(seed, max_n):
    rng = Random(seed)
    checks = [
        Check("blob packing equals subfamily brute force"),
        Check("distance packing equals brute force"),
        Check("power-blob identity"),
        Check("blob transfer inequalities"),
        Check("odd power transfer inequality"),
        Check("ptas guarantee"),
    ]
    from .graphs import distance_matrix

    def brute_pack(g, fam, mode, d=None):
        dist = distance_matrix(g)
        best = Fraction(0)
        for r in range(len(fam.members) + 1):
            for combo in combinations(range(len(fam.members)), r):
                if is_valid_packing(g, fam, combo, mode, d=d, dist=dist) is None:
                    wsum = sum((fam.members[i].weight for i in combo), Fraction(0))
                    best = max(best, wsum)
        return best

    for idx in range(12):
        n = rng.randint(4, max_n)
        g = random_graph(n, rng.choice([0.3, 0.5]), seed=rng.randrange(2**32))
        td = heuristic_decomposition(g)
        met = decomposition_metrics(g, td)
        pool = enumerate_small_connected_subgraphs(g, 3)
        rng.shuffle(pool)
        sets = pool[: min(9, len(pool))]
        fam = SubgraphFamily(sets, [rng.randint(0, 20) for _ in sets])
        sol = max_weight_independent_packing(g, td, fam)
        checks[0].record(sol.weight == brute_pack(g, fam, "independent"), (n, idx))
        for d in (2, 4):
            sol_d = max_weight_distance_packing(g, td, fam, d)
            checks[1].record(sol_d.weight == brute_pack(g, fam, "distance", d), (n, d))
        for k, d in ((1, 1), (2, 1), (1, 2)):
            balls = SubgraphFamily([ball_mask(g, v, d) for v in range(n)])
            gk = graph_power(g, k) if k > 1 else g
            checks[2].record(
                graph_power(g, k + 2 * d) == blob_graph(gk, balls), (n, k, d)
            )
        multi = SubgraphFamily([m for m in sets for _ in (0, 1)])
        if sets:
            td_multi = blob_decomposition(g, td, fam)
            met_multi = decomposition_metrics(blob_graph(g, fam), td_multi)
            checks[3].record(met_multi.mu <= met.mu, (n, met_multi.mu, met.mu))
            big = SubgraphFamily([m for m in pool if popcount(m) >= 2][:9] or [g.vertex_mask()])
            bd = blob_decomposition(g, td, big)
            met_big = decomposition_metrics(blob_graph(g, big), bd)
            checks[3].record(met_big.alpha <= met.mu, (n, met_big.alpha, met.mu))
        if g.m:
            for r in (3, 5):
                tdr = odd_power_decomposition(g, td, r)
                gr = graph_power(g, r)
                metr = decomposition_metrics(gr, tdr)
                checks[4].record(
                    validate_decomposition(gr, tdr) == [] and metr.alpha <= met.mu,
                    (n, r, metr.alpha, met.mu),
                )
        if n <= 9:
            opt = max(
                popcount(m)
                for m in submasks(g.vertex_mask())
                if treewidth_at_most(g, m, 1)
            )
            for eps in (0.25, 0.5):
                got = popcount(ptas_bounded_treewidth_subgraph(g, td, 1, eps))
                checks[5].record(got >= (1 - eps) * opt, (n, eps, got, opt))
    return checks


def suite_boundaried(seed, max_n):
    rng = Random(seed)
    checks = [
        Check("algebra compositionality"),
        Check("structured DP equals brute force"),
    ]
    algebras = [ForestAlgebra(), BipartiteAlgebra(), MaxDegreeAlgebra(0), MaxDegreeAlgebra(1), MaxDegreeAlgebra(2)]

    def rand_bg(ell):
        n = rng.randint(0, 6)
        g = random_graph(n, rng.random(), seed=rng.randrange(2**32))
        labels = {}
        for v in range(n):
            if rng.random() < 0.5:
                l = rng.randint(1, ell)
                if l not in labels.values():
                    labels[v] = l
        return BoundariedGraph.make(g, labels, ell)

    for _ in range(200):
        ell = rng.randint(1, 4)
        b1, b2 = rand_bg(ell), rand_bg(ell)
        merged = glue(b1, b2)
        l = rng.randint(1, ell)
        for alg in algebras:
            ok = (
                alg.type_of(merged) == alg.glue(alg.type_of(b1), alg.type_of(b2))
                and alg.type_of(forget_label(b1, l)) == alg.forget(alg.type_of(b1), l)
                and alg.accepting(alg.type_of(b1)) == alg.holds(b1.graph)
            )
            checks[0].record(ok, alg.name)

    from .boundaried import generic_structured_dp

    def brute_best(g, w, predicate):
        best = Fraction(0)
        for m in submasks(g.vertex_mask()):
            if predicate(m):
                best = max(best, w.of_set(m))
        return best

    def bip_mask(g, m):
        return BipartiteAlgebra().holds(_induced(g, m))

    def _induced(g, m):
        verts = to_tuple(m)
        idx = {v: i for i, v in enumerate(verts)}
        return Graph(len(verts), [(idx[u], idx[v]) for u, v in g.edges if u in idx and v in idx])

    for g, w in random_corpus(seed + 1, 10, min(max_n, 9), n_min=2):
        td, met, nice = _prepared(g)
        res = generic_structured_dp(g, nice, w, ForestAlgebra(), r=2, k=met.alpha)
        exp, _ = brute_max_weight_induced_forest(g, w)
        checks[1].record(res is not None and res[0] == exp, ("forest", g.n))
        res = generic_structured_dp(g, nice, w, BipartiteAlgebra(), r=2, k=met.alpha)
        checks[1].record(res is not None and res[0] == brute_best(g, w, lambda m: bip_mask(g, m)), ("bipartite", g.n))
        for d in (0, 1, 2):
            res = generic_structured_dp(g, nice, w, MaxDegreeAlgebra(d), r=d + 1, k=met.alpha)
            exp_d = brute_best(
                g, w, lambda m: all(popcount(g.adj_mask(v) & m) <= d for v in bits(m))
            )
            checks[1].record(res is not None and res[0] == exp_d, (f"max-degree:{d}", g.n))
    return checks


def suite_oracles(seed, max_n):
    rng = Random(seed)
    checks = [
        Check("width chain on random graphs"),
        Check("line graph square equality"),
        Check("corona equality"),
        Check("power monotonicity"),
        Check("odd power strong inequality"),
        Check("degree bounds"),
        Check("recognition agrees with oracle"),
        Check("anchors"),
    ]
    for g in sparse_corpus(seed, 15, min(max_n, 8)):
        ew = exact_width_parameters(g)
        checks[0].record(ew.tree_mu <= ew.tree_alpha <= ew.treewidth + 1, g.n)
        if g.m <= 9:
            sq, _ = line_graph_square(g)
            checks[1].record(exact_width_parameters(sq).tree_alpha == ew.tree_mu, (g.n, g.m))
            checks[6].record(recognize_imtw_at_most_1(g) == (ew.tree_mu <= 1), (g.n, g.m))
        if g.n <= 4:
            checks[2].record(
                exact_width_parameters(corona(g)).tree_mu == ew.tree_alpha, g.n
            )
        if g.n <= 8:
            for r in (1, 2):
                er = exact_width_parameters(graph_power(g, r)) if r > 1 else ew
                er2 = exact_width_parameters(graph_power(g, r + 2))
                checks[3].record(
                    er2.tree_alpha <= er.tree_alpha and er2.tree_mu <= er.tree_mu, (g.n, r)
                )
            e3 = exact_width_parameters(graph_power(g, 3))
            checks[4].record(e3.tree_alpha <= ew.tree_mu if g.m else True, g.n)
        if g.m:
            delta = g.max_degree()
            checks[5].record(
                ew.tree_alpha <= 2 * ew.tree_mu * delta**2
                and ew.treewidth <= 2 * ew.tree_mu * delta**2 * (delta + 1),
                g.n,
            )
    k33 = exact_width_parameters(complete_bipartite(3, 3))
    checks[7].record(k33.tree_alpha == 3 and k33.tree_mu == 1, "K33")
    mj2 = exact_width_parameters(matching_join(2))
    checks[7].record(mj2.tree_mu >= 2, "matching_join(2)")
    q4 = hypercube_graph(4)
    for strategy in ("min-fill", "min-degree"):
        td = heuristic_decomposition(q4, strategy)
        met = decomposition_metrics(q4, td)
        checks[7].record(validate_decomposition(q4, td) == [] and met.mu >= 2, f"Q4 {strategy}")
    return checks


SUITES = {
    "graphs": suite_graphs,
    "decomp": suite_decomp,
    "traces": suite_traces,
    "forest": suite_forest,
    "packing": suite_packing,
    "boundaried": suite_boundaried,
    "oracles": suite_oracles,
}


def run_suites(names, seed, max_n):
    results = []
    all_ok = True
    for name in names:
        checks = SUITES[name](seed, max_n)
        ok = all(c.ok for c in checks)
        all_ok &= ok
        results.append({"suite": name, "ok": ok, "checks": [c.as_dict() for c in checks]})
    return all_ok, results
