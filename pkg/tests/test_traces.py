from fractions import Fraction
from random import Random

import pytest

from imtw.bits import bit, bits, mask_of, submasks, to_tuple
from imtw.decomp import decomposition_metrics, heuristic_decomposition, make_nice, single_bag_decomposition
from imtw.errors import ResourceLimitError
from imtw.graphs import (
    Graph,
    WeightMap,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    random_graph,
)
from imtw.oracles import brute_mwis
from imtw.traces import (
    bag_trace_family,
    enumerate_maximal_independent_sets,
    mwis_dp,
    trace_family_for_bag,
)

from conftest import seeded_graphs


def brute_maximal_independent_sets(graph, universe):
    out = []
    for m in submasks(universe):
        if not graph.is_independent(m):
            continue
        if all(
            not graph.is_independent(m | bit(v))
            for v in bits(universe & ~m)
        ):
            out.append(m)
    return sorted(out, key=to_tuple)


def test_mis_enumeration_small():
    assert len(enumerate_maximal_independent_sets(cycle_graph(5))) == 5
    kn = complete_graph(6)
    assert enumerate_maximal_independent_sets(kn) == [bit(v) for v in range(6)]
    kab = complete_bipartite(2, 3)
    sides = enumerate_maximal_independent_sets(kab)
    assert sides == sorted([0b00011, 0b11100], key=to_tuple)


def test_mis_enumeration_vs_subset_scan():
    rng = Random(3)
    for g in seeded_graphs(3, 30, 1, 9):
        universe = mask_of(v for v in range(g.n) if rng.random() < 0.7)
        got = enumerate_maximal_independent_sets(g, universe=universe)
        assert got == brute_maximal_independent_sets(g, universe)


def test_mis_enumeration_limit():
    g = Graph(8, [])
    with pytest.raises(ResourceLimitError):
        enumerate_maximal_independent_sets(g, limit=0)


def test_trace_family_empty_bag():
    g = cycle_graph(4)
    fam = trace_family_for_bag(g, 0, 1)
    assert fam.members == (0,)


def test_trace_family_k33_whole_bag():
    g = complete_bipartite(3, 3)
    fam = trace_family_for_bag(g, g.vertex_mask(), 1)
    assert 0b000111 in set(fam.members) and 0b111000 in set(fam.members)
    for ind in enumerate_maximal_independent_sets(g):
        assert ind in set(fam.members)


def test_trace_family_members_are_independent():
    for g in seeded_graphs(31, 20, 2, 9):
        td = heuristic_decomposition(g)
        met = decomposition_metrics(g, td)
        for t in range(td.size):
            fam = bag_trace_family(g, td, t, met.mu, keep_provenance=True)
            for m in fam.members:
                assert g.is_independent(m)
                assert m & ~td.bags[t] == 0
            jp, q = fam.provenance[fam.members[0]]
            assert jp & ~td.bags[t] == 0 and q & td.bags[t] == 0


def test_trace_coverage_on_corpus():
    for g in seeded_graphs(32, 25, 2, 9):
        td = heuristic_decomposition(g)
        met = decomposition_metrics(g, td)
        nice = make_nice(g, td)
        maximal = enumerate_maximal_independent_sets(g)
        bound = max(g.n, 1) ** (3 * met.mu)
        for i, node in enumerate(nice.nodes):
            fam = set(trace_family_for_bag(g, node.bag, met.mu).members)
            assert len(fam) <= bound
            for ind in maximal:
                assert ind & node.bag in fam


def test_trace_family_matches_naive_q_enumeration():
    # the levelwise hit-mask growth must produce exactly the naive family
    # obtained by trying every outside subset of size at most k
    from itertools import combinations

    rng = Random(30)
    for trial in range(40):
        n = rng.randint(2, 8)
        g = random_graph(n, rng.uniform(0.2, 0.6), seed=rng.randrange(2**32))
        bag = mask_of(v for v in range(n) if rng.random() < 0.6)
        for k in (0, 1, 2):
            js = enumerate_maximal_independent_sets(g, universe=bag)
            outside = to_tuple(g.neighborhood_of_set(bag))
            naive = set()
            for size in range(min(k, len(outside)) + 1):
                for q in combinations(outside, size):
                    nq = 0
                    for x in q:
                        nq |= g.adj_mask(x)
                    for j_prime in js:
                        naive.add(j_prime & ~nq)
            fam = trace_family_for_bag(g, bag, k)
            assert set(fam.members) == naive, (trial, n, k)


def test_mwis_dp_small():
    c5 = cycle_graph(5)
    nice = make_nice(c5, heuristic_decomposition(c5))
    assert mwis_dp(c5, nice, WeightMap.unit(5), 1)[0] == 2
    k44 = complete_bipartite(4, 4)
    w = WeightMap([1, 2, 3, 4, 5, 6, 7, 8])
    nice = make_nice(k44, single_bag_decomposition(k44))
    assert mwis_dp(k44, nice, w, 1)[0] == 5 + 6 + 7 + 8


def test_mwis_dp_vs_oracle():
    rng = Random(40)
    for g in seeded_graphs(40, 60, 2, 10):
        w = WeightMap([rng.randint(0, 100) for _ in range(g.n)])
        td = heuristic_decomposition(g, rng.choice(["min-fill", "min-degree"]))
        met = decomposition_metrics(g, td)
        nice = make_nice(g, td)
        got, sol = mwis_dp(g, nice, w, met.mu, debug=True)
        assert g.is_independent(sol)
        assert got == brute_mwis(g, w)[0]


def test_mwis_rescaling_invariance():
    rng = Random(41)
    for g in seeded_graphs(41, 10, 3, 9):
        w = WeightMap([rng.randint(1, 40) for _ in range(g.n)])
        td = heuristic_decomposition(g)
        met = decomposition_metrics(g, td)
        nice = make_nice(g, td)
        base, _ = mwis_dp(g, nice, w, met.mu)
        for factor in (3, Fraction(1, 7)):
            scaled, _ = mwis_dp(g, nice, w.scaled(factor), met.mu)
            assert scaled == base * factor


def test_mwis_state_budget():
    g = complete_bipartite(4, 4)
    nice = make_nice(g, single_bag_decomposition(g))
    with pytest.raises(ResourceLimitError):
        mwis_dp(g, nice, WeightMap.unit(8), 1, state_budget=2)


def test_alekseev_diagnostic_logged(caplog):
    # a bag whose induced matchings exceed k triggers the diagnostic:
    # nine disjoint edges have 2^9 maximal independent sets, above 18^2
    g = Graph(18, [(2 * i, 2 * i + 1) for i in range(9)])
    import logging

    with caplog.at_level(logging.WARNING, logger="imtw.traces"):
        trace_family_for_bag(g, g.vertex_mask(), 1, node=7)
    assert any("above the size" in rec.getMessage() for rec in caplog.records)
