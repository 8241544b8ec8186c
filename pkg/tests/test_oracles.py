from random import Random

import pytest

from imtw.bits import bit, bits, mask_of, popcount, submasks
from imtw.errors import ResourceLimitError
from imtw.graphs import (
    Graph,
    WeightMap,
    chordal_power_gadget,
    complete_bipartite,
    complete_graph,
    corona,
    cycle_graph,
    graph_power,
    line_graph_square,
    matching_join,
    path_graph,
    petersen_graph,
    random_graph,
)
from imtw.oracles import (
    brute_induced_matching_touching,
    brute_max_weight_induced_forest,
    brute_mwis,
    chordality_test,
    enumerate_maximal_induced_forests,
    exact_width_parameters,
    find_cycle_within,
    is_induced_forest,
    recognize_imtw_at_most_1,
)

from conftest import brute_subsets_mwis, chordal_completion, has_cycle_within, seeded_graphs


def test_brute_mwis_small():
    assert brute_mwis(cycle_graph(5), WeightMap.unit(5))[0] == 2
    g = complete_graph(4)
    w = WeightMap([3, 9, 2, 5])
    assert brute_mwis(g, w)[0] == 9
    assert brute_mwis(petersen_graph(), WeightMap.unit(10))[0] == 4


def test_brute_mwis_matches_subset_scan():
    rng = Random(7)
    for g in seeded_graphs(70, 25, 2, 10):
        w = WeightMap([rng.randint(0, 30) for _ in range(g.n)])
        assert brute_mwis(g, w)[0] == brute_subsets_mwis(g, w)


def test_brute_mwis_cap():
    with pytest.raises(ResourceLimitError):
        brute_mwis(Graph(30, []), WeightMap.unit(30))


def test_forest_oracle_small():
    assert brute_max_weight_induced_forest(complete_graph(4), WeightMap.unit(4))[0] == 2
    assert brute_max_weight_induced_forest(cycle_graph(5), WeightMap.unit(5))[0] == 4
    # regression constant computed by this module, frozen
    assert brute_max_weight_induced_forest(petersen_graph(), WeightMap.unit(10))[0] == 7


def test_forest_oracle_returns_forest_and_weight():
    rng = Random(71)
    for g in seeded_graphs(71, 15, 3, 10):
        w = WeightMap([rng.randint(0, 30) for _ in range(g.n)])
        weight, sol = brute_max_weight_induced_forest(g, w)
        assert not has_cycle_within(g, sol)
        assert w.of_set(sol) == weight
        expected = max(
            (w.of_set(m) for m in submasks(g.vertex_mask()) if not has_cycle_within(g, m)),
        )
        assert weight == expected


def test_enumerate_maximal_forests_small():
    k3 = complete_graph(3)
    assert enumerate_maximal_induced_forests(k3) == [0b011, 0b101, 0b110]
    edgeless = Graph(4, [])
    assert enumerate_maximal_induced_forests(edgeless) == [0b1111]
    c4 = cycle_graph(4)
    got = enumerate_maximal_induced_forests(c4)
    assert len(got) == 4 and all(popcount(m) == 3 for m in got)


def test_maximal_forests_are_maximal():
    for g in seeded_graphs(5, 10, 3, 9):
        forests = enumerate_maximal_induced_forests(g)
        for f in forests:
            assert not has_cycle_within(g, f)
            for v in bits(g.vertex_mask() & ~f):
                assert has_cycle_within(g, f | bit(v))


def test_matching_touching_small():
    g = path_graph(5)
    assert brute_induced_matching_touching(g, 0)[0] == 0
    star = Graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    assert brute_induced_matching_touching(star, bit(0))[0] == 1
    assert brute_induced_matching_touching(path_graph(5), path_graph(5).vertex_mask())[0] == 2


def test_matching_touching_vs_line_graph_square():
    # second formulation: independent sets in the square of the line graph
    rng = Random(15)
    for g in seeded_graphs(15, 20, 3, 8):
        if not g.m:
            continue
        bag = mask_of(v for v in range(g.n) if rng.random() < 0.6)
        got, edges = brute_induced_matching_touching(g, bag)
        for i, e in enumerate(edges):
            for f in edges[i + 1 :]:
                joint = mask_of(e) | mask_of(f)
                assert not g.is_connected_within(joint)
        sq, edge_map = line_graph_square(g)
        candidates = [i for i, (u, v) in enumerate(edge_map) if bag & (bit(u) | bit(v))]
        best = 0
        for m in submasks(mask_of(candidates)):
            if sq.is_independent(m):
                best = max(best, popcount(m))
        assert got == best


def test_exact_widths_anchors():
    k33 = exact_width_parameters(complete_bipartite(3, 3))
    assert k33.tree_alpha == 3 and k33.tree_mu == 1
    c6 = exact_width_parameters(cycle_graph(6))
    assert c6.tree_mu == 2
    c5 = exact_width_parameters(cycle_graph(5))
    assert c5.tree_alpha == 2 and c5.tree_mu == 1 and c5.treewidth == 2
    mj2 = exact_width_parameters(matching_join(2))
    assert mj2.tree_mu >= 2


def test_exact_widths_chordal_corpus():
    rng = Random(12)
    for _ in range(12):
        g = chordal_completion(random_graph(rng.randint(1, 8), 0.4, seed=rng.randrange(2**32)))
        assert chordality_test(g)[0]
        assert exact_width_parameters(g).tree_alpha == 1


def test_exact_widths_chain():
    for g in seeded_graphs(4, 20, 1, 8):
        ew = exact_width_parameters(g)
        assert ew.tree_mu <= ew.tree_alpha <= ew.treewidth + 1


def test_exact_widths_witness_orderings_are_permutations():
    g = random_graph(7, 0.4, seed=2)
    ew = exact_width_parameters(g)
    for ordering in (ew.alpha_ordering, ew.mu_ordering, ew.treewidth_ordering):
        assert sorted(ordering) == list(range(7))


def test_prop_23_line_graph_square_equality():
    rng = Random(9)
    checked = 0
    for g in seeded_graphs(9, 40, 2, 8):
        if g.m == 0 or g.m > 9:
            continue
        sq, _ = line_graph_square(g)
        assert exact_width_parameters(sq).tree_alpha == exact_width_parameters(g).tree_mu
        checked += 1
    assert checked >= 10


def test_prop_23_corona_equality():
    for g in seeded_graphs(10, 16, 1, 4):
        assert exact_width_parameters(corona(g)).tree_mu == exact_width_parameters(g).tree_alpha


def test_power_monotonicity():
    for g in seeded_graphs(11, 12, 2, 8):
        ew1 = exact_width_parameters(g)
        for r in (1, 2):
            er = exact_width_parameters(graph_power(g, r)) if r > 1 else ew1
            er2 = exact_width_parameters(graph_power(g, r + 2))
            assert er2.tree_alpha <= er.tree_alpha
            assert er2.tree_mu <= er.tree_mu
        if g.m:
            e3 = exact_width_parameters(graph_power(g, 3))
            assert e3.tree_alpha <= ew1.tree_mu


def test_degree_bounds():
    for g in seeded_graphs(13, 20, 2, 8):
        if not g.m:
            continue
        ew = exact_width_parameters(g)
        delta = g.max_degree()
        assert ew.tree_alpha <= 2 * ew.tree_mu * delta**2
        assert ew.treewidth <= 2 * ew.tree_mu * delta**2 * (delta + 1)


def test_induced_minor_monotone_exact():
    from imtw.decomp import induced_minor_decomposition, single_bag_decomposition

    rng = Random(16)
    done = 0
    while done < 30:
        g = random_graph(rng.randint(3, 8), rng.choice([0.3, 0.5]), seed=rng.randrange(2**32))
        before = exact_width_parameters(g).tree_mu
        if g.m and rng.random() < 0.5:
            u, v = g.edges[rng.randrange(g.m)]
            op = ("contract", u, v)
        else:
            op = ("delete", rng.randrange(g.n))
        h, _, _ = induced_minor_decomposition(g, single_bag_decomposition(g), op)
        if h.n == 0:
            continue
        assert exact_width_parameters(h).tree_mu <= before
        done += 1


def test_chordality_small():
    tree = Graph(5, [(0, 1), (1, 2), (1, 3), (3, 4)])
    ok, peo = chordality_test(tree)
    assert ok and sorted(peo) == list(range(5))
    ok, hole = chordality_test(cycle_graph(4))
    assert not ok and len(hole) == 4


def test_chordality_peo_is_perfect():
    rng = Random(19)
    for _ in range(15):
        g = chordal_completion(random_graph(rng.randint(2, 9), 0.4, seed=rng.randrange(2**32)))
        ok, peo = chordality_test(g)
        assert ok
        pos = {v: i for i, v in enumerate(peo)}
        for v in peo:
            later = [u for u in g.neighbors(v) if pos[u] > pos[v]]
            for i, a in enumerate(later):
                for b in later[i + 1 :]:
                    assert g.has_edge(a, b)


def test_chordality_hole_witness_is_a_hole():
    rng = Random(20)
    found = 0
    for _ in range(40):
        g = random_graph(rng.randint(4, 9), 0.4, seed=rng.randrange(2**32))
        ok, witness = chordality_test(g)
        if ok:
            continue
        found += 1
        hole = list(witness)
        assert len(hole) >= 4
        cyc = hole + [hole[0]]
        for a, b in zip(cyc, cyc[1:]):
            assert g.has_edge(a, b)
        for i, a in enumerate(hole):
            for j in range(i + 2, len(hole)):
                if i == 0 and j == len(hole) - 1:
                    continue
                assert not g.has_edge(a, hole[j])
    assert found >= 5


def test_gadget_outputs_chordal():
    for base in (cycle_graph(5), path_graph(4), complete_graph(4)):
        for r in (2, 4):
            gadget, _ = chordal_power_gadget(base, r)
            assert chordality_test(gadget)[0]


def test_recognizer_small():
    assert recognize_imtw_at_most_1(cycle_graph(5))
    assert not recognize_imtw_at_most_1(cycle_graph(6))
    assert recognize_imtw_at_most_1(complete_bipartite(3, 3))


def test_recognizer_agrees_with_oracle():
    checked = 0
    for g in seeded_graphs(21, 60, 2, 8):
        if g.m > 9:
            continue
        assert recognize_imtw_at_most_1(g) == (exact_width_parameters(g).tree_mu <= 1)
        checked += 1
    assert checked >= 20


def test_find_cycle_witness():
    g = cycle_graph(5)
    cyc = find_cycle_within(g, g.vertex_mask())
    assert cyc is not None and len(cyc) >= 3
    assert find_cycle_within(g, 0b01111) is None
    assert is_induced_forest(g, 0b01111)
    assert not is_induced_forest(g, g.vertex_mask())
