import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cliquekit.bpso import BpsoParams
from cliquekit.errors import GraphTooLarge, Infeasible
from cliquekit.graph import build_graph, complete_graph, is_clique, is_independent_set, is_maximal_clique, random_graph
from cliquekit.solvers import (
    enumerate_maximal_cliques,
    exact_max_weight_clique,
    greedy_max_weight_clique,
    max_weight_independent_set,
    modified_weights,
    oracle_max_weight_clique,
    prune_dominated,
    solve_clique,
    verify_clique_result,
)

from conftest import graphs, subset_max_clique, weights_close


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


# --- greedy --------------------------------------------------------------------


def test_greedy_idnc_uniform_weights(idnc_graph):
    g = idnc_graph.with_weights([0.9] * 5)
    res = greedy_max_weight_clique(g)
    assert res.vertices == (0, 1, 4)
    assert weights_close(res.weight, 2.7)


def test_greedy_k4():
    res = greedy_max_weight_clique(complete_graph(4))
    assert res.vertices == (0, 1, 2, 3) and res.weight == 4.0


def test_greedy_edgeless_picks_lowest_id_on_zero_scores():
    res = greedy_max_weight_clique(build_graph(3, [], [5.0, 3.0, 2.0]))
    assert res.vertices == (0,) and res.weight == 5.0


def test_greedy_empty_graph():
    res = greedy_max_weight_clique(build_graph(0))
    assert res.vertices == () and res.weight == 0.0


def test_greedy_uses_neighbour_sum_not_average():
    # vertex 0 has one heavy neighbour (score 10); vertex 2 has three light
    # neighbours summing to 12 but averaging 4: a sum rule picks vertex 2 first
    g = build_graph(6, [(0, 1), (2, 3), (2, 4), (2, 5)], [1.0, 10.0, 1.0, 4.0, 4.0, 4.0])
    scores = modified_weights(g)
    assert list(scores) == [10.0, 1.0, 12.0, 1.0, 1.0, 1.0]
    assert greedy_max_weight_clique(g).vertices == (2, 3)


@given(graphs(max_n=12))
def test_greedy_is_maximal(g):
    res = greedy_max_weight_clique(g)
    assert is_maximal_clique(g, res.vertices)
    verify_clique_result(g, res)


# --- exact ---------------------------------------------------------------------


def test_exact_ic_graph(ic_graph):
    res = exact_max_weight_clique(ic_graph)
    assert res.vertices == (0, 2, 3) and res.weight == 3.0


def test_exact_four_cycle_min_size_infeasible():
    c4 = build_graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    with pytest.raises(Infeasible):
        exact_max_weight_clique(c4, min_size=3)
    assert exact_max_weight_clique(c4, min_size=2).size == 2


def test_empty_optimum_differs_from_infeasible():
    g = build_graph(0)
    assert exact_max_weight_clique(g).vertices == ()
    with pytest.raises(Infeasible):
        exact_max_weight_clique(g, min_size=1)


def test_exact_min_size_trades_weight_for_size():
    # heavy isolated vertex vs a light triangle
    g = build_graph(4, [(1, 2), (1, 3), (2, 3)], [100.0, 1.0, 1.0, 1.0])
    assert exact_max_weight_clique(g).vertices == (0,)
    assert exact_max_weight_clique(g, min_size=2).vertices == (1, 2, 3)


def test_exact_tie_break_lexicographic():
    g = build_graph(4, [(2, 3), (0, 1)])
    assert exact_max_weight_clique(g).vertices == (0, 1)
    g = build_graph(4, [(1, 3), (0, 2)], [1.0, 1.0, 1.0, 1.0])
    assert exact_max_weight_clique(g).vertices == (0, 2)


@given(graphs(max_n=11))
def test_exact_matches_subset_scan(g):
    best_w, _ = subset_max_clique(g)
    res = exact_max_weight_clique(g)
    verify_clique_result(g, res)
    assert weights_close(res.weight, best_w)
    assert res.nodes <= 2 ** g.n or g.n == 0


@given(graphs(max_n=10), st.integers(1, 5))
def test_exact_min_size_matches_subset_scan(g, k):
    best_w, _ = subset_max_clique(g, k)
    if best_w is None:
        with pytest.raises(Infeasible):
            exact_max_weight_clique(g, k)
    else:
        res = exact_max_weight_clique(g, k)
        assert res.size >= k and weights_close(res.weight, best_w)


@given(graphs(max_n=14, weights="int"))
def test_exact_matches_networkx(g):
    h = to_nx(g)
    for v in range(g.n):
        h.nodes[v]["w"] = int(g.weights[v])
    _, nx_w = nx.max_weight_clique(h, weight="w")
    assert exact_max_weight_clique(g).weight == nx_w


@given(graphs(max_n=11), st.floats(0.1, 50.0))
def test_exact_scaling_invariance(g, c):
    res = exact_max_weight_clique(g)
    scaled = exact_max_weight_clique(g.with_weights([w * c for w in g.weights]))
    assert weights_close(scaled.weight, c * res.weight)
    assert weights_close(g.weight_of(scaled.vertices), res.weight)


def test_exact_scaling_keeps_vertex_set_on_int_weights(rng):
    for _ in range(30):
        g = random_graph(12, 0.5, rng, "int")
        a = exact_max_weight_clique(g).vertices
        b = exact_max_weight_clique(g.with_weights([w * 4.0 for w in g.weights])).vertices
        assert a == b


@given(graphs(max_n=12, weights="unit"))
def test_unit_weights_give_maximum_cardinality(g):
    res = exact_max_weight_clique(g)
    omega = max((len(c) for c in nx.find_cliques(to_nx(g))), default=0)
    assert res.size == omega


@given(graphs(max_n=11), st.integers(0, 2**32))
def test_exact_dominates_heuristics(g, seed):
    ex = exact_max_weight_clique(g).weight
    assert ex >= greedy_max_weight_clique(g).weight - 1e-12
    assert ex >= solve_clique(g, "bpso", params=BpsoParams(particles=5, iterations=5, seed=seed)).weight - 1e-12


# --- enumeration oracle ---------------------------------------------------------


def test_enumerate_triangle():
    assert enumerate_maximal_cliques(complete_graph(3)) == [(0, 1, 2)]


def test_enumerate_idnc_graph(idnc_graph):
    assert enumerate_maximal_cliques(idnc_graph) == [(0, 1, 4), (0, 2), (2, 3)]


def test_moon_moser_count():
    parts = [range(0, 3), range(3, 6), range(6, 9)]
    edges = [(i, j) for a, b in itertools.combinations(parts, 2) for i in a for j in b]
    g = build_graph(9, edges)
    cliques = enumerate_maximal_cliques(g)
    assert len(cliques) == 27 == 3 ** 3


def test_enumerate_guard():
    g = build_graph(21)
    with pytest.raises(GraphTooLarge):
        enumerate_maximal_cliques(g)
    with pytest.raises(GraphTooLarge):
        oracle_max_weight_clique(g)
    assert len(enumerate_maximal_cliques(g, guard=None)) == 21


@given(graphs(max_n=12))
def test_enumeration_matches_networkx(g):
    ours = enumerate_maximal_cliques(g)
    theirs = sorted(tuple(sorted(c)) for c in nx.find_cliques(to_nx(g))) if g.n else []
    assert ours == theirs
    assert len(ours) == len(set(ours))
    assert all(is_maximal_clique(g, c) for c in ours)
    assert len(ours) <= 3 ** -(-g.n // 3)


@given(graphs(max_n=12))
def test_oracle_matches_exact(g):
    ex = exact_max_weight_clique(g)
    orc = oracle_max_weight_clique(g)
    assert weights_close(ex.weight, orc.weight)


# --- independent set -----------------------------------------------------------


def test_mwis_edgeless():
    res = max_weight_independent_set(build_graph(4))
    assert res.vertices == (0, 1, 2, 3)


def test_mwis_complete():
    res = max_weight_independent_set(complete_graph(4, [1.0, 3.0, 3.0, 2.0]))
    assert res.vertices == (1,) and res.weight == 3.0


def brute_mwis(g):
    best = 0.0
    for mask in range(1 << g.n):
        s = [v for v in range(g.n) if mask >> v & 1]
        if is_independent_set(g, s):
            best = max(best, g.weight_of(s))
    return best


def test_mwis_random_matches_subset_scan(rng):
    for _ in range(10):
        g = random_graph(12, float(rng.uniform(0.2, 0.8)), rng, "real")
        res = max_weight_independent_set(g)
        assert is_independent_set(g, res.vertices)
        assert weights_close(res.weight, brute_mwis(g))


# --- pruning -------------------------------------------------------------------


def star(k=4):
    return build_graph(k + 1, [(0, i) for i in range(1, k + 1)], [10.0] + [1.0] * k)


def test_prune_zero_bound_is_identity(rng):
    g = random_graph(10, 0.4, rng, "real")
    pruned, kept = prune_dominated(g, 0.0)
    assert kept == list(range(10)) and pruned == g


def test_prune_star_rule():
    g = star()
    # leaf: 1 + 10 = 11, not below 11, so every vertex survives
    _, kept = prune_dominated(g, 11.0)
    assert kept == [0, 1, 2, 3, 4]
    # raising the bound past 11 drops every leaf; the centre (10 + 4) stays
    pruned, kept = prune_dominated(g, 11.5)
    assert kept == [0] and pruned.n == 1


def test_prune_keeps_optimum(rng):
    for _ in range(100):
        n = int(rng.integers(1, 15))
        g = random_graph(n, float(rng.uniform(0.1, 0.9)), rng, "real")
        lb = greedy_max_weight_clique(g).weight
        pruned, kept = prune_dominated(g, lb)
        res = exact_max_weight_clique(pruned)
        assert weights_close(res.weight, exact_max_weight_clique(g).weight)
        assert is_clique(g, [kept[v] for v in res.vertices])


def test_solve_clique_dispatch(ic_graph):
    for algo in ("exact", "greedy", "bpso", "oracle"):
        res = solve_clique(ic_graph, algo)
        assert res.algorithm == algo
        verify_clique_result(ic_graph, res)
    with pytest.raises(ValueError):
        solve_clique(ic_graph, "magic")


def test_heuristic_min_size_too_small_is_infeasible():
    # greedy follows the heavy neighbour into the edge {0, 1}; the triangle needs k=3
    g = build_graph(5, [(0, 1), (2, 3), (2, 4), (3, 4)], [1.0, 100.0, 1.0, 1.0, 1.0])
    assert greedy_max_weight_clique(g).vertices == (0, 1)
    with pytest.raises(Infeasible):
        solve_clique(g, "greedy", min_size=3)
    assert solve_clique(g, "exact", min_size=3).vertices == (2, 3, 4)


def test_modified_weights_restricted():
    g = complete_graph(3, [1.0, 2.0, 4.0])
    assert list(modified_weights(g)) == [6.0, 5.0, 3.0]
    assert list(modified_weights(g, np.array([0, 1]))) == [2.0, 1.0]
